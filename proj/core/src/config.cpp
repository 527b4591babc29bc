#include "mecanav/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace mecanav {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
  throw ConfigError(message);
}

void reject_unknown_keys(const json& object, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  const std::set<std::string> allowed_set(allowed.begin(), allowed.end());
  for (const auto& [key, value] : object.items()) {
    if (!allowed_set.count(key)) {
      fail("unknown key \"" + (path.empty() ? key : path + "." + key) + "\"");
    }
  }
}

double as_number(const json& value, const std::string& path) {
  if (!value.is_number()) fail("\"" + path + "\" must be a number");
  return value.get<double>();
}

int as_integer(const json& value, const std::string& path) {
  if (!value.is_number_integer()) fail("\"" + path + "\" must be an integer");
  return value.get<int>();
}

std::uint64_t as_seed(const json& value, const std::string& path) {
  if (!value.is_number_unsigned() && !value.is_number_integer()) {
    fail("\"" + path + "\" must be a non-negative integer");
  }
  if (value.is_number_integer() && value.get<std::int64_t>() < 0) {
    fail("\"" + path + "\" must be a non-negative integer");
  }
  return value.get<std::uint64_t>();
}

void read_number(const json& object, const char* key, const std::string& path,
                 double& out) {
  if (object.contains(key)) out = as_number(object.at(key), path + key);
}

void parse_geometry(const json& j, RobotGeometry& geom) {
  reject_unknown_keys(j, "geometry",
                      {"wheel_radius", "half_length", "half_width",
                       "encoder_track", "encoder_offset", "wheel_speed_cap"});
  read_number(j, "wheel_radius", "geometry.", geom.wheel_radius);
  read_number(j, "half_length", "geometry.", geom.half_length);
  read_number(j, "half_width", "geometry.", geom.half_width);
  read_number(j, "encoder_track", "geometry.", geom.encoder_track);
  read_number(j, "encoder_offset", "geometry.", geom.encoder_offset);
  read_number(j, "wheel_speed_cap", "geometry.", geom.wheel_speed_cap);
}

void parse_noise(const json& j, NoiseScale& noise) {
  reject_unknown_keys(j, "noise",
                      {"q_position", "q_velocity", "r_position", "r_encoder",
                       "no_landmark_variance"});
  read_number(j, "q_position", "noise.", noise.q_position);
  read_number(j, "q_velocity", "noise.", noise.q_velocity);
  read_number(j, "r_position", "noise.", noise.r_position);
  read_number(j, "r_encoder", "noise.", noise.r_encoder);
  read_number(j, "no_landmark_variance", "noise.", noise.no_landmark_variance);
}

void parse_camera(const json& j, CameraModel& camera) {
  reject_unknown_keys(
      j, "camera", {"fov", "mount_offset", "visibility_margin", "max_range"});
  if (j.contains("fov")) {
    camera.fov = degrees_to_radians(as_number(j.at("fov"), "camera.fov"));
  }
  if (j.contains("mount_offset")) {
    camera.mount_offset =
        degrees_to_radians(as_number(j.at("mount_offset"),
                                     "camera.mount_offset"));
  }
  if (j.contains("visibility_margin")) {
    camera.visibility_margin = degrees_to_radians(
        as_number(j.at("visibility_margin"), "camera.visibility_margin"));
  }
  if (j.contains("max_range")) {
    const json& v = j.at("max_range");
    if (v.is_null()) {
      camera.max_range.reset();
    } else {
      camera.max_range = as_number(v, "camera.max_range");
    }
  }
}

void parse_field(const json& j, Field& field, bool& explicit_landmarks) {
  reject_unknown_keys(j, "field", {"width", "height", "landmarks"});
  read_number(j, "width", "field.", field.width);
  read_number(j, "height", "field.", field.height);
  if (j.contains("landmarks")) {
    const json& arr = j.at("landmarks");
    if (!arr.is_array()) fail("\"field.landmarks\" must be an array");
    explicit_landmarks = true;
    field.landmarks.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "field.landmarks[" + std::to_string(i) + "]";
      const json& item = arr[i];
      if (!item.is_object()) fail("\"" + path + "\" must be an object");
      reject_unknown_keys(item, path, {"id", "x", "y", "facing"});
      Landmark lm;
      lm.id = item.contains("id") ? as_integer(item.at("id"), path + ".id")
                                  : static_cast<int>(i);
      if (!item.contains("x") || !item.contains("y")) {
        fail("\"" + path + "\" requires x and y");
      }
      lm.x = as_number(item.at("x"), path + ".x");
      lm.y = as_number(item.at("y"), path + ".y");
      if (item.contains("facing")) {
        lm.facing =
            degrees_to_radians(as_number(item.at("facing"), path + ".facing"));
      }
      field.landmarks.push_back(lm);
    }
  }
}

void parse_clock(const json& j, SimClock& clock) {
  reject_unknown_keys(j, "clock", {"truth_dt", "filter_dt"});
  read_number(j, "truth_dt", "clock.", clock.truth_dt);
  read_number(j, "filter_dt", "clock.", clock.filter_dt);
}

void parse_path(const json& j, Path& path, bool& explicit_path) {
  explicit_path = true;
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "figure7") {
      path = figure7_path();
    } else if (name == "cycle") {
      path = cycle_path();
    } else {
      fail("\"path\" must be \"figure7\", \"cycle\", or a waypoint array");
    }
    return;
  }
  if (!j.is_array()) {
    fail("\"path\" must be \"figure7\", \"cycle\", or a waypoint array");
  }
  path.waypoints.clear();
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string item_path = "path[" + std::to_string(i) + "]";
    const json& item = j[i];
    if (!item.is_object()) fail("\"" + item_path + "\" must be an object");
    reject_unknown_keys(item, item_path, {"x", "y", "heading"});
    if (!item.contains("x") || !item.contains("y")) {
      fail("\"" + item_path + "\" requires x and y");
    }
    Waypoint w;
    w.x = as_number(item.at("x"), item_path + ".x");
    w.y = as_number(item.at("y"), item_path + ".y");
    if (item.contains("heading") && !item.at("heading").is_null()) {
      w.heading = degrees_to_radians(
          as_number(item.at("heading"), item_path + ".heading"));
    }
    path.waypoints.push_back(w);
  }
}

void parse_pid(const json& j, const std::string& path, PidGains& gains) {
  reject_unknown_keys(j, path, {"p", "i", "d"});
  read_number(j, "p", path + ".", gains.p);
  read_number(j, "i", path + ".", gains.i);
  read_number(j, "d", path + ".", gains.d);
}

void parse_gains(const json& j, ScenarioConfig& scenario) {
  reject_unknown_keys(j, "gains", {"x", "y", "heading", "integral_limit"});
  if (j.contains("x")) parse_pid(j.at("x"), "gains.x", scenario.x_gains);
  if (j.contains("y")) parse_pid(j.at("y"), "gains.y", scenario.y_gains);
  if (j.contains("heading")) {
    parse_pid(j.at("heading"), "gains.heading", scenario.heading_gains);
  }
  if (j.contains("integral_limit")) {
    const double limit =
        as_number(j.at("integral_limit"), "gains.integral_limit");
    scenario.x_gains.integral_limit = limit;
    scenario.y_gains.integral_limit = limit;
    scenario.heading_gains.integral_limit = limit;
  }
}

void parse_pursuit(const json& j, PursuitConfig& pursuit) {
  reject_unknown_keys(j, "pursuit", {"lookahead_radius", "advance_tolerance"});
  read_number(j, "lookahead_radius", "pursuit.", pursuit.lookahead_radius);
  read_number(j, "advance_tolerance", "pursuit.", pursuit.advance_tolerance);
}

}  // namespace

RunConfig default_config() {
  RunConfig config;
  config.scenario.path = figure7_path();
  config.scenario.field.landmarks = standard_landmarks();
  return config;
}

RunConfig parse_config(const std::string& text,
                       const std::string& source_name) {
  // Whitespace-only input means "all defaults".
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    return default_config();
  }

  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    fail(source_name + ": parse error at line " + std::to_string(line) +
         ", column " + std::to_string(column) + ": " + e.what());
  }
  if (!root.is_object()) fail(source_name + ": top level must be an object");

  RunConfig config = default_config();
  try {
    reject_unknown_keys(root, "",
                        {"geometry", "noise", "camera", "field", "clock",
                         "path", "gains", "pursuit", "initial_covariance",
                         "start_heading", "time_limit", "laps", "seed",
                         "output_dir"});
    if (root.contains("geometry")) {
      parse_geometry(root.at("geometry"), config.scenario.geometry);
    }
    if (root.contains("noise")) {
      parse_noise(root.at("noise"), config.scenario.noise);
    }
    if (root.contains("camera")) {
      parse_camera(root.at("camera"), config.scenario.camera);
    }
    if (root.contains("field")) {
      parse_field(root.at("field"), config.scenario.field,
                  config.explicit_landmarks);
    }
    if (root.contains("clock")) {
      parse_clock(root.at("clock"), config.scenario.clock);
    }
    if (root.contains("path")) {
      parse_path(root.at("path"), config.scenario.path, config.explicit_path);
    }
    if (root.contains("gains")) parse_gains(root.at("gains"), config.scenario);
    if (root.contains("pursuit")) {
      parse_pursuit(root.at("pursuit"), config.scenario.pursuit);
    }
    if (root.contains("initial_covariance")) {
      const json& arr = root.at("initial_covariance");
      if (!arr.is_array() || arr.size() != 6) {
        fail("\"initial_covariance\" must be an array of 6 numbers");
      }
      Vec6 diag;
      for (int i = 0; i < 6; ++i) {
        diag(i) = as_number(arr[i],
                            "initial_covariance[" + std::to_string(i) + "]");
      }
      config.scenario.initial_covariance = diag;
    }
    if (root.contains("start_heading")) {
      config.scenario.start_heading = degrees_to_radians(
          as_number(root.at("start_heading"), "start_heading"));
    }
    if (root.contains("time_limit")) {
      config.scenario.time_limit =
          as_number(root.at("time_limit"), "time_limit");
    }
    if (root.contains("laps")) {
      config.scenario.laps = as_integer(root.at("laps"), "laps");
    }
    if (root.contains("seed")) config.seed = as_seed(root.at("seed"), "seed");
    if (root.contains("output_dir")) {
      if (!root.at("output_dir").is_string()) {
        fail("\"output_dir\" must be a string");
      }
      config.output_dir = root.at("output_dir").get<std::string>();
    }
  } catch (const json::exception& e) {
    fail(source_name + ": " + e.what());
  }

  try {
    config.validate();
  } catch (const std::exception& e) {
    fail(source_name + ": " + e.what());
  }
  return config;
}

RunConfig load_config(const std::string& file_path) {
  std::ifstream in(file_path, std::ios::binary);
  if (!in) fail("cannot open config file \"" + file_path + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), file_path);
}

std::string render_config(const RunConfig& config) {
  const ScenarioConfig& s = config.scenario;
  json root;
  root["geometry"] = {{"wheel_radius", s.geometry.wheel_radius},
                      {"half_length", s.geometry.half_length},
                      {"half_width", s.geometry.half_width},
                      {"encoder_track", s.geometry.encoder_track},
                      {"encoder_offset", s.geometry.encoder_offset},
                      {"wheel_speed_cap", s.geometry.wheel_speed_cap}};
  root["noise"] = {{"q_position", s.noise.q_position},
                   {"q_velocity", s.noise.q_velocity},
                   {"r_position", s.noise.r_position},
                   {"r_encoder", s.noise.r_encoder},
                   {"no_landmark_variance", s.noise.no_landmark_variance}};
  root["camera"] = {
      {"fov", radians_to_degrees(s.camera.fov)},
      {"mount_offset", radians_to_degrees(s.camera.mount_offset)},
      {"visibility_margin", radians_to_degrees(s.camera.visibility_margin)},
      {"max_range",
       s.camera.max_range ? json(*s.camera.max_range) : json(nullptr)}};
  json landmarks = json::array();
  for (const Landmark& lm : s.field.landmarks) {
    landmarks.push_back({{"id", lm.id},
                         {"x", lm.x},
                         {"y", lm.y},
                         {"facing", radians_to_degrees(lm.facing)}});
  }
  root["field"] = {{"width", s.field.width},
                   {"height", s.field.height},
                   {"landmarks", landmarks}};
  root["clock"] = {{"truth_dt", s.clock.truth_dt},
                   {"filter_dt", s.clock.filter_dt}};
  json waypoints = json::array();
  for (const Waypoint& w : s.path.waypoints) {
    waypoints.push_back(
        {{"x", w.x},
         {"y", w.y},
         {"heading",
          w.heading ? json(radians_to_degrees(*w.heading)) : json(nullptr)}});
  }
  root["path"] = waypoints;
  root["gains"] = {
      {"x", {{"p", s.x_gains.p}, {"i", s.x_gains.i}, {"d", s.x_gains.d}}},
      {"y", {{"p", s.y_gains.p}, {"i", s.y_gains.i}, {"d", s.y_gains.d}}},
      {"heading",
       {{"p", s.heading_gains.p},
        {"i", s.heading_gains.i},
        {"d", s.heading_gains.d}}},
      {"integral_limit", s.x_gains.integral_limit}};
  root["pursuit"] = {{"lookahead_radius", s.pursuit.lookahead_radius},
                     {"advance_tolerance", s.pursuit.advance_tolerance}};
  const Vec6 p0 = s.resolved_initial_covariance();
  root["initial_covariance"] = {p0(0), p0(1), p0(2), p0(3), p0(4), p0(5)};
  root["start_heading"] = radians_to_degrees(s.resolved_start_heading());
  root["time_limit"] = s.time_limit;
  root["laps"] = s.laps;
  root["seed"] = config.seed;
  root["output_dir"] = config.output_dir;
  return root.dump(2) + "\n";
}

}  // namespace mecanav
