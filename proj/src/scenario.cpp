#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "semnav/errors.hpp"
#include "semnav/world.hpp"

namespace semnav {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kParseError, "field " + path + ": " + what);
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) field_error(path, "not finite");
  return v;
}

double num_or(const json& obj, const char* key, double fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  return num(obj.at(key), path + "/" + key);
}

Point2 point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) field_error(path, "expected [x, y]");
  return {num(j[0], path + "/0"), num(j[1], path + "/1")};
}

std::vector<Point2> point_list(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() < 3) field_error(path, "expected a list of at least 3 points");
  std::vector<Point2> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(point(j[i], path + "/" + std::to_string(i)));
  return out;
}

Polygon polygon(const json& j, const std::string& path) {
  try {
    return Polygon(point_list(j, path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) throw;
    field_error(path, e.what());
  }
}

StartPose pose3(const json& j, const std::string& path) {
  if (!j.is_array() || (j.size() != 3 && j.size() != 2)) field_error(path, "expected [x, y, psi]");
  StartPose s;
  s.x = {num(j[0], path + "/0"), num(j[1], path + "/1")};
  s.psi = j.size() == 3 ? num(j[2], path + "/2") : 0.0;
  return s;
}

const json& required(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) field_error(path, "expected an object");
  if (!obj.contains(key)) field_error(path + "/" + key, "missing");
  return obj.at(key);
}

std::string str(const json& j, const std::string& path) {
  if (!j.is_string()) field_error(path, "expected a string");
  return j.get<std::string>();
}

int line_of(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace

ConvexPolygon erode_convex(const ConvexPolygon& c, double r) {
  std::vector<Point2> out = c.vertices();
  const auto& v = c.vertices();
  for (std::size_t i = 0; i < v.size() && !out.empty(); ++i) {
    const Vec2 n = rot90(v[(i + 1) % v.size()] - v[i]).normalized();
    out = clip_convex(out, v[i] + r * n, n);
  }
  if (out.size() < 3) throw Error(ErrorCode::kValidation, "workspace is too small for the robot");
  return ConvexPolygon(out);
}

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) field_error("/", "expected an object");

  Scenario s;
  s.name = doc.contains("name") ? str(doc["name"], "/name") : "scenario";
  s.epsilon = num_or(doc, "epsilon", geom_eps(), "");
  if (!(s.epsilon > 0)) field_error("/epsilon", "must be positive");
  // The environment variable wins over the file.
  if (doc.contains("epsilon") && std::getenv("SEMNAV_EPS") == nullptr) set_geom_eps(s.epsilon);
  s.workspace = polygon(required(doc, "workspace", ""), "/workspace");

  if (doc.contains("catalogue")) {
    const auto& cat = doc["catalogue"];
    if (!cat.is_object()) field_error("/catalogue", "expected an object");
    for (auto it = cat.begin(); it != cat.end(); ++it)
      s.catalogue.emplace(it.key(), polygon(it.value(), "/catalogue/" + it.key()));
  }
  if (doc.contains("familiar")) {
    const auto& fam = doc["familiar"];
    if (!fam.is_array()) field_error("/familiar", "expected a list");
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const std::string path = "/familiar/" + std::to_string(i);
      FamiliarPlacement f;
      f.cls = str(required(fam[i], "class", path), path + "/class");
      auto cit = s.catalogue.find(f.cls);
      if (cit == s.catalogue.end()) field_error(path + "/class", "unknown class '" + f.cls + "'");
      const auto p = pose3(required(fam[i], "pose", path), path + "/pose");
      f.pose = {p.x.x(), p.x.y(), p.psi};
      f.clearance = num_or(fam[i], "clearance", 0.3, path);
      if (!(f.clearance > 0)) field_error(path + "/clearance", "must be positive");
      f.geometry = transform(cit->second, f.pose);
      s.familiar.push_back(std::move(f));
    }
  }
  if (doc.contains("unknown")) {
    const auto& unk = doc["unknown"];
    if (!unk.is_array()) field_error("/unknown", "expected a list");
    for (std::size_t i = 0; i < unk.size(); ++i) {
      const std::string path = "/unknown/" + std::to_string(i);
      Polygon p = polygon(unk[i], path);
      if (!is_convex_ccw(p.vertices(), 0.0)) field_error(path, "unknown obstacles must be convex");
      s.unknown.push_back(std::move(p));
    }
  }

  const json& robot = required(doc, "robot", "");
  s.robot.radius = num_or(robot, "radius", 0.2, "/robot");
  if (!(s.robot.radius > 0)) field_error("/robot/radius", "must be positive");
  if (robot.contains("type")) {
    const std::string t = str(robot["type"], "/robot/type");
    if (t == "fa" || t == "fully_actuated") s.robot.type = RobotType::kFullyActuated;
    else if (t == "dd" || t == "diffdrive") s.robot.type = RobotType::kDiffDrive;
    else field_error("/robot/type", "expected fa or dd");
  }
  const auto start = pose3(required(robot, "start", "/robot"), "/robot/start");
  s.robot.start = start.x;
  s.robot.start_psi = start.psi;
  s.robot.goal = point(required(robot, "goal", "/robot"), "/robot/goal");

  if (doc.contains("sensor")) {
    const auto& sen = doc["sensor"];
    s.sensor.range = num_or(sen, "range", s.sensor.range, "/sensor");
    s.sensor.model_range = num_or(sen, "model_range", 0.8 * s.sensor.range, "/sensor");
    if (sen.contains("rays")) {
      if (!sen["rays"].is_number_integer()) field_error("/sensor/rays", "expected an integer");
      s.sensor.rays = sen["rays"].get<int>();
    }
  } else {
    s.sensor.model_range = 0.8 * s.sensor.range;
  }
  if (!(s.sensor.range > 0)) field_error("/sensor/range", "must be positive");
  if (!(s.sensor.model_range > 0 && s.sensor.model_range < s.sensor.range))
    field_error("/sensor/model_range", "must lie in (0, range)");
  if (s.sensor.rays < 8) field_error("/sensor/rays", "need at least 8 rays");

  if (doc.contains("controller")) {
    const auto& c = doc["controller"];
    auto& p = s.controller;
    p.k = num_or(c, "k", p.k, "/controller");
    p.k_v = num_or(c, "k_v", p.k_v, "/controller");
    p.k_omega = num_or(c, "k_omega", p.k_omega, "/controller");
    p.u_max = num_or(c, "u_max", p.u_max, "/controller");
    p.v_max = num_or(c, "v_max", p.v_max, "/controller");
    p.omega_max = num_or(c, "omega_max", p.omega_max, "/controller");
    p.lambda = num_or(c, "lambda", p.lambda, "/controller");
    p.eps_u = num_or(c, "eps_u", p.eps_u, "/controller");
  }
  if (doc.contains("diffeo")) {
    const auto& d = doc["diffeo"];
    s.diffeo.mu_gamma = num_or(d, "mu_gamma", s.diffeo.mu_gamma, "/diffeo");
    s.diffeo.mu_delta = num_or(d, "mu_delta", s.diffeo.mu_delta, "/diffeo");
    s.diffeo.eps_gamma = num_or(d, "eps_gamma", s.diffeo.eps_gamma, "/diffeo");
    if (d.contains("p")) {
      if (!d["p"].is_number_integer()) field_error("/diffeo/p", "expected an integer");
      s.obstacle_power = d["p"].get<int>();
      if (s.obstacle_power < 1) field_error("/diffeo/p", "must be >= 1");
    }
  }
  if (doc.contains("integrator")) {
    const auto& in = doc["integrator"];
    auto& e = s.episode;
    e.dt = num_or(in, "dt", e.dt, "/integrator");
    e.max_time = num_or(in, "max_time", e.max_time, "/integrator");
    e.goal_tolerance = num_or(in, "goal_tolerance", e.goal_tolerance, "/integrator");
    if (in.contains("method")) {
      const std::string m = str(in["method"], "/integrator/method");
      if (m == "rk4") e.integrator = Integrator::kRK4;
      else if (m == "euler") e.integrator = Integrator::kEuler;
      else field_error("/integrator/method", "expected rk4 or euler");
    }
  }
  if (doc.contains("starts")) {
    const auto& st = doc["starts"];
    if (!st.is_array()) field_error("/starts", "expected a list");
    for (std::size_t i = 0; i < st.size(); ++i) s.starts.push_back(pose3(st[i], "/starts/" + std::to_string(i)));
  }

  try {
    s.controller.validate();
  } catch (const Error& e) {
    field_error("/controller", e.what());
  }
  try {
    s.diffeo.validate();
  } catch (const Error& e) {
    field_error("/diffeo", e.what());
  }
  try {
    s.episode.validate();
  } catch (const Error& e) {
    field_error("/integrator", e.what());
  }
  finalize_scenario(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

void finalize_scenario(Scenario& s) {
  s.enclosing_workspace = convex_hull(s.workspace.vertices());
  s.enclosing_freespace = erode_convex(s.enclosing_workspace, s.robot.radius);
  if (s.enclosing_workspace.area() - s.workspace.area() <= geom_eps() * s.enclosing_workspace.area()) return;
  const auto pieces = boolean_op(BoolOp::kDifference, {s.enclosing_workspace}, {s.workspace});
  int k = 0;
  for (const auto& p : pieces) {
    FamiliarPlacement f;
    f.cls = "intrusion_" + std::to_string(k++);
    f.geometry = p;
    f.intrusion = true;
    s.catalogue.emplace(f.cls, p);
    s.familiar.push_back(std::move(f));
  }
}

}  // namespace semnav
