#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <regex>

#include "CLI11.hpp"
#include "json.hpp"
#include "semnav/errors.hpp"
#include "semnav/render.hpp"
#include "semnav/sim.hpp"
#include "semnav/world.hpp"

namespace fs = std::filesystem;
using namespace semnav;

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailed = 2;
constexpr int kEpisodeFailed = 3;
constexpr int kParseFailed = 4;

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorCode::kValidation, "cannot write " + p.string());
  out << text;
}

// "scenario" | "grid:NxM" | "x,y[,psi];x,y[,psi];..."
std::vector<StartPose> parse_starts(const std::string& spec, const Scenario& s) {
  if (spec.empty() || spec == "scenario") {
    if (!s.starts.empty()) return s.starts;
    return {StartPose{s.robot.start, s.robot.start_psi}};
  }
  std::smatch m;
  if (std::regex_match(spec, m, std::regex(R"(grid:(\d+)x(\d+))"))) {
    const int nx = std::stoi(m[1]), ny = std::stoi(m[2]);
    return start_grid(s, nx, ny, 0.05);
  }
  std::vector<StartPose> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ';')) {
    std::vector<double> v;
    std::stringstream is(item);
    std::string num;
    while (std::getline(is, num, ',')) v.push_back(std::stod(num));
    if (v.size() != 2 && v.size() != 3) throw Error(ErrorCode::kParseError, "bad start '" + item + "'");
    out.push_back({Point2(v[0], v[1]), v.size() == 3 ? v[2] : 0.0});
  }
  return out;
}

int cmd_check(const std::string& file) {
  const Scenario s = load_scenario(file);
  const auto issues = validate_scenario(s);
  for (const auto& i : issues) std::cout << i.kind << ": " << i.detail << '\n';
  std::cout << "familiar obstacles: " << s.familiar.size() << ", unknown obstacles: " << s.unknown.size() << '\n';
  std::cout << "note: freespace path-connectivity is assumed, not verified\n";
  if (!issues.empty()) {
    std::cout << issues.size() << " issue(s)\n";
    return kValidationFailed;
  }
  std::cout << "ok\n";
  return kOk;
}

struct SimulateArgs {
  std::string file;
  std::string robot;
  std::string controller = "ours";
  std::string starts = "scenario";
  std::string out = "out";
  bool svg = false;
  int threads = 0;
};

int cmd_simulate(const SimulateArgs& a) {
  Scenario s = load_scenario(a.file);
  const auto issues = validate_scenario(s);
  if (!issues.empty()) {
    for (const auto& i : issues) std::cerr << i.kind << ": " << i.detail << '\n';
    return kValidationFailed;
  }
  RunOptions opt;
  opt.robot = s.robot.type;
  if (a.robot == "fa") opt.robot = RobotType::kFullyActuated;
  else if (a.robot == "dd") opt.robot = RobotType::kDiffDrive;
  EpisodeConfig cfg = s.episode;
  cfg.controller = a.controller == "baseline" ? ControllerKind::kBaseline : ControllerKind::kOurs;
  const auto starts = parse_starts(a.starts, s);

  const BatchSummary sum = run_batch(s, starts, cfg, opt, a.threads);
  fs::create_directories(a.out);
  nlohmann::json report;
  report["scenario"] = s.name;
  report["robot"] = opt.robot == RobotType::kFullyActuated ? "fa" : "dd";
  report["controller"] = a.controller;
  report["success_rate"] = sum.success_rate;
  report["min_clearance"] = sum.min_clearance;
  report["mean_path_length"] = sum.mean_path_length;
  bool all_ok = true;
  for (std::size_t i = 0; i < sum.trajectories.size(); ++i) {
    const auto& t = sum.trajectories[i];
    char tag[16];
    std::snprintf(tag, sizeof tag, "%03zu", i);
    write_file(fs::path(a.out) / ("trajectory_" + std::string(tag) + ".csv"), trajectory_csv(t));
    write_file(fs::path(a.out) / ("events_" + std::string(tag) + ".csv"), events_csv(t));
    nlohmann::json ep;
    ep["start"] = {starts[i].x.x(), starts[i].x.y(), starts[i].psi};
    ep["outcome"] = outcome_name(t.outcome);
    if (!t.reason.empty()) ep["reason"] = t.reason;
    ep["time"] = t.samples.empty() ? 0.0 : t.samples.back().t;
    ep["path_length"] = t.path_length;
    ep["min_clearance"] = t.min_clearance;
    ep["events"] = t.events.size();
    report["episodes"].push_back(ep);
    all_ok = all_ok && t.outcome == Outcome::kConverged;
    std::cout << tag << ' ' << outcome_name(t.outcome) << (t.reason.empty() ? "" : " (" + t.reason + ")") << '\n';
  }
  write_file(fs::path(a.out) / "summary.json", report.dump(2) + "\n");
  if (a.svg) {
    std::vector<const Trajectory*> ptrs;
    for (const auto& t : sum.trajectories) ptrs.push_back(&t);
    std::optional<FullMap> full;
    try {
      full = instantiate_all(s);
    } catch (const Error&) {
    }
    write_file(fs::path(a.out) / "world.svg",
               render_world_svg(s, ptrs, full ? &full->mapped : nullptr, full ? &full->snap : nullptr));
  }
  std::cout << "success rate " << sum.success_rate << '\n';
  return all_ok ? kOk : kEpisodeFailed;
}

int cmd_inspect(const std::string& file, int grid, const std::string& out) {
  const Scenario s = load_scenario(file);
  const FullMap full = instantiate_all(s);
  const auto samples = diffeo_grid(s, full.snap, grid);
  fs::create_directories(out);
  std::ostringstream csv;
  csv << std::setprecision(17) << "x,y,detJ,phi_x,phi_y\n";
  double min_det = std::numeric_limits<double>::infinity();
  for (const auto& g : samples) {
    csv << g.x.x() << ',' << g.x.y() << ',' << g.det << ',' << g.phi.x() << ',' << g.phi.y() << '\n';
    if (std::isfinite(g.det)) min_det = std::min(min_det, g.det);
  }
  write_file(fs::path(out) / "diffeo_grid.csv", csv.str());
  write_file(fs::path(out) / "logdet.svg", render_logdet_svg(s, samples, grid));
  std::cout << "steps " << full.snap.steps.size() << ", min det " << min_det << '\n';
  return min_det > 0 ? kOk : kValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reactive navigation among partially familiar polygonal obstacles"};
  app.require_subcommand(1);

  std::string check_file;
  auto* check = app.add_subcommand("check", "validate a scenario file");
  check->add_option("file", check_file)->required();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "run episodes and write trajectories");
  simulate->add_option("file", sim.file)->required();
  simulate->add_option("--robot", sim.robot, "fa or dd (default: scenario)")->check(CLI::IsMember({"fa", "dd"}));
  simulate->add_option("--controller", sim.controller)->check(CLI::IsMember({"ours", "baseline"}));
  simulate->add_option("--starts", sim.starts, "scenario | grid:NxM | x,y,psi;...");
  simulate->add_option("--out", sim.out);
  simulate->add_flag("--svg", sim.svg);
  simulate->add_option("--threads", sim.threads);

  std::string inspect_file, inspect_out = "out";
  int grid = 64;
  auto* inspect = app.add_subcommand("inspect-diffeo", "sample det(D Phi) over a grid with every obstacle known");
  inspect->add_option("file", inspect_file)->required();
  inspect->add_option("--grid", grid)->check(CLI::Range(8, 4096));
  inspect->add_option("--out", inspect_out);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*check) return cmd_check(check_file);
    if (*simulate) return cmd_simulate(sim);
    if (*inspect) return cmd_inspect(inspect_file, grid, inspect_out);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == ErrorCode::kParseError ? kParseFailed : kValidationFailed;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kParseFailed;
  }
  return kOk;
}
