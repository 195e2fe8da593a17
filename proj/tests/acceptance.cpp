// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers as
// arguments to run a subset, e.g. `acceptance 1 3`.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "checks.hpp"
#include "diffeo_support.hpp"
#include "scenes.hpp"
#include "semnav/implicit.hpp"
#include "semnav/sim.hpp"
#include "semnav/world.hpp"
#include "support.hpp"

using namespace semnav;
using namespace diffeo_support;
using oracle::P;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Scenario bundled(const std::string& name) { return load_scenario(oracle::source_dir() + "/scenarios/" + name + ".json"); }

// Random scenes that pass validation, shared by criteria 1 and 2.
std::vector<Scenario> random_scenes(int n) {
  std::vector<Scenario> out;
  for (unsigned seed = 1; static_cast<int>(out.size()) < n && seed < 200; ++seed) {
    Scenario s = scenes::build(scenes::random_spec(seed));
    if (validate_scenario(s).empty()) out.push_back(std::move(s));
  }
  return out;
}

// Every episode run by criteria 4 and 5, for the cross-episode checks.
struct Logged {
  std::string label;
  RobotType type;
  Trajectory t;
};
std::vector<Logged> g_episodes;

Result diffeo_validity() {
  const auto t0 = Clock::now();
  const auto worlds = random_scenes(10);
  double min_det = 1e300, worst_j = 0, worst_h = 0;
  long samples = 0, in_collar = 0, fd_checked = 0, not_identity = 0;
  for (std::size_t w = 0; w < worlds.size(); ++w) {
    const Scenario& s = worlds[w];
    const auto full = instantiate_all(s);
    const auto& snap = full.snap;
    std::mt19937 rng(1000 + w);
    std::uniform_real_distribution<double> U(0.0, 10.0), Uu(0, 1);
    std::uniform_int_distribution<std::size_t> pick(0, snap.steps.size() - 1);
    int n = 0;
    while (n < 10000) {
      Point2 x(U(rng), U(rng));
      if (n % 2 && !snap.steps.empty()) {
        const auto& st = snap.steps[pick(rng)];
        x = Point2(st.lo.x() + Uu(rng) * (st.hi.x() - st.lo.x()), st.lo.y() + Uu(rng) * (st.hi.y() - st.lo.y()));
      }
      if (point_in_polygon(x, s.enclosing_freespace, 0.0) != Location::kInside) continue;
      if (in_mapped_obstacle(snap, x) || vertex_distance(snap, x) < 1e-3) continue;
      ++n;
      if (!in_any_collar(snap, x)) {
        not_identity += diffeo_eval(snap, x) != x;
        continue;
      }
      ++in_collar;
      const auto d = diffeo_jacobian(snap, x, true);
      min_det = std::min(min_det, d.J.determinant());
      bool near_boundary = false;
      for (const auto& o : snap.obstacles) near_boundary |= oracle::boundary_dist(x, o.vertices()) < 1e-3;
      if (near_boundary) continue;
      ++fd_checked;
      const Mat2 F = fd_jacobian(snap, x);
      const auto F2 = fd_second(snap, x);
      for (int m = 0; m < 2; ++m)
        for (int l = 0; l < 2; ++l) {
          worst_j = std::max(worst_j, rel(d.J(m, l), F(m, l)));
          for (int k = 0; k < 2; ++k) worst_h = std::max(worst_h, rel(d.dJ[k](m, l), F2[k](m, l)));
        }
    }
    samples += n;
  }
  const double secs = since(t0);
  std::ostringstream os;
  os << worlds.size() << " scenes, " << samples << " samples (" << in_collar << " in collars, " << fd_checked
     << " FD-checked), min det " << min_det << ", worst J rel " << worst_j << ", worst d2 rel " << worst_h
     << ", non-identity outside collars " << not_identity << ", " << fmt("%.1f s", secs);
  return {worlds.size() >= 10 && min_det > 0 && worst_j < 1e-5 && worst_h < 1e-4 && not_identity == 0 && secs < 60,
          os.str()};
}

Result boundary_preservation() {
  const auto worlds = random_scenes(10);
  double worst_d = 0, worst_b = 0;
  int nd = 0, nb = 0;
  for (const auto& s : worlds) {
    const auto full = instantiate_all(s);
    for (std::size_t ci = 0; ci < full.mapped.components.size(); ++ci) {
      const auto& comp = full.mapped.components[ci];
      const auto& v = comp.geometry.vertices();
      const ModelDisk* disk = nullptr;
      for (const auto& d : full.snap.model_disks)
        if (d.component == static_cast<int>(ci)) disk = &d;
      for (std::size_t i = 0; i < v.size(); ++i)
        for (int k = 0; k < 50; ++k) {
          const Point2 y = raw_eval(full.snap, v[i] + (k / 50.0) * (v[(i + 1) % v.size()] - v[i]));
          if (disk) {
            worst_d = std::max(worst_d, std::abs((y - disk->center).norm() - disk->radius));
            ++nd;
          } else {
            worst_b = std::max(worst_b, oracle::boundary_dist(y, full.mapped.enclosing_freespace.vertices()));
            ++nb;
          }
        }
    }
  }
  std::ostringstream os;
  os << nd << " disk-type samples, worst " << worst_d << "; " << nb << " wall-type samples, worst " << worst_b;
  return {nd > 0 && nb > 0 && worst_d < 1e-6 && worst_b < 1e-6, os.str()};
}

Result r_functions() {
  std::mt19937 rng(77);
  int polys = 0, disagreements = 0, band = 0;
  double worst = 0;
  std::vector<double> errs;
  for (int k = 0; k < 20; ++k) {
    const auto v = oracle::star_polygon(rng, 4 + k % 9, P(0, 0), 0.35, 1.2);
    double diam = 0;
    for (const auto& a : v)
      for (const auto& b : v) diam = std::max(diam, (a - b).norm());
    const auto t = build_polygon_implicit(Polygon(v), 20);
    std::uniform_real_distribution<double> U(-1.2 - diam, 1.2 + diam);
    for (int i = 0; i < 10000; ++i) {
      const P q(U(rng), U(rng));
      const double d = oracle::boundary_dist(q, v);
      if (d < 1e-6 * diam) continue;
      const double f = implicit_eval(t, q);
      disagreements += (f < 0) != oracle::inside(q, v);
      if (!oracle::inside(q, v) && d >= 0.01 * diam && d <= diam) {
        errs.push_back(std::abs(f - d) / d);
        worst = std::max(worst, errs.back());
        ++band;
      }
    }
    ++polys;
  }
  std::ostringstream os;
  os << polys << " polygons x 1e4 points, sign disagreements " << disagreements << "; p=20 distance error over "
     << band << " band points, worst " << fmt("%.1f%%", 100 * worst);
  if (!errs.empty()) {
    std::nth_element(errs.begin(), errs.begin() + errs.size() / 2, errs.end());
    os << ", median " << fmt("%.1f%%", 100 * errs[errs.size() / 2]);
  }
  return {disagreements == 0 && worst < 0.1, os.str()};
}

Result comparison() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream os;
  for (const std::string name : {"comparison_flat", "comparison_u", "comparison_pair"}) {
    const Scenario s = bundled(name);
    ok &= s.robot.radius == 0.2 && s.diffeo.mu_gamma == 4.0 && s.diffeo.mu_delta == 0.05 && s.diffeo.eps_gamma == 2.0;
    RunOptions opt;
    opt.robot = s.robot.type;
    EpisodeConfig cfg = s.episode;
    const StartPose start{s.robot.start, s.robot.start_psi};
    cfg.controller = ControllerKind::kBaseline;
    Trajectory base = run_episode(s, start, cfg, opt);
    cfg.controller = ControllerKind::kOurs;
    Trajectory ours = run_episode(s, start, cfg, opt);
    const bool base_stuck = base.outcome == Outcome::kTimeout || base.outcome == Outcome::kStalled;
    const bool ours_ok = ours.outcome == Outcome::kConverged && ours.min_clearance > 0;
    ok &= base_stuck && ours_ok;
    os << name << ": baseline " << outcome_name(base.outcome) << ", ours " << outcome_name(ours.outcome)
       << fmt(" (clearance %.3f); ", ours.min_clearance);
    g_episodes.push_back({name + " baseline", opt.robot, std::move(base)});
    g_episodes.push_back({name + " ours", opt.robot, std::move(ours)});
  }
  const double secs = since(t0);
  os << fmt("%.1f s", secs);
  return {ok && secs < 120, os.str()};
}

Result reruns() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream os;
  const int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  for (const std::string name : {"merge_rect", "merge_u", "cluttered", "mixed"}) {
    const Scenario s = bundled(name);
    const bool tuned = (s.diffeo.mu_gamma == 2.0 && s.diffeo.eps_gamma == 1.0) ||
                       (s.diffeo.mu_gamma == 1.6 && s.diffeo.eps_gamma == 0.8);
    ok &= s.robot.radius == 0.25 && s.diffeo.mu_delta == 0.05 && tuned;
    std::vector<StartPose> starts;
    for (int n = 5; starts.size() < 20; ++n) starts = start_grid(s, n, n, 0.05);
    for (RobotType type : {RobotType::kFullyActuated, RobotType::kDiffDrive}) {
      RunOptions opt;
      opt.robot = type;
      auto batch = run_batch(s, starts, s.episode, opt, threads);
      int converged = 0, unsafe = 0, rising = 0;
      double worst_rise = 0;
      for (auto& t : batch.trajectories) {
        converged += t.outcome == Outcome::kConverged;
        unsafe += !checks::safety(t).empty();
        double w = 0;
        rising += !checks::lyapunov(t, &w).empty();
        worst_rise = std::max(worst_rise, w);
        g_episodes.push_back({name, type, std::move(t)});
      }
      const int n = static_cast<int>(starts.size());
      ok &= converged == n && unsafe == 0 && rising == 0;
      os << name << (type == RobotType::kFullyActuated ? " fa " : " dd ") << converged << "/" << n;
      if (unsafe) os << " unsafe " << unsafe;
      if (rising) os << " V-rise " << rising << fmt(" (worst %.1e)", worst_rise);
      os << "; ";
    }
  }
  const double secs = since(t0);
  os << fmt("%.1f s", secs);
  return {ok && secs < 600, os.str()};
}

Result hybrid_consistency() {
  if (g_episodes.empty()) return {false, "needs criteria 4 and 5 in the same run"};
  int bad = 0, events = 0;
  std::string first;
  for (const auto& e : g_episodes) {
    events += static_cast<int>(e.t.events.size());
    std::string why = checks::hybrid(e.t);
    if (why.empty()) why = checks::timestamps(e.t);
    if (!why.empty()) {
      ++bad;
      if (first.empty()) first = e.label + ": " + why;
    }
  }
  std::ostringstream os;
  os << g_episodes.size() << " episodes, " << events << " transitions, " << bad << " inconsistent";
  if (!first.empty()) os << " (" << first << ")";
  return {bad == 0, os.str()};
}

Result bounded_inputs() {
  if (g_episodes.empty()) return {false, "needs criteria 4 and 5 in the same run"};
  int bad = 0;
  long cmds = 0;
  std::string first;
  for (const auto& e : g_episodes) {
    cmds += static_cast<long>(e.t.samples.size());
    const std::string why = checks::bounds(e.t, e.type, 0.4);
    if (!why.empty()) {
      ++bad;
      if (first.empty()) first = e.label + ": " + why;
    }
  }
  std::ostringstream os;
  os << cmds << " commands in " << g_episodes.size() << " episodes, " << bad << " episodes out of bounds";
  if (!first.empty()) os << " (" << first << ")";
  return {bad == 0, os.str()};
}

Result latency() {
  std::vector<double> all;
  std::ostringstream os;
  bool ok = true;
  for (const std::string name : {"merge_rect", "cluttered", "mixed"}) {
    const Scenario s = bundled(name);
    const std::size_t obstacles = instantiate_all(s).mapped.components.size();
    for (RobotType type : {RobotType::kFullyActuated, RobotType::kDiffDrive}) {
      RunOptions opt;
      opt.robot = type;
      opt.record_latency = true;
      const auto t = run_episode(s, {s.robot.start, s.robot.start_psi}, s.episode, opt);
      all.insert(all.end(), t.step_seconds.begin(), t.step_seconds.end());
    }
    ok &= obstacles <= 10;
    os << name << " (" << obstacles << " consolidated); ";
  }
  if (all.empty()) return {false, "no steps timed"};
  std::nth_element(all.begin(), all.begin() + all.size() / 2, all.end());
  const double median = all[all.size() / 2];
  os << all.size() << " steps, median " << fmt("%.3f ms", 1e3 * median);
  return {ok && median < 0.1, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"diffeomorphism validity", diffeo_validity}, {"boundary preservation", boundary_preservation},
      {"R-function correctness", r_functions},      {"comparison worlds", comparison},
      {"merge and mixed reruns", reruns},           {"hybrid consistency", hybrid_consistency},
      {"bounded inputs", bounded_inputs},           {"planner-step latency", latency}};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failed += !r.pass;
    std::printf("criterion %d %s: %s -- %s\n", id, r.pass ? "PASS" : "FAIL", criteria[i].first, r.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
