#include "semnav/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "semnav/errors.hpp"

namespace semnav {

void EpisodeConfig::validate() const {
  if (!(dt > 0)) throw Error(ErrorCode::kValidation, "dt must be positive");
  if (!(max_time > 0)) throw Error(ErrorCode::kValidation, "max_time must be positive");
  if (!(goal_tolerance > 0)) throw Error(ErrorCode::kValidation, "goal_tolerance must be positive");
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kConverged: return "converged";
    case Outcome::kTimeout: return "timeout";
    case Outcome::kStalled: return "stalled";
    case Outcome::kFailed: return "failed";
  }
  return "?";
}

namespace {

struct Deriv {
  Vec2 dx = Vec2::Zero();
  double dpsi = 0.0;
};

Deriv field(const RobotState& s, RobotType type, const Command& c) {
  if (type == RobotType::kFullyActuated) return {Vec2(c.a, c.b), 0.0};
  return {c.a * Vec2(std::cos(s.psi), std::sin(s.psi)), c.b};
}

RobotState advance(const RobotState& s, const Deriv& d, double h) { return {s.x + h * d.dx, s.psi + h * d.dpsi}; }

ModelObstacles obstacles_for(const std::vector<LidarHit>& hits, const DiffeoSnapshot& snap, bool all_hits, double r) {
  ModelObstacles o;
  o.disks = snap.model_disks;
  o.point_radius = r;
  for (const auto& h : hits)
    if (h.hit && (all_hits || !h.familiar)) o.points.push_back(h.point);
  return o;
}

class Episode {
 public:
  Episode(const Scenario& s, const RunOptions& opt, ControllerKind kind) : s_(s), opt_(opt), kind_(kind) {
    goal_model_ = s.robot.goal;
  }

  bool ours() const { return kind_ == ControllerKind::kOurs; }
  const std::vector<int>& mode() const { return semantic_.mode; }

  // Returns the event when a guard fires.
  std::optional<ModeEvent> update_mode(double t, const Point2& x) {
    if (!ours()) return std::nullopt;
    auto next = guard_check(semantic_.mode, x, s_);
    if (!next) return std::nullopt;
    ModeEvent ev{t, semantic_.mode, *next, x, x};
    semantic_ = instantiate(semantic_, *next, s_);
    mapped_ = mapped_space_recovery(semantic_, s_);
    snap_ = build_snapshot(mapped_.components, semantic_.mode, s_.diffeo);
    goal_model_ = diffeo_eval(snap_, s_.robot.goal);
    return ev;
  }

  double lyapunov(const Point2& x) const { return (diffeo_eval(snap_, x) - goal_model_).squaredNorm(); }
  Point2 model_point(const Point2& x) const { return diffeo_eval(snap_, x); }
  double goal_distance(const Point2& x) const { return (diffeo_eval(snap_, x) - goal_model_).norm(); }

  Command command(const RobotState& st) const {
    const auto hits = lidar_scan(s_, st.x);
    const auto obs = obstacles_for(hits, snap_, !ours(), s_.robot.radius);
    if (opt_.robot == RobotType::kFullyActuated) {
      const auto c = fully_actuated_input(st.x, snap_, goal_model_, obs, s_.sensor.model_range,
                                          s_.enclosing_freespace, s_.controller);
      return {c.u.x(), c.u.y()};
    }
    const auto c = diffdrive_inputs({st.x, st.psi}, snap_, goal_model_, obs, s_.sensor.model_range,
                                    s_.enclosing_freespace, s_.controller);
    return {c.v, c.omega};
  }

 private:
  const Scenario& s_;
  RunOptions opt_;
  ControllerKind kind_;
  SemanticMapState semantic_;
  MappedSpace mapped_;
  DiffeoSnapshot snap_;
  Point2 goal_model_;
};

}  // namespace

RobotState step(const RobotState& s, RobotType type, const Feedback& f, double dt, Integrator method) {
  auto eval = [&](const RobotState& q) { return field(q, type, f(q)); };
  RobotState out;
  if (method == Integrator::kEuler) {
    out = advance(s, eval(s), dt);
  } else {
    const Deriv k1 = eval(s);
    const Deriv k2 = eval(advance(s, k1, 0.5 * dt));
    const Deriv k3 = eval(advance(s, k2, 0.5 * dt));
    const Deriv k4 = eval(advance(s, k3, dt));
    out.x = s.x + dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    out.psi = s.psi + dt / 6.0 * (k1.dpsi + 2.0 * k2.dpsi + 2.0 * k3.dpsi + k4.dpsi);
  }
  out.psi = wrap_angle(out.psi);
  return out;
}

Trajectory run_episode(const Scenario& s, const StartPose& start, const EpisodeConfig& cfg, const RunOptions& opt) {
  cfg.validate();
  Trajectory tr;
  Episode ep(s, opt, cfg.controller);
  RobotState st{start.x, wrap_angle(start.psi)};
  tr.min_clearance = std::numeric_limits<double>::infinity();
  const long max_steps = static_cast<long>(std::ceil(cfg.max_time / cfg.dt));
  const long stall_steps = static_cast<long>(std::llround(opt.stall_time / cfg.dt));
  constexpr int kMaxHalvings = 24;
  constexpr int kMaxSubsteps = 20000;
  constexpr int kAccuracyHalvings = 14;
  constexpr double kErrTol = 1e-8;   // local model-space error relative to the goal distance
  constexpr double kErrFloor = 0.05;

  auto retryable = [](const Error& e) {
    return e.code() == ErrorCode::kEmptyCell || e.code() == ErrorCode::kOutOfDomain ||
           e.code() == ErrorCode::kSingularJacobian;
  };
  // One RK4/Euler step of size h from q whose first stage reuses c0.
  auto advance_from = [&](const RobotState& q, const Command& c0, double h) {
    bool first_stage = true;
    Feedback f = [&](const RobotState& z) {
      if (first_stage) {
        first_stage = false;
        return c0;
      }
      return ep.command(z);
    };
    return step(q, opt.robot, f, h, cfg.integrator);
  };
  struct Advanced {
    RobotState state;
    Command cmd;  // command at state
  };
  // Substep controller. A substep is retried at half size when it fails
  // (near purged vertices the switch reaches 1 only in a layer far thinner
  // than the sample step) or when one step and two half steps disagree in
  // the model space by more than the tolerance. Near corners the lifted
  // unicycle field varies on a ~1e-5 m scale and a plain 10 ms step is not
  // resolved there.
  auto advance_adaptive = [&](RobotState q, Command c, double dt) -> Advanced {
    const double h_min = std::ldexp(dt, -kMaxHalvings);
    const double h_acc = std::ldexp(dt, -kAccuracyHalvings);
    double left = dt, h = dt;
    for (int n = 0; left > 0; ++n) {
      h = std::min(h, left);
      try {
        const RobotState mid = advance_from(q, c, 0.5 * h);
        const RobotState z = advance_from(mid, ep.command(mid), 0.5 * h);
        double err = 0.0;
        if (h > h_acc) {
          const RobotState full = advance_from(q, c, h);
          const double scale = std::max(ep.goal_distance(q.x), kErrFloor);
          err = (ep.model_point(full.x) - ep.model_point(z.x)).norm() / (15.0 * scale);
          if (err > kErrTol) {
            h *= 0.5;
            continue;
          }
        }
        c = ep.command(z);
        q = z;
        left -= h;
        if (err < kErrTol / 32.0) h *= 2.0;
      } catch (const Error& e) {
        if (!retryable(e) || h <= h_min || n >= kMaxSubsteps) throw;
        h *= 0.5;
      }
    }
    return {q, c};
  };
  auto advance_checked = [&](const RobotState& q, const Command& c0) -> std::optional<Advanced> {
    try {
      return advance_adaptive(q, c0, cfg.dt);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyCell) throw;
    }
    return std::nullopt;
  };
  // The bounded law keeps its speed up to an obstacle boundary, so the cell
  // empties in finite time. Bisect back to that instant.
  auto locate_contact = [&](const RobotState& q, const Command& c0) {
    double lo = 0.0, hi = cfg.dt;
    for (int i = 0; i < 40; ++i) {
      const double mid = 0.5 * (lo + hi);
      try {
        ep.command(advance_from(q, c0, mid));
        lo = mid;
      } catch (const Error& e) {
        if (!retryable(e)) throw;
        hi = mid;
      }
    }
    return lo > 0 ? advance_from(q, c0, lo) : q;
  };

  std::optional<Command> pending;
  std::vector<double> turned;  // accumulated |heading change| per sample
  try {
    for (long k = 0;; ++k) {
      const double t = k * cfg.dt;
      if (auto ev = ep.update_mode(t, st.x)) {
        tr.events.push_back(std::move(*ev));
        pending.reset();
      }

      Sample smp;
      smp.t = t;
      smp.x = st.x;
      smp.psi = st.psi;
      smp.mode_size = static_cast<int>(ep.mode().size());
      smp.clearance = physical_clearance(s, st.x);
      tr.min_clearance = std::min(tr.min_clearance, smp.clearance);
      if (smp.clearance <= 0) {
        tr.samples.push_back(smp);
        throw Error(ErrorCode::kLeftFreespace, "robot left the freespace");
      }
      smp.V = ep.lyapunov(st.x);
      if ((st.x - s.robot.goal).norm() < cfg.goal_tolerance) {
        tr.samples.push_back(smp);
        tr.outcome = Outcome::kConverged;
        break;
      }

      try {
        smp.cmd = pending ? *pending : ep.command(st);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kEmptyCell) throw;
        tr.samples.push_back(smp);
        tr.outcome = Outcome::kStalled;
        tr.reason = std::string("emergency stop: ") + e.what();
        break;
      }
      if (opt.record_latency) {
        const auto t0 = std::chrono::steady_clock::now();
        ep.command(st);
        tr.step_seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      }
      tr.samples.push_back(smp);

      turned.push_back((turned.empty() ? 0.0 : turned.back()) +
                       (k > 0 ? std::abs(wrap_angle(st.psi - tr.samples[tr.samples.size() - 2].psi)) : 0.0));
      if (k >= stall_steps && stall_steps > 0) {
        const std::size_t j = tr.samples.size() - 1 - stall_steps;
        const double rotation = turned.back() - turned[j];
        // Turning in place is reorientation unless it completes a full turn.
        const bool spinning = rotation > 1e-3 && rotation < 2 * M_PI;
        if ((tr.samples[j].x - st.x).norm() < opt.stall_distance && !spinning) {
          tr.outcome = Outcome::kStalled;
          tr.reason = "no progress within the stall window";
          break;
        }
      }
      if (k >= max_steps) {
        tr.outcome = Outcome::kTimeout;
        break;
      }

      const auto next = advance_checked(st, smp.cmd);
      if (!next) {
        const RobotState c = locate_contact(st, smp.cmd);
        tr.path_length += (c.x - st.x).norm();
        Sample last;
        last.t = t + cfg.dt;
        last.x = c.x;
        last.psi = c.psi;
        last.mode_size = smp.mode_size;
        last.clearance = physical_clearance(s, c.x);
        last.V = ep.lyapunov(c.x);
        tr.min_clearance = std::min(tr.min_clearance, last.clearance);
        tr.samples.push_back(last);
        if (last.clearance <= 0) throw Error(ErrorCode::kLeftFreespace, "robot left the freespace");
        tr.outcome = Outcome::kStalled;
        tr.reason = "emergency stop: local freespace became empty";
        break;
      }
      tr.path_length += (next->state.x - st.x).norm();
      st = next->state;
      pending = next->cmd;
    }
  } catch (const Error& e) {
    tr.outcome = Outcome::kFailed;
    tr.reason = e.what();
  }
  return tr;
}

BatchSummary run_batch(const Scenario& s, const std::vector<StartPose>& starts, const EpisodeConfig& cfg,
                       const RunOptions& opt, int threads) {
  BatchSummary sum;
  sum.trajectories.resize(starts.size());
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min<int>(threads, static_cast<int>(std::max<std::size_t>(1, starts.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < starts.size(); i = next++) sum.trajectories[i] = run_episode(s, starts[i], cfg, opt);
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  if (starts.empty()) return sum;
  int ok = 0;
  double len = 0.0;
  sum.min_clearance = std::numeric_limits<double>::infinity();
  for (const auto& t : sum.trajectories) {
    ok += t.outcome == Outcome::kConverged;
    len += t.path_length;
    sum.min_clearance = std::min(sum.min_clearance, t.min_clearance);
  }
  sum.success_rate = static_cast<double>(ok) / starts.size();
  sum.mean_path_length = len / starts.size();
  return sum;
}

std::vector<StartPose> start_grid(const Scenario& s, int nx, int ny, double margin, double perturb) {
  const auto [lo, hi] = s.workspace.bbox();
  std::vector<StartPose> out;
  const Vec2 off = perturb * Vec2(1, 1).normalized();
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Point2 p(lo.x() + (i + 0.5) / nx * (hi.x() - lo.x()), lo.y() + (j + 0.5) / ny * (hi.y() - lo.y()));
      const Point2 q = p + off;
      if (point_in_polygon(q, s.workspace, 0.0) != Location::kInside) continue;
      if (physical_clearance(s, q) < margin) continue;
      if ((q - s.robot.goal).norm() < 0.5) continue;
      out.push_back({q, 0.0});
    }
  }
  return out;
}

std::string trajectory_csv(const Trajectory& t) {
  std::ostringstream os;
  os << std::setprecision(17) << "t,x,y,psi,cmd1,cmd2,mode_size,V\n";
  for (const auto& s : t.samples)
    os << s.t << ',' << s.x.x() << ',' << s.x.y() << ',' << s.psi << ',' << s.cmd.a << ',' << s.cmd.b << ','
       << s.mode_size << ',' << s.V << '\n';
  return os.str();
}

namespace {
std::string mode_str(const std::vector<int>& m) {
  std::string out;
  for (std::size_t i = 0; i < m.size(); ++i) out += (i ? ";" : "") + std::to_string(m[i]);
  return out;
}
}  // namespace

std::string events_csv(const Trajectory& t) {
  std::ostringstream os;
  os << std::setprecision(17) << "t,old_mode,new_mode\n";
  for (const auto& e : t.events) os << e.t << ',' << mode_str(e.old_mode) << ',' << mode_str(e.new_mode) << '\n';
  return os.str();
}

}  // namespace semnav
