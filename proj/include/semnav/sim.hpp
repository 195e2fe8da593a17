#pragma once

#include <functional>
#include <string>
#include <vector>

#include "semnav/control.hpp"
#include "semnav/world.hpp"

namespace semnav {

struct RobotState {
  Point2 x = Point2::Zero();
  double psi = 0.0;
};

struct Command {
  double a = 0.0;  // u_x or v
  double b = 0.0;  // u_y or omega
};

// One integration step with the closed-loop field re-evaluated at each stage.
using Feedback = std::function<Command(const RobotState&)>;
RobotState step(const RobotState& s, RobotType type, const Feedback& f, double dt, Integrator method);

struct Sample {
  double t = 0.0;
  Point2 x = Point2::Zero();
  double psi = 0.0;
  Command cmd;
  int mode_size = 0;
  double V = 0.0;
  double clearance = 0.0;
};

struct ModeEvent {
  double t = 0.0;
  std::vector<int> old_mode;
  std::vector<int> new_mode;
  Point2 x_before = Point2::Zero();
  Point2 x_after = Point2::Zero();
};

enum class Outcome { kConverged, kTimeout, kStalled, kFailed };
const char* outcome_name(Outcome o);

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<ModeEvent> events;
  Outcome outcome = Outcome::kTimeout;
  std::string reason;
  double min_clearance = 0.0;
  double path_length = 0.0;
  std::vector<double> step_seconds;  // wall time of each planner evaluation at sample times
};

struct RunOptions {
  RobotType robot = RobotType::kFullyActuated;
  double stall_time = 10.0;       // window for stall detection
  double stall_distance = 1e-3;   // minimum progress within the window
  bool record_latency = false;
};

Trajectory run_episode(const Scenario& s, const StartPose& start, const EpisodeConfig& cfg, const RunOptions& opt);

struct BatchSummary {
  double success_rate = 0.0;
  double min_clearance = 0.0;
  double mean_path_length = 0.0;
  std::vector<Trajectory> trajectories;
};

BatchSummary run_batch(const Scenario& s, const std::vector<StartPose>& starts, const EpisodeConfig& cfg,
                       const RunOptions& opt, int threads = 0);

// Grid of starts in the bounding box of the workspace, keeping those with at
// least `margin` clearance. Each is offset by `perturb` along (1, 1)/sqrt(2).
std::vector<StartPose> start_grid(const Scenario& s, int nx, int ny, double margin, double perturb = 1e-3);

std::string trajectory_csv(const Trajectory& t);
std::string events_csv(const Trajectory& t);

}  // namespace semnav
