#pragma once

namespace semnav {

struct ControllerParams {
  double k = 0.4;
  double k_v = 0.4;
  double k_omega = 0.4;
  double u_max = 0.4;
  double v_max = 0.4;
  double omega_max = 0.4;
  double lambda = 0.5;
  double eps_u = 1e-8;
  int lf_sides = 32;
  void validate() const;
};

enum class Integrator { kRK4, kEuler };
enum class ControllerKind { kOurs, kBaseline };
enum class RobotType { kFullyActuated, kDiffDrive };

struct EpisodeConfig {
  double dt = 0.01;
  double max_time = 120.0;
  double goal_tolerance = 0.05;
  Integrator integrator = Integrator::kRK4;
  ControllerKind controller = ControllerKind::kOurs;
  void validate() const;
};

}  // namespace semnav
