#pragma once

#include <vector>

#include "semnav/diffeo.hpp"
#include "semnav/geometry.hpp"
#include "semnav/params.hpp"

namespace semnav {

// Obstacles as seen in the model space: disks from purged familiar obstacles
// plus sensed points on unknown obstacles, each dilated by point_radius.
struct ModelObstacles {
  std::vector<ModelDisk> disks;
  std::vector<Point2> points;
  double point_radius = 0.0;
};

// Voronoi-style cell around y, clipped to a polygon inscribed in the disk of
// radius model_range / 2 and to the enclosing freespace. Throws EmptyCell.
std::vector<Point2> local_freespace(const Point2& y, const ModelObstacles& obs, double model_range,
                                    const ConvexPolygon& enclosing, int sides = 32);

Vec2 fully_actuated_model_input(const Point2& y, const Point2& goal, const std::vector<Point2>& lf);

struct FaCommand {
  Vec2 u = Vec2::Zero();
  Vec2 u_hat = Vec2::Zero();  // unbounded pullback
  Vec2 v_model = Vec2::Zero();
};

// goal_model is Phi(x_g).
FaCommand fully_actuated_input(const Point2& x, const DiffeoSnapshot& snap, const Point2& goal_model,
                               const ModelObstacles& obs, double model_range, const ConvexPolygon& enclosing,
                               const ControllerParams& p);

struct UnicycleState {
  Point2 x = Point2::Zero();
  double psi = 0.0;
};

double wrap_angle(double a);

struct ModelLift {
  Point2 y = Point2::Zero();
  double phi = 0.0;
  Vec2 e = Vec2::UnitX();
  double dxi_dpsi = 1.0;  // det(J) / |e|^2
  double theta = 0.0;     // D_x xi . [cos psi, sin psi]
};

ModelLift se2_lift(const UnicycleState& s, const DiffeoSnapshot& snap);
ModelLift se2_lift(const UnicycleState& s, const MapDerivatives& d);

struct DdModelInputs {
  double v_hat = 0.0;
  double omega_hat = 0.0;
  Point2 y_v = Point2::Zero();
  Point2 y_omega = Point2::Zero();
};

DdModelInputs diffdrive_model_inputs(const Point2& y, double phi, const Point2& goal, const std::vector<Point2>& lf);

struct DdCommand {
  double v = 0.0;
  double omega = 0.0;
  double k_v = 0.0;
  double k_omega = 0.0;
  DdModelInputs model;
  ModelLift lift;
};

DdCommand diffdrive_inputs(const UnicycleState& s, const DiffeoSnapshot& snap, const Point2& goal_model,
                           const ModelObstacles& obs, double model_range, const ConvexPolygon& enclosing,
                           const ControllerParams& p);

// Unstable equilibria antipodal to the goal on each model disk.
std::vector<Point2> compute_saddles(const std::vector<ModelDisk>& disks, const Point2& goal_model);

}  // namespace semnav
