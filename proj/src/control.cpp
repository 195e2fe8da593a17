#include "semnav/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "semnav/errors.hpp"

namespace semnav {

void ControllerParams::validate() const {
  if (!(k > 0 && k_v > 0 && k_omega > 0)) throw Error(ErrorCode::kValidation, "gains must be positive");
  if (!(u_max > 0 && v_max > 0 && omega_max > 0)) throw Error(ErrorCode::kValidation, "input bounds must be positive");
  if (k > u_max) throw Error(ErrorCode::kValidation, "k must not exceed u_max");
  if (!(lambda > 0 && lambda < 1)) throw Error(ErrorCode::kValidation, "lambda must lie in (0, 1)");
  if (!(eps_u > 0)) throw Error(ErrorCode::kValidation, "eps_u must be positive");
  if (lf_sides < 8) throw Error(ErrorCode::kValidation, "lf_sides must be at least 8");
}

namespace {

void clip_against(std::vector<Point2>& cell, const Point2& y, const Point2& proj, double model_range) {
  const Vec2 n = y - proj;
  const double d = n.norm();
  if (d <= 0) throw Error(ErrorCode::kEmptyCell, "position lies on an obstacle");
  if (d >= model_range) return;  // bisector misses the range polygon
  cell = clip_convex(cell, 0.5 * (y + proj), n / d);
}

// Parameter interval of y + t*dir inside the convex polygon.
std::pair<double, double> line_interval(const Point2& y, const Vec2& dir, const std::vector<Point2>& lf) {
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  const std::size_t n = lf.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = lf[i];
    const Vec2 nrm = rot90(lf[(i + 1) % n] - a);
    const double den = dir.dot(nrm);
    const double num = -(y - a).dot(nrm);
    if (den > 0) lo = std::max(lo, num / den);
    else if (den < 0) hi = std::min(hi, num / den);
  }
  // y is in the cell up to round-off
  lo = std::min(lo, 0.0);
  hi = std::max(hi, 0.0);
  return {lo, hi};
}

}  // namespace

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

std::vector<Point2> local_freespace(const Point2& y, const ModelObstacles& obs, double model_range,
                                    const ConvexPolygon& enclosing, int sides) {
  const double rad = 0.5 * model_range;
  std::vector<Point2> cell;
  for (int k = 0; k < sides; ++k) {
    const double a = 2.0 * std::numbers::pi * k / sides;
    cell.push_back(y + rad * Vec2(std::cos(a), std::sin(a)));
  }
  cell = intersect_convex(cell, enclosing.vertices());
  for (const auto& d : obs.disks) {
    const Vec2 w = y - d.center;
    const double n = w.norm();
    if (n <= d.radius) throw Error(ErrorCode::kEmptyCell, "position inside a model disk");
    clip_against(cell, y, d.center + d.radius * w / n, model_range);
    if (cell.empty()) break;
  }
  for (const auto& p : obs.points) {
    if (cell.empty()) break;
    const Vec2 w = y - p;
    const double n = w.norm();
    if (n - obs.point_radius >= model_range) continue;
    if (n <= obs.point_radius) throw Error(ErrorCode::kEmptyCell, "position inside a sensed obstacle");
    clip_against(cell, y, p + obs.point_radius * w / n, model_range);
  }
  if (cell.size() < 3) throw Error(ErrorCode::kEmptyCell, "local freespace is empty");
  return cell;
}

Vec2 fully_actuated_model_input(const Point2& y, const Point2& goal, const std::vector<Point2>& lf) {
  return project_to_convex(goal, lf) - y;
}

FaCommand fully_actuated_input(const Point2& x, const DiffeoSnapshot& snap, const Point2& goal_model,
                               const ModelObstacles& obs, double model_range, const ConvexPolygon& enclosing,
                               const ControllerParams& p) {
  const MapDerivatives d = diffeo_jacobian(snap, x, false);
  const auto lf = local_freespace(d.value, obs, model_range, enclosing, p.lf_sides);
  FaCommand c;
  c.v_model = fully_actuated_model_input(d.value, goal_model, lf);
  const double det = d.J.determinant();
  if (!(det > 0) || !std::isfinite(det)) throw Error(ErrorCode::kSingularJacobian, "Jacobian is not invertible");
  c.u_hat = d.J.inverse() * c.v_model;
  c.u = p.k * c.u_hat / (c.u_hat.norm() + p.eps_u);
  const double n = c.u.norm();
  if (n > p.u_max) c.u *= p.u_max / n;
  return c;
}

ModelLift se2_lift(const UnicycleState& s, const MapDerivatives& d) {
  const Vec2 h(std::cos(s.psi), std::sin(s.psi));
  ModelLift l;
  l.y = d.value;
  l.e = d.J * h;
  const double e2 = l.e.squaredNorm();
  if (!(e2 > 0)) throw Error(ErrorCode::kSingularJacobian, "heading maps to a zero vector");
  l.phi = std::atan2(l.e.y(), l.e.x());
  l.dxi_dpsi = d.J.determinant() / e2;
  const Vec2 de = h.x() * (d.dJ[0] * h) + h.y() * (d.dJ[1] * h);  // directional derivative of e along h
  l.theta = (-l.e.y() * de.x() + l.e.x() * de.y()) / e2;
  return l;
}

ModelLift se2_lift(const UnicycleState& s, const DiffeoSnapshot& snap) {
  return se2_lift(s, diffeo_jacobian(snap, s.x, true));
}

DdModelInputs diffdrive_model_inputs(const Point2& y, double phi, const Point2& goal, const std::vector<Point2>& lf) {
  DdModelInputs m;
  const Vec2 dir(std::cos(phi), std::sin(phi));
  const auto [lo, hi] = line_interval(y, dir, lf);
  const double t = std::clamp((goal - y).dot(dir), lo, hi);
  m.y_v = y + t * dir;

  const Point2 proj = project_to_convex(goal, lf);
  Point2 along = y;
  const Vec2 g = goal - y;
  const double len = g.norm();
  if (len > 0) {
    const Vec2 u = g / len;
    const auto [glo, ghi] = line_interval(y, u, lf);
    along = y + std::clamp(len, glo, ghi) * u;
  }
  m.y_omega = 0.5 * (along + proj);

  m.v_hat = -dir.dot(y - m.y_v);
  const Vec2 w = m.y_omega - y;
  const double par = dir.dot(w), perp = cross(dir, w);
  m.omega_hat = (par == 0.0 && perp == 0.0) ? 0.0 : std::atan(perp / par);
  return m;
}

DdCommand diffdrive_inputs(const UnicycleState& s, const DiffeoSnapshot& snap, const Point2& goal_model,
                           const ModelObstacles& obs, double model_range, const ConvexPolygon& enclosing,
                           const ControllerParams& p) {
  DdCommand c;
  c.lift = se2_lift(s, snap);
  const auto& l = c.lift;
  if (!(l.dxi_dpsi > 0)) throw Error(ErrorCode::kSingularJacobian, "orientation map is degenerate");
  const auto lf = local_freespace(l.y, obs, model_range, enclosing, p.lf_sides);
  c.model = diffdrive_model_inputs(l.y, l.phi, goal_model, lf);
  const double en = l.e.norm();
  const double av = std::abs(c.model.v_hat), aw = std::abs(c.model.omega_hat), at = std::abs(l.theta);

  c.k_v = p.k_v;
  if (av > 0) c.k_v = std::min(c.k_v, en * p.v_max / av);
  if (av * at > 0) c.k_v = std::min(c.k_v, p.lambda * l.dxi_dpsi * en * p.omega_max / (av * at));
  c.k_omega = p.k_omega;
  if (aw > 0) c.k_omega = std::min(c.k_omega, (1.0 - p.lambda) * l.dxi_dpsi * p.omega_max / aw);

  c.v = c.k_v * c.model.v_hat / en;
  c.omega = (c.k_omega * c.model.omega_hat - c.v * l.theta) / l.dxi_dpsi;
  // The gains already keep both within bounds; this only absorbs round-off.
  c.v = std::clamp(c.v, -p.v_max, p.v_max);
  c.omega = std::clamp(c.omega, -p.omega_max, p.omega_max);
  return c;
}

std::vector<Point2> compute_saddles(const std::vector<ModelDisk>& disks, const Point2& goal_model) {
  std::vector<Point2> out;
  for (const auto& d : disks) {
    const Vec2 w = goal_model - d.center;
    const double n = w.norm();
    if (n <= geom_eps()) throw Error(ErrorCode::kGoalAtCenter, "goal image coincides with a disk center");
    out.push_back(d.center - d.radius * w / n);
  }
  return out;
}

}  // namespace semnav
