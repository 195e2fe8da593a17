#include <limits>
#include "semnav/diffeo.hpp"

#include <algorithm>
#include <cmath>

#include "semnav/errors.hpp"

namespace semnav {

void DiffeoParams::validate() const {
  if (!(mu_gamma > 0 && mu_delta > 0 && eps_gamma > 0))
    throw Error(ErrorCode::kValidation, "diffeo parameters must be strictly positive");
}

double zeta(double mu, double chi) { return chi > 0 ? std::exp(-mu / chi) : 0.0; }

double zeta_prime(double mu, double chi) { return chi > 0 ? mu * std::exp(-mu / chi) / (chi * chi) : 0.0; }

double eta(double mu, double eps, double chi) { return zeta(mu, eps - chi) / zeta(mu, eps); }

namespace {

constexpr int kCollarPower = 2;

void finish_step(PurgeStep& s, const std::vector<Point2>& collar, const DiffeoParams& params) {
  params.validate();
  s.params = params;
  s.collar = collar;
  s.gamma = build_polygon_implicit(s.gamma_region, kCollarPower);
  s.delta = build_convex_inside(collar, kCollarPower);
  s.lo = s.hi = collar.front();
  for (const auto& p : collar) {
    s.lo = s.lo.cwiseMin(p);
    s.hi = s.hi.cwiseMax(p);
  }
}

Vec2 shared_normal(const Point2& a, const Point2& b) { return rot90(b - a).normalized(); }

}  // namespace

PurgeStep make_leaf_step(const Triangle& t, const Point2& center, const std::vector<Point2>& collar,
                         const DiffeoParams& params) {
  PurgeStep s;
  s.kind = StepKind::kLeaf;
  s.x1 = t.v1;
  s.x2 = t.v2;
  s.x3 = t.v3;
  s.center = center;
  s.normal = shared_normal(t.v1, t.v2);
  s.gamma_region = {t.v1, center, t.v2, t.v3};
  finish_step(s, collar, params);
  return s;
}

PurgeStep make_root_disk_step(const Triangle& t, const Point2& center, double radius,
                              const std::vector<Point2>& collar, const DiffeoParams& params) {
  PurgeStep s;
  s.kind = StepKind::kRootDisk;
  s.x1 = t.v1;
  s.x2 = t.v2;
  s.x3 = t.v3;
  s.center = center;
  s.radius = radius;
  s.gamma_region = {t.v1, t.v2, t.v3};
  finish_step(s, collar, params);
  return s;
}

PurgeStep make_root_boundary_step(const Triangle& t, const Point2& center, const std::vector<Point2>& collar,
                                  const DiffeoParams& params) {
  PurgeStep s = make_leaf_step(t, center, collar, params);
  s.kind = StepKind::kRootBoundary;
  return s;
}

bool in_collar_box(const PurgeStep& s, const Point2& x) {
  return x.x() > s.lo.x() && x.x() < s.hi.x() && x.y() > s.lo.y() && x.y() < s.hi.y();
}

namespace {

bool at_explicit_vertex(const PurgeStep& s, const Point2& x) {
  return s.kind != StepKind::kRootDisk && (x == s.x1 || x == s.x2);
}

}  // namespace

namespace {

// Rounding level of the gamma R-function at x. Near x1, x2 the delta switch is
// ~1e-15 and sigma would swing over [0, 1] on gamma noise alone, so anything
// below this is taken as the edge itself.
double gamma_floor(const Point2& x) { return 32.0 * std::numeric_limits<double>::epsilon() * (1.0 + x.lpNorm<Eigen::Infinity>()); }

}  // namespace

double switch_eval(const PurgeStep& s, const Point2& x) {
  if (at_explicit_vertex(s, x)) return 1.0;
  if (!in_collar_box(s, x)) return 0.0;
  const double d = implicit_eval(s.delta, x);
  if (d <= 0) return 0.0;
  const double g = implicit_eval(s.gamma, x);
  const auto& p = s.params;
  if (g >= p.eps_gamma) return 0.0;
  if (g <= gamma_floor(x)) return 1.0;
  const double sg = eta(p.mu_gamma, p.eps_gamma, g);
  const double sd = zeta(p.mu_delta, d / (x - s.center).norm());
  const double a = sg * sd;
  if (a == 0.0) return 0.0;
  // 1 - sg without cancellation; a can sit below one ulp of 1.
  const double om = -std::expm1(-p.mu_gamma * g / (p.eps_gamma * (p.eps_gamma - g)));
  return a / (a + om);
}

Jet switch_jet(const PurgeStep& s, const Point2& x) {
  if (at_explicit_vertex(s, x)) return Jet(1.0);
  if (!in_collar_box(s, x)) return Jet(0.0);
  const auto& p = s.params;
  if (implicit_eval(s.delta, x) <= 0) return Jet(0.0);
  const double gv = implicit_eval(s.gamma, x);
  if (gv >= p.eps_gamma) return Jet(0.0);
  if (gv <= gamma_floor(x)) return Jet(1.0);

  const Jet d = implicit_jet(s.delta, x);
  const Jet g = implicit_jet(s.gamma, x);
  const Vec2 rel = x - s.center;
  const double rn = rel.norm();
  const Jet r(rn, rel / rn, (Mat2::Identity() - rel * rel.transpose() / (rn * rn)) / rn);
  const Jet alpha = d / r;

  const double md = p.mu_delta, a = alpha.v;
  const double fd = std::exp(-md / a);
  if (fd == 0.0) return Jet(0.0);
  const Jet sd = chain(alpha, fd, md * fd / (a * a), fd * (md * md / (a * a * a * a) - 2.0 * md / (a * a * a)));

  const double mg = p.mu_gamma, u = p.eps_gamma - g.v;
  const double fg = std::exp(-mg / u + mg / p.eps_gamma);
  if (fg == 0.0) return Jet(0.0);
  const Jet sg = chain(g, fg, -mg * fg / (u * u), fg * (mg * mg / (u * u * u * u) - 2.0 * mg / (u * u * u)));

  const Jet prod = sg * sd;
  const Jet om(-std::expm1(-mg * g.v / (p.eps_gamma * u)), -sg.g, -sg.h);
  return prod / (prod + om);
}

Jet deforming_jet(const PurgeStep& s, const Point2& x) {
  const Vec2 rel = x - s.center;
  if (s.kind == StepKind::kRootDisk) {
    const double rn = rel.norm();
    if (rn <= 0.0) throw Error(ErrorCode::kSingularDenominator, "deforming factor evaluated at the center");
    const Jet r(rn, rel / rn, (Mat2::Identity() - rel * rel.transpose() / (rn * rn)) / rn);
    return s.radius * recip(r);
  }
  const double den = rel.dot(s.normal);
  if (den <= 1e-12 * std::max(1.0, rel.norm()))
    throw Error(ErrorCode::kSingularDenominator, "point is not beyond the center line");
  const double num = (s.x1 - s.center).dot(s.normal);
  return num * recip(Jet(den, s.normal, Mat2::Zero()));
}

double deforming_factor(const PurgeStep& s, const Point2& x) {
  const Vec2 rel = x - s.center;
  if (s.kind == StepKind::kRootDisk) {
    const double rn = rel.norm();
    if (rn <= 0.0) throw Error(ErrorCode::kSingularDenominator, "deforming factor evaluated at the center");
    return s.radius / rn;
  }
  const double den = rel.dot(s.normal);
  if (den <= 1e-12 * std::max(1.0, rel.norm()))
    throw Error(ErrorCode::kSingularDenominator, "point is not beyond the center line");
  return (s.x1 - s.center).dot(s.normal) / den;
}

Point2 purge_map(const PurgeStep& s, const Point2& x) {
  const double sigma = switch_eval(s, x);
  if (sigma == 0.0) return x;
  const double nu = deforming_factor(s, x);
  return x + sigma * (nu - 1.0) * (x - s.center);
}

MapDerivatives purge_map_derivatives(const PurgeStep& s, const Point2& x) {
  MapDerivatives out;
  out.value = x;
  if (!in_collar_box(s, x)) return out;
  const double tol = geom_eps();
  if ((x - s.x1).norm() <= tol || (x - s.x2).norm() <= tol || (x - s.x3).norm() <= tol)
    throw Error(ErrorCode::kSingularPoint, "Jacobian requested at a triangle vertex");
  const Jet sg = switch_jet(s, x);
  if (sg.v == 0.0) return out;
  const Jet nu = deforming_jet(s, x);
  const Vec2 p = x - s.center;
  const double nm1 = nu.v - 1.0;
  out.value = x + sg.v * nm1 * p;
  out.J = nm1 * p * sg.g.transpose() + sg.v * p * nu.g.transpose() + (1.0 + sg.v * nm1) * Mat2::Identity();
  for (int sidx = 0; sidx < 2; ++sidx) {
    for (int m = 0; m < 2; ++m) {
      for (int r = 0; r < 2; ++r) {
        const double dms = m == sidx ? 1.0 : 0.0;
        const double dmr = m == r ? 1.0 : 0.0;
        out.dJ[sidx](m, r) = nm1 * sg.g[r] * dms + p[m] * sg.g[r] * nu.g[sidx] + nm1 * p[m] * sg.h(r, sidx) +
                             p[m] * sg.g[sidx] * nu.g[r] + sg.v * nu.g[r] * dms + sg.v * p[m] * nu.h(r, sidx) +
                             sg.v * nu.g[sidx] * dmr + nm1 * sg.g[sidx] * dmr;
      }
    }
  }
  return out;
}

Mat2 purge_map_jacobian(const PurgeStep& s, const Point2& x) { return purge_map_derivatives(s, x).J; }

bool in_mapped_obstacle(const DiffeoSnapshot& snap, const Point2& x) {
  for (const auto& o : snap.obstacles) {
    const auto [lo, hi] = o.bbox();
    if (x.x() < lo.x() || x.x() > hi.x() || x.y() < lo.y() || x.y() > hi.y()) continue;
    if (point_in_polygon(x, o, 0.0) == Location::kInside) return true;
  }
  return false;
}

Point2 diffeo_eval(const DiffeoSnapshot& snap, const Point2& x) {
  if (in_mapped_obstacle(snap, x)) throw Error(ErrorCode::kOutOfDomain, "point lies inside a mapped obstacle");
  Point2 y = x;
  for (const auto& s : snap.steps) y = purge_map(s, y);
  return y;
}

MapDerivatives diffeo_jacobian(const DiffeoSnapshot& snap, const Point2& x, bool second_partials) {
  if (in_mapped_obstacle(snap, x)) throw Error(ErrorCode::kOutOfDomain, "point lies inside a mapped obstacle");
  if (snap.fd_second_partials && second_partials) return diffeo_jacobian_fd(snap, x);
  MapDerivatives acc;
  acc.value = x;
  for (const auto& s : snap.steps) {
    if (!in_collar_box(s, acc.value)) continue;
    const MapDerivatives d = purge_map_derivatives(s, acc.value);
    if (second_partials) {
      SecondPartials next{Mat2::Zero(), Mat2::Zero()};
      for (int n = 0; n < 2; ++n) {
        // sum_s J_sn * d[Dh]/dx_s
        const Mat2 dh_n = acc.J(0, n) * d.dJ[0] + acc.J(1, n) * d.dJ[1];
        next[n] = d.J * acc.dJ[n] + dh_n * acc.J;
      }
      acc.dJ = next;
    }
    acc.J = d.J * acc.J;
    acc.value = d.value;
  }
  return acc;
}

MapDerivatives diffeo_jacobian_fd(const DiffeoSnapshot& snap, const Point2& x, double h) {
  MapDerivatives out = diffeo_jacobian(snap, x, false);
  for (int n = 0; n < 2; ++n) {
    Point2 e = Point2::Zero();
    e[n] = h;
    out.dJ[n] = (diffeo_jacobian(snap, x + e, false).J - diffeo_jacobian(snap, x - e, false).J) / (2.0 * h);
  }
  return out;
}

DiffeoSnapshot build_snapshot(const std::vector<FamiliarComponent>& comps, const std::vector<int>& mode,
                              const DiffeoParams& params) {
  DiffeoSnapshot snap;
  snap.mode = mode;
  std::vector<PurgeStep> roots;
  for (int ci = 0; ci < static_cast<int>(comps.size()); ++ci) {
    const auto& c = comps[ci];
    const auto& tree = c.tree;
    if (tree.purge.size() != tree.nodes.size())
      throw Error(ErrorCode::kInadmissibleCollar, "component has no collars");
    snap.obstacles.push_back(c.geometry);
    for (int node : tree.purge_order) {
      const auto& pd = tree.purge[node];
      const auto& tri = tree.nodes[node].tri;
      PurgeStep s;
      if (node != tree.root)
        s = make_leaf_step(tri, pd.center, pd.collar, params);
      else if (tree.mode == TreeMode::kInterior)
        s = make_root_disk_step(tri, pd.center, pd.radius, pd.collar, params);
      else
        s = make_root_boundary_step(tri, pd.center, pd.collar, params);
      s.component = ci;
      s.node = node;
      if (node == tree.root) {
        if (s.kind == StepKind::kRootDisk) snap.model_disks.push_back({pd.center, pd.radius, ci});
        roots.push_back(std::move(s));
      } else {
        snap.steps.push_back(std::move(s));
      }
    }
  }
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      if (convex_overlap(roots[i].collar, roots[j].collar, 1e-12))
        throw Error(ErrorCode::kInadmissibleCollar, "root collars overlap");
  for (auto& r : roots) snap.steps.push_back(std::move(r));
  return snap;
}

}  // namespace semnav
