#include <algorithm>
#include <cmath>
#include <optional>

#include "semnav/diffeo.hpp"
#include "semnav/errors.hpp"

namespace semnav {

namespace {

constexpr double kAreaTol = 1e-10;

double scale_of(const std::vector<Point2>& pts) {
  double s = 1.0;
  for (const auto& p : pts) s = std::max(s, p.cwiseAbs().maxCoeff());
  return s;
}

bool contains_all(const std::vector<Point2>& poly, const std::vector<Point2>& pts) {
  const double tol = 1e-9 * scale_of(poly);
  for (const auto& p : pts)
    if (point_in_polygon(p, poly, tol) == Location::kOutside) return false;
  return true;
}

std::optional<double> ray_segment(const Point2& o, const Vec2& d, const Point2& a, const Point2& b) {
  const Vec2 e = b - a;
  const double den = cross(d, e);
  if (std::abs(den) < 1e-15) return std::nullopt;
  const Vec2 w = a - o;
  const double t = cross(w, e) / den;
  const double s = cross(w, d) / den;
  if (t > 0 && s >= -1e-12 && s <= 1 + 1e-12) return t;
  return std::nullopt;
}

Point2 leaf_center(const Triangle& t, const Triangle& parent) {
  const Point2 m = 0.5 * (t.v1 + t.v2);
  const Vec2 u = (m - t.v3).normalized();
  const Point2 q = 0.5 * (m + parent.centroid());
  const double s = (q - m).dot(u);
  const Point2 c = m + s * u;
  const auto pp = parent.points();
  const double margin = 1e-6 * std::sqrt(std::abs(parent.area()));
  if (s > 0 && point_in_polygon(c, pp, 0.0) == Location::kInside && distance_to_boundary(c, pp) > margin) return c;
  // Fall back to halfway between the shared edge and the far side of the parent.
  double exit = 0.0;
  for (int e = 0; e < 3; ++e) {
    const Point2& a = pp[e];
    const Point2& b = pp[(e + 1) % 3];
    const bool shared = ((a - t.v1).norm() < 1e-12 && (b - t.v2).norm() < 1e-12) ||
                        ((a - t.v2).norm() < 1e-12 && (b - t.v1).norm() < 1e-12);
    if (shared) continue;
    if (auto hit = ray_segment(m, u, a, b)) exit = std::max(exit, *hit);
  }
  if (exit <= 0) throw Error(ErrorCode::kInadmissibleCollar, "no admissible center inside the parent triangle");
  return m + 0.5 * exit * u;
}

struct Line {
  Point2 anchor;
  Vec2 normal;  // keeps (x - anchor).normal >= 0
};

// Cuts a convex region with separating half-planes until it clears every blocker.
std::vector<Point2> carve(std::vector<Point2> region, const std::vector<Point2>& gamma,
                          const std::vector<std::vector<Point2>>& blockers) {
  const double tol = 1e-9 * scale_of(gamma);
  for (const auto& b : blockers) {
    if (region.empty()) break;
    if (!convex_overlap(region, b, kAreaTol)) continue;
    std::vector<Line> cands;
    for (std::size_t i = 0; i < gamma.size(); ++i)
      cands.push_back({gamma[i], rot90(gamma[(i + 1) % gamma.size()] - gamma[i]).normalized()});
    for (std::size_t i = 0; i < b.size(); ++i)
      cands.push_back({b[i], -rot90(b[(i + 1) % b.size()] - b[i]).normalized()});
    std::vector<Point2> best;
    double best_area = -1.0;
    for (const auto& l : cands) {
      bool ok = true;
      for (const auto& g : gamma) ok = ok && (g - l.anchor).dot(l.normal) >= -tol;
      for (const auto& q : b) ok = ok && (q - l.anchor).dot(l.normal) <= tol;
      if (!ok) continue;
      auto clipped = clip_convex(region, l.anchor, l.normal);
      const double a = clipped.empty() ? 0.0 : signed_area(clipped);
      if (a > best_area) {
        best_area = a;
        best = std::move(clipped);
      }
    }
    if (best_area <= 0) throw Error(ErrorCode::kInadmissibleCollar, "no separating line between a region and an obstacle");
    region = std::move(best);
  }
  return region;
}

// Region minus blockers, then the convex piece holding gamma.
std::optional<std::vector<Point2>> decomposition_piece(const std::vector<Point2>& region,
                                                       const std::vector<Point2>& gamma,
                                                       const std::vector<std::vector<Point2>>& blockers) {
  try {
    std::vector<Polygon> cut;
    for (const auto& b : blockers) cut.push_back(trusted_polygon(b));
    for (const auto& comp : boolean_op(BoolOp::kDifference, {trusted_polygon(region)}, cut)) {
      if (!contains_all(comp.vertices(), gamma)) continue;
      for (const auto& piece : convex_decompose(comp))
        if (contains_all(piece.vertices(), gamma)) return piece.vertices();
    }
  } catch (const Error&) {
  }
  return std::nullopt;
}

std::vector<Point2> fit_collar(const std::vector<Point2>& region, const std::vector<Point2>& gamma,
                               const std::vector<std::vector<Point2>>& candidates) {
  if (region.empty() || !contains_all(region, gamma))
    throw Error(ErrorCode::kInadmissibleCollar, "dilated region does not contain the purged region");
  std::vector<std::vector<Point2>> hit;
  for (const auto& b : candidates)
    if (convex_overlap(region, b, kAreaTol)) hit.push_back(b);
  if (hit.empty()) return region;
  if (auto piece = decomposition_piece(region, gamma, hit)) {
    bool clean = true;
    for (const auto& b : hit) clean = clean && !convex_overlap(*piece, b, kAreaTol);
    if (clean) return *piece;
  }
  return carve(region, gamma, hit);
}

std::vector<Point2> cone_clip(std::vector<Point2> r, const Point2& x1, const Point2& c, const Point2& x2) {
  r = clip_convex(r, x1, rot90(c - x1));
  return clip_convex(r, c, rot90(x2 - c));
}

void check_collar(const std::vector<Point2>& collar, const std::vector<Point2>& gamma) {
  if (collar.size() < 3 || !is_convex_ccw(collar, 1e-9) || !contains_all(collar, gamma))
    throw Error(ErrorCode::kInadmissibleCollar, "collar is not a convex superset of its purged region");
}

}  // namespace

void compute_collars(FamiliarComponent& comp, const std::vector<Polygon>& others, const ConvexPolygon& enclosing) {
  auto& tree = comp.tree;
  const TreeMode mode = comp.touches_boundary ? TreeMode::kBoundary : TreeMode::kInterior;
  tree = build_triangle_tree(comp.geometry, mode, &enclosing);
  tree.purge.assign(tree.nodes.size(), NodePurge{});
  const double eps = comp.clearance;
  if (!(eps > 0)) throw Error(ErrorCode::kInadmissibleCollar, "collar clearance must be positive");
  const auto& fe = enclosing.vertices();

  std::vector<std::vector<Point2>> other_tris;
  for (const auto& o : others) {
    const Triangulation t = ear_clip(o);
    for (std::size_t i = 0; i < t.triangles.size(); ++i) other_tris.push_back(t.triangle(i).points());
  }

  const auto& order = tree.purge_order;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int j = order[k];
    const TreeNode& node = tree.nodes[j];
    const Triangle& t = node.tri;
    NodePurge& pd = tree.purge[j];
    std::vector<std::vector<Point2>> blockers = other_tris;

    if (j != tree.root) {
      const Triangle& parent = tree.nodes[node.parent].tri;
      pd.center = leaf_center(t, parent);
      pd.gamma = {t.v1, pd.center, t.v2, t.v3};
      for (std::size_t q = k + 1; q < order.size(); ++q)
        if (order[q] != node.parent) blockers.push_back(tree.nodes[order[q]].tri.points());
      auto region = intersect_convex(dilate_convex(pd.gamma, eps).vertices(), fe);
      region = cone_clip(region, t.v1, pd.center, t.v2);
      pd.collar = fit_collar(region, pd.gamma, blockers);
    } else if (mode == TreeMode::kInterior) {
      pd.center = t.centroid();
      const auto pts = t.points();
      pd.radius = 0.5 * distance_to_boundary(pd.center, pts);
      pd.gamma = pts;
      pd.collar = fit_collar(intersect_convex(dilate_convex(pts, eps).vertices(), fe), pd.gamma, blockers);
    } else {
      // Root touching the enclosing boundary; the center sits outside, on the
      // extension of the median. Shorter extensions are tried when the union
      // with the outer triangle is not convex.
      const Point2 m = 0.5 * (t.v1 + t.v2);
      const Vec2 med = m - t.v3;
      bool done = false;
      for (double frac : {0.25, 0.125, 0.0625, 0.03125}) {
        const Point2 c = m + frac * med;
        if (point_in_polygon(c, fe, 0.0) != Location::kOutside) continue;
        const std::vector<Point2> gamma{t.v1, c, t.v2, t.v3};
        auto region = intersect_convex(dilate_convex(gamma, eps).vertices(), fe);
        region = cone_clip(region, t.v1, c, t.v2);
        if (region.empty()) continue;
        const std::vector<Point2> inside_gamma{t.v1, t.v2, t.v3};
        region = fit_collar(region, inside_gamma, blockers);
        std::vector<Point2> all = region;
        all.push_back(c);
        const auto hull = convex_hull(all).vertices();
        const double expect = signed_area(region) + 0.5 * orient(t.v1, c, t.v2);
        if (std::abs(signed_area(hull) - expect) > 1e-9 * std::max(1.0, expect)) continue;
        pd.center = c;
        pd.gamma = gamma;
        pd.collar = hull;
        done = true;
        break;
      }
      if (!done) throw Error(ErrorCode::kInadmissibleCollar, "no convex collar for a boundary root triangle");
    }
    check_collar(pd.collar, pd.gamma);
  }
}

void separate_root_collars(std::vector<FamiliarComponent>& comps) {
  for (std::size_t i = 0; i < comps.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      auto& pi = comps[i].tree.purge[comps[i].tree.root];
      const auto& pj = comps[j].tree.purge[comps[j].tree.root];
      if (!convex_overlap(pi.collar, pj.collar, kAreaTol)) continue;
      pi.collar = carve(pi.collar, pi.gamma, {pj.collar});
      check_collar(pi.collar, pi.gamma);
    }
  }
}

}  // namespace semnav
