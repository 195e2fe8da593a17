#include "semnav/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "semnav/errors.hpp"

namespace semnav {

namespace {

double initial_eps() {
  if (const char* s = std::getenv("SEMNAV_EPS")) {
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end != s && v > 0.0 && std::isfinite(v)) return v;
  }
  return 1e-9;
}

double g_eps = initial_eps();

}  // namespace

double geom_eps() { return g_eps; }

void set_geom_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorCode::kDegenerateInput, "epsilon must be positive");
  g_eps = eps;
}

double signed_area(const std::vector<Point2>& pts) {
  double a = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(pts[i], pts[(i + 1) % n]);
  return 0.5 * a;
}

bool is_convex_ccw(const std::vector<Point2>& pts, double tol) {
  const std::size_t n = pts.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = pts[i];
    const Point2& b = pts[(i + 1) % n];
    const Point2& c = pts[(i + 2) % n];
    const double scale = (b - a).norm() * (c - b).norm();
    if (orient(a, b, c) < -tol * std::max(scale, 1.0)) return false;
  }
  return signed_area(pts) > 0.0;
}

bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const double d1 = orient(c, d, a);
  const double d2 = orient(c, d, b);
  const double d3 = orient(a, b, c);
  const double d4 = orient(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  const double tol = geom_eps();
  auto on_seg = [tol](const Point2& p, const Point2& q, const Point2& r) {
    return distance_to_segment(r, p, q) <= tol;
  };
  return on_seg(c, d, a) || on_seg(c, d, b) || on_seg(a, b, c) || on_seg(a, b, d);
}

Polygon::Polygon(std::vector<Point2> v) {
  const double eps = geom_eps();
  std::vector<Point2> out;
  out.reserve(v.size());
  for (const auto& p : v) {
    if (!p.allFinite()) throw Error(ErrorCode::kDegeneratePolygon, "non-finite vertex");
    if (out.empty() || (p - out.back()).norm() > eps) out.push_back(p);
  }
  while (out.size() > 1 && (out.front() - out.back()).norm() <= eps) out.pop_back();
  if (out.size() < 3) throw Error(ErrorCode::kDegeneratePolygon, "fewer than 3 distinct vertices");
  double a = signed_area(out);
  double per = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) per += (out[(i + 1) % out.size()] - out[i]).norm();
  if (std::abs(a) <= eps * per) throw Error(ErrorCode::kDegeneratePolygon, "zero area");
  if (a < 0) std::reverse(out.begin(), out.end());

  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a0 = out[i];
    const Point2& a1 = out[(i + 1) % n];
    // Spikes: the next edge folds back onto this one.
    const Point2& a2 = out[(i + 2) % n];
    if (std::abs(orient(a0, a1, a2)) <= eps * (a2 - a0).norm() && (a1 - a0).dot(a2 - a1) < 0)
      throw Error(ErrorCode::kTopologyError, "polygon has a zero-width spike");
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_intersect(a0, a1, out[j], out[(j + 1) % n]))
        throw Error(ErrorCode::kTopologyError,
                    "polygon is not simple (edges " + std::to_string(i) + " and " + std::to_string(j) + ")");
    }
  }
  v_ = std::move(out);
}

Polygon trusted_polygon(std::vector<Point2> v) { return Polygon(Polygon::Trusted{}, std::move(v)); }

double Polygon::area() const { return signed_area(v_); }

double Polygon::perimeter() const {
  double p = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i) p += (vertex(i + 1) - v_[i]).norm();
  return p;
}

Point2 Polygon::centroid() const {
  double a = 0.0;
  Point2 c = Point2::Zero();
  for (std::size_t i = 0; i < v_.size(); ++i) {
    const Point2& p = v_[i];
    const Point2& q = vertex(i + 1);
    const double w = cross(p, q);
    a += w;
    c += w * (p + q);
  }
  return c / (3.0 * a);
}

double Polygon::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i)
    for (std::size_t j = i + 1; j < v_.size(); ++j) d = std::max(d, (v_[i] - v_[j]).norm());
  return d;
}

std::pair<Point2, Point2> Polygon::bbox() const {
  Point2 lo = v_.front(), hi = v_.front();
  for (const auto& p : v_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return {lo, hi};
}

ConvexPolygon::ConvexPolygon(std::vector<Point2> vertices) : Polygon(std::move(vertices)) {
  if (!is_convex_ccw(v_, 1e-9)) throw Error(ErrorCode::kDegenerateInput, "polygon is not convex");
}

ConvexPolygon::ConvexPolygon(const Polygon& p) : ConvexPolygon(p.vertices()) {}

Point2 closest_on_segment(const Point2& q, const Point2& a, const Point2& b) {
  const Vec2 d = b - a;
  const double l2 = d.squaredNorm();
  if (l2 == 0.0) return a;
  const double t = std::clamp((q - a).dot(d) / l2, 0.0, 1.0);
  return a + t * d;
}

double distance_to_segment(const Point2& q, const Point2& a, const Point2& b) {
  return (q - closest_on_segment(q, a, b)).norm();
}

double distance_to_boundary(const Point2& q, const std::vector<Point2>& poly) {
  double d = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) d = std::min(d, distance_to_segment(q, poly[i], poly[(i + 1) % n]));
  return d;
}

Location point_in_polygon(const Point2& q, const std::vector<Point2>& poly, double tol) {
  if (tol < 0) tol = geom_eps();
  if (distance_to_boundary(q, poly) <= tol) return Location::kBoundary;
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.y() > q.y()) != (b.y() > q.y())) {
      const double x = a.x() + (q.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (q.x() < x) inside = !inside;
    }
  }
  return inside ? Location::kInside : Location::kOutside;
}

double distance_to_polygon(const Point2& q, const Polygon& p) {
  if (point_in_polygon(q, p, 0.0) != Location::kOutside) return 0.0;
  return distance_to_boundary(q, p.vertices());
}

double polygon_distance(const Polygon& a, const Polygon& b) {
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  for (std::size_t i = 0; i < va.size(); ++i)
    for (std::size_t j = 0; j < vb.size(); ++j)
      if (segments_intersect(va[i], a.vertex(i + 1), vb[j], b.vertex(j + 1))) return 0.0;
  if (point_in_polygon(va[0], b, 0.0) != Location::kOutside) return 0.0;
  if (point_in_polygon(vb[0], a, 0.0) != Location::kOutside) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : va) d = std::min(d, distance_to_boundary(p, vb));
  for (const auto& p : vb) d = std::min(d, distance_to_boundary(p, va));
  return d;
}

ConvexPolygon convex_hull(const std::vector<Point2>& points) {
  std::vector<Point2> pts = points;
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) { return a == b; }),
            pts.end());
  if (pts.size() < 3) throw Error(ErrorCode::kDegenerateInput, "fewer than 3 distinct points");
  std::vector<Point2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && orient(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && orient(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  double per = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) per += (h[(i + 1) % h.size()] - h[i]).norm();
  if (h.size() < 3 || signed_area(h) <= geom_eps() * per)
    throw Error(ErrorCode::kDegenerateInput, "points are collinear");
  return ConvexPolygon(std::move(h));
}

Point2 project_to_convex(const Point2& q, const std::vector<Point2>& c) {
  const std::size_t n = c.size();
  bool inside = true;
  for (std::size_t i = 0; i < n && inside; ++i)
    if (orient(c[i], c[(i + 1) % n], q) < 0) inside = false;
  if (inside) return q;
  Point2 best = c[0];
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = closest_on_segment(q, c[i], c[(i + 1) % n]);
    const double d = (p - q).squaredNorm();
    if (d < bd) {
      bd = d;
      best = p;
    }
  }
  return best;
}

Point2 project_to_convex(const Point2& q, const ConvexPolygon& c) { return project_to_convex(q, c.vertices()); }

std::vector<Point2> clip_convex(const std::vector<Point2>& poly, const Point2& anchor, const Vec2& normal) {
  std::vector<Point2> out;
  const std::size_t n = poly.size();
  if (n == 0) return out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    const double da = (a - anchor).dot(normal);
    const double db = (b - anchor).dot(normal);
    if (da >= 0) out.push_back(a);
    if ((da >= 0) != (db >= 0)) {
      const double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  // Drop near-duplicates created by clipping through a vertex.
  std::vector<Point2> clean;
  clean.reserve(out.size());
  const double tol = 1e-12;
  for (const auto& p : out)
    if (clean.empty() || (p - clean.back()).norm() > tol) clean.push_back(p);
  while (clean.size() > 1 && (clean.front() - clean.back()).norm() <= tol) clean.pop_back();
  if (clean.size() < 3) clean.clear();
  return clean;
}

std::vector<Point2> intersect_convex(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  std::vector<Point2> r = a;
  const std::size_t n = b.size();
  for (std::size_t i = 0; i < n && !r.empty(); ++i) r = clip_convex(r, b[i], rot90(b[(i + 1) % n] - b[i]));
  return r;
}

bool convex_overlap(const std::vector<Point2>& a, const std::vector<Point2>& b, double tol) {
  const auto r = intersect_convex(a, b);
  return !r.empty() && signed_area(r) > tol;
}

std::optional<double> ray_cast(const Point2& origin, const Vec2& dir, const std::vector<Point2>& poly) {
  std::optional<double> best;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Vec2 e = poly[(i + 1) % n] - a;
    const double den = cross(dir, e);
    if (den == 0.0) continue;
    const Vec2 w = a - origin;
    const double t = cross(w, e) / den;
    const double s = cross(w, dir) / den;
    if (t >= 0 && s >= 0 && s <= 1 && (!best || t < *best)) best = t;
  }
  return best;
}

Polygon transform(const Polygon& p, const Pose2& pose) {
  const double c = std::cos(pose.theta), s = std::sin(pose.theta);
  std::vector<Point2> v;
  v.reserve(p.size());
  for (const auto& q : p.vertices()) v.emplace_back(c * q.x() - s * q.y() + pose.x, s * q.x() + c * q.y() + pose.y);
  return Polygon(std::move(v));
}

}  // namespace semnav
