#define BOOST_GEOMETRY_NO_ROBUSTNESS
#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <cmath>
#include <numbers>

#include "semnav/errors.hpp"
#include "semnav/geometry.hpp"

namespace bg = boost::geometry;

namespace semnav {

namespace {

using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint, false, false>;
using BMulti = bg::model::multi_polygon<BPolygon>;

BPolygon to_boost(const Polygon& p) {
  BPolygon b;
  for (const auto& v : p.vertices()) b.outer().emplace_back(v.x(), v.y());
  return b;
}

std::vector<Point2> ring_points(const BPolygon::ring_type& ring) {
  std::vector<Point2> pts;
  pts.reserve(ring.size());
  for (const auto& q : ring) pts.emplace_back(q.x(), q.y());
  return pts;
}

std::vector<Polygon> from_boost(const BMulti& m, bool outer_only) {
  std::vector<Polygon> out;
  const double eps = geom_eps();
  for (const auto& bp : m) {
    std::vector<Point2> pts = merge_collinear(ring_points(bp.outer()), eps);
    if (pts.size() < 3) continue;
    double per = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) per += (pts[(i + 1) % pts.size()] - pts[i]).norm();
    const double a = std::abs(signed_area(pts));
    if (a <= 10.0 * eps * per) continue;  // sliver left over from rounding
    if (!outer_only) {
      for (const auto& inner : bp.inners()) {
        const double ia = std::abs(signed_area(ring_points(inner)));
        if (ia > 10.0 * eps * per) throw Error(ErrorCode::kTopologyError, "boolean result has a hole");
      }
    }
    out.emplace_back(std::move(pts));
  }
  return out;
}

BMulti to_multi(const std::vector<Polygon>& polys) {
  BMulti acc;
  for (const auto& p : polys) {
    BMulti next;
    bg::union_(acc, to_boost(p), next);
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

std::vector<Polygon> boolean_op(BoolOp kind, const std::vector<Polygon>& a, const std::vector<Polygon>& b) {
  const BMulti ma = to_multi(a);
  const BMulti mb = to_multi(b);
  BMulti out;
  switch (kind) {
    case BoolOp::kUnion: bg::union_(ma, mb, out); break;
    case BoolOp::kIntersection: bg::intersection(ma, mb, out); break;
    case BoolOp::kDifference: bg::difference(ma, mb, out); break;
  }
  return from_boost(out, false);
}

std::vector<Polygon> union_all(const std::vector<Polygon>& polys, bool outer_only) {
  return from_boost(to_multi(polys), outer_only);
}

int dilation_sides() {
  // Circumscribed k-gon: its boundary stays within 1% of r outside the disk.
  static const int k = [] {
    int n = 3;
    while (1.0 / std::cos(std::numbers::pi / n) - 1.0 >= 0.01) ++n;
    return n;
  }();
  return k;
}

namespace {

std::vector<Point2> disk_polygon(double r) {
  const int k = dilation_sides();
  const double rc = r / std::cos(std::numbers::pi / k);
  std::vector<Point2> d;
  d.reserve(k);
  for (int i = 0; i < k; ++i) {
    const double a = 2.0 * std::numbers::pi * i / k;
    d.emplace_back(rc * std::cos(a), rc * std::sin(a));
  }
  return d;
}

std::vector<Point2> minkowski_convex(const std::vector<Point2>& c, const std::vector<Point2>& disk) {
  std::vector<Point2> pts;
  pts.reserve(c.size() * disk.size());
  for (const auto& p : c)
    for (const auto& d : disk) pts.push_back(p + d);
  return convex_hull(pts).vertices();
}

}  // namespace

ConvexPolygon dilate_convex(const std::vector<Point2>& c, double r) {
  if (r < 0) throw Error(ErrorCode::kNegativeRadius, "dilation radius is negative");
  if (r == 0) return ConvexPolygon(c);
  return ConvexPolygon(minkowski_convex(c, disk_polygon(r)));
}

namespace {

double segment_gap(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({distance_to_segment(a, c, d), distance_to_segment(b, c, d), distance_to_segment(c, a, b),
                   distance_to_segment(d, a, b)});
}

// Offsets every edge by r and closes convex corners with a circumscribed
// polygonal arc whose pieces span at most a right angle. Returns nothing when
// the offset ring is not simple or fails the containment check.
std::optional<Polygon> offset_dilate(const Polygon& p, double r) {
  const auto& v = p.vertices();
  const std::size_t n = v.size();
  std::vector<Point2> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& prev = v[(i + n - 1) % n];
    const Point2& cur = v[i];
    const Point2& next = v[(i + 1) % n];
    const Vec2 n1 = -rot90(cur - prev).normalized();
    const Vec2 n2 = -rot90(next - cur).normalized();
    const double turn = std::atan2(cross(n1, n2), n1.dot(n2));
    if (turn > 1e-12) {
      const int m = static_cast<int>(std::ceil(turn / (0.5 * std::numbers::pi) - 1e-9));
      const double step = turn / m;
      const double a1 = std::atan2(n1.y(), n1.x());
      const double rc = r / std::cos(0.5 * step);
      for (int j = 0; j < m; ++j) {
        const double a = a1 + (j + 0.5) * step;
        out.push_back(cur + rc * Vec2(std::cos(a), std::sin(a)));
      }
    } else if (turn < -1e-12) {
      const double den = 1.0 + n1.dot(n2);
      if (den < 1e-6) return std::nullopt;
      out.push_back(cur + r * (n1 + n2) / den);
    } else {
      out.push_back(cur + r * n1);
    }
  }
  Polygon q;
  try {
    q = Polygon(out);
  } catch (const Error&) {
    return std::nullopt;
  }
  for (const auto& x : v)
    if (point_in_polygon(x, q, 0.0) != Location::kInside) return std::nullopt;
  const auto& w = q.vertices();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < w.size(); ++j)
      if (segment_gap(v[i], v[(i + 1) % n], w[j], w[(j + 1) % w.size()]) < r * (1.0 - 1e-9)) return std::nullopt;
  return q;
}

}  // namespace

Polygon dilate(const Polygon& p, double r) {
  if (r < 0) throw Error(ErrorCode::kNegativeRadius, "dilation radius is negative");
  if (r == 0) return p;
  if (auto q = offset_dilate(p, r)) return *q;
  const auto disk = disk_polygon(r);
  const Triangulation tri = ear_clip(p);
  std::vector<Polygon> pieces;
  pieces.reserve(tri.triangles.size());
  for (std::size_t i = 0; i < tri.triangles.size(); ++i)
    pieces.push_back(trusted_polygon(minkowski_convex(tri.triangle(i).points(), disk)));
  auto u = union_all(pieces, true);
  if (u.size() != 1) throw Error(ErrorCode::kTopologyError, "dilation produced several components");
  return u.front();
}

}  // namespace semnav
