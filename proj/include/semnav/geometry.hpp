#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace semnav {

using Point2 = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Global geometric tolerance in meters. Defaults to 1e-9, may be overridden by
// the SEMNAV_EPS environment variable or by a scenario file.
double geom_eps();
void set_geom_eps(double eps);

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }
inline Vec2 rot90(const Vec2& v) { return Vec2(-v.y(), v.x()); }
inline double orient(const Point2& a, const Point2& b, const Point2& c) { return cross(b - a, c - a); }

double signed_area(const std::vector<Point2>& pts);
bool is_convex_ccw(const std::vector<Point2>& pts, double tol = 0.0);

class Polygon {
 public:
  Polygon() = default;
  // Normalizes the input: removes duplicate consecutive vertices, flips
  // clockwise input to counterclockwise. Throws DegeneratePolygon or
  // TopologyError when the result is not a valid simple polygon.
  explicit Polygon(std::vector<Point2> vertices);

  const std::vector<Point2>& vertices() const { return v_; }
  std::size_t size() const { return v_.size(); }
  const Point2& operator[](std::size_t i) const { return v_[i]; }
  const Point2& vertex(std::size_t i) const { return v_[i % v_.size()]; }
  bool empty() const { return v_.empty(); }

  double area() const;
  double perimeter() const;
  Point2 centroid() const;
  double diameter() const;
  std::pair<Point2, Point2> bbox() const;

 protected:
  struct Trusted {};
  Polygon(Trusted, std::vector<Point2> v) : v_(std::move(v)) {}
  std::vector<Point2> v_;

  friend Polygon trusted_polygon(std::vector<Point2> v);
};

// Skips validation; for results the caller already knows to be valid.
Polygon trusted_polygon(std::vector<Point2> v);

class ConvexPolygon : public Polygon {
 public:
  ConvexPolygon() = default;
  explicit ConvexPolygon(std::vector<Point2> vertices);
  explicit ConvexPolygon(const Polygon& p);
};

struct Triangle {
  Point2 v1, v2, v3;
  double area() const { return 0.5 * orient(v1, v2, v3); }
  Point2 centroid() const { return (v1 + v2 + v3) / 3.0; }
  std::vector<Point2> points() const { return {v1, v2, v3}; }
};

enum class Location { kInside, kBoundary, kOutside };

Location point_in_polygon(const Point2& q, const std::vector<Point2>& poly, double tol = -1.0);
inline Location point_in_polygon(const Point2& q, const Polygon& p, double tol = -1.0) {
  return point_in_polygon(q, p.vertices(), tol);
}

double distance_to_segment(const Point2& q, const Point2& a, const Point2& b);
Point2 closest_on_segment(const Point2& q, const Point2& a, const Point2& b);
double distance_to_boundary(const Point2& q, const std::vector<Point2>& poly);
// Zero inside, distance to the boundary outside.
double distance_to_polygon(const Point2& q, const Polygon& p);
double polygon_distance(const Polygon& a, const Polygon& b);

ConvexPolygon convex_hull(const std::vector<Point2>& points);
Point2 project_to_convex(const Point2& q, const ConvexPolygon& c);
Point2 project_to_convex(const Point2& q, const std::vector<Point2>& c);

// Keeps the part of a convex polygon where (x - anchor).normal >= 0.
std::vector<Point2> clip_convex(const std::vector<Point2>& poly, const Point2& anchor,
                                const Vec2& normal);
std::vector<Point2> intersect_convex(const std::vector<Point2>& a, const std::vector<Point2>& b);
// True when the interiors of two convex polygons overlap by more than tol.
bool convex_overlap(const std::vector<Point2>& a, const std::vector<Point2>& b, double tol);

// Nearest intersection parameter t >= 0 of origin + t*dir with the polygon boundary.
std::optional<double> ray_cast(const Point2& origin, const Vec2& dir, const std::vector<Point2>& poly);

bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d);

enum class BoolOp { kUnion, kIntersection, kDifference };

// Backed by Boost.Geometry. Components with holes raise TopologyError.
std::vector<Polygon> boolean_op(BoolOp kind, const std::vector<Polygon>& a,
                                const std::vector<Polygon>& b);
// Union of a set of polygons; with outer_only the holes are filled instead of rejected.
std::vector<Polygon> union_all(const std::vector<Polygon>& polys, bool outer_only = false);

// Conservative Minkowski sum with a disk of radius r.
Polygon dilate(const Polygon& p, double r);
ConvexPolygon dilate_convex(const std::vector<Point2>& c, double r);
// Number of sides of the circumscribed disk approximation used by dilate.
int dilation_sides();

struct Triangulation {
  std::vector<Point2> vertices;  // polygon vertices after collinear merging
  std::vector<std::array<int, 3>> triangles;  // CCW index triples
  std::vector<std::pair<int, int>> dual_edges;  // pairs of adjacent triangles
  Triangle triangle(std::size_t i) const {
    const auto& t = triangles[i];
    return {vertices[t[0]], vertices[t[1]], vertices[t[2]]};
  }
};

std::vector<Point2> merge_collinear(const std::vector<Point2>& v, double tol);
Triangulation ear_clip(const Polygon& p);

enum class TreeMode { kInterior, kBoundary };

struct TreeNode {
  // CCW. For a non-root node v1v2 is the edge shared with the parent; for a
  // boundary root v1v2 lies on the enclosing boundary.
  Triangle tri;
  int parent = -1;
  int depth = 0;
  std::vector<int> children;
};

struct NodePurge {
  Point2 center = Point2::Zero();
  std::vector<Point2> collar;  // convex, CCW
  std::vector<Point2> gamma;   // convex, CCW
  double radius = 0.0;         // root disk only
};

struct TriangleTree {
  std::vector<TreeNode> nodes;
  int root = 0;
  TreeMode mode = TreeMode::kInterior;
  std::vector<int> purge_order;  // non-root nodes by descending depth, then root
  std::vector<NodePurge> purge;  // filled by compute_collars
};

TriangleTree build_triangle_tree(const Polygon& p, TreeMode mode,
                                 const ConvexPolygon* boundary = nullptr);

// Hertel-Mehlhorn decomposition.
std::vector<ConvexPolygon> convex_decompose(const Polygon& p);

struct Pose2 {
  double x = 0, y = 0, theta = 0;
};
Polygon transform(const Polygon& p, const Pose2& pose);

}  // namespace semnav
