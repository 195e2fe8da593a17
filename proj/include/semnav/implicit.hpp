#pragma once

#include <vector>

#include "semnav/geometry.hpp"
#include "semnav/jet.hpp"

namespace semnav {

struct Halfplane {
  Point2 anchor = Point2::Zero();
  Vec2 normal = Vec2::UnitX();  // unit, toward the interior
};

double halfplane_eval(const Halfplane& h, const Point2& x);

enum class RKind { kAnd, kOr, kNot };

// and/or take exactly two values, not takes one.
double r_combine(RKind kind, const std::vector<double>& values, int p);

enum class NodeKind { kLeaf, kAnd, kOr, kNot };

struct ImplicitNode {
  NodeKind kind = NodeKind::kLeaf;
  Halfplane leaf;
  std::vector<ImplicitNode> children;
};

struct ImplicitTree {
  ImplicitNode root;
  int power = 2;
  std::vector<Point2> vertices;  // polygon corners, where the function is not smooth
};

// beta < 0 inside, 0 on the boundary, > 0 outside.
ImplicitTree build_polygon_implicit(const Polygon& p, int power);
ImplicitTree build_polygon_implicit(const std::vector<Point2>& ccw_vertices, int power);
// Conjunction of the edge half-planes of a convex polygon: > 0 inside.
ImplicitTree build_convex_inside(const std::vector<Point2>& ccw_vertices, int power);

double implicit_eval(const ImplicitTree& t, const Point2& x);
// Throws SingularPoint within tolerance of a polygon vertex.
Vec2 implicit_grad(const ImplicitTree& t, const Point2& x);
Jet implicit_jet(const ImplicitTree& t, const Point2& x);

int count_leaves(const ImplicitNode& n);

}  // namespace semnav
