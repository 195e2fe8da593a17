#include <gtest/gtest.h>

#include <functional>
#include <numeric>
#include <set>

#include "semnav/errors.hpp"
#include "semnav/geometry.hpp"
#include "support.hpp"

using namespace semnav;
using oracle::P;

namespace {

Polygon unit_square() { return Polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

std::vector<P> L_shape() { return {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}; }

bool dual_is_tree(const Triangulation& t) {
  const int n = static_cast<int>(t.triangles.size());
  if (static_cast<int>(t.dual_edges.size()) != n - 1) return false;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); };
  for (auto [a, b] : t.dual_edges) {
    const int ra = find(a), rb = find(b);
    if (ra == rb) return false;  // cycle
    parent[ra] = rb;
  }
  return true;
}

double tri_area_sum(const Triangulation& t) {
  double a = 0;
  for (std::size_t i = 0; i < t.triangles.size(); ++i) a += t.triangle(i).area();
  return a;
}

}  // namespace

TEST(Polygon, NormalizesOrientationAndDuplicates) {
  Polygon p({{0, 0}, {0, 1}, {1, 1}, {1, 1}, {1, 0}});
  EXPECT_EQ(p.size(), 4u);
  EXPECT_GT(signed_area(p.vertices()), 0);
  EXPECT_NEAR(p.area(), 1.0, 1e-15);
}

TEST(Polygon, RejectsBowtieAndDegenerate) {
  EXPECT_THROW(Polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), Error);
  EXPECT_THROW(Polygon({{0, 0}, {1, 0}, {2, 0}}), Error);
  EXPECT_THROW(Polygon({{0, 0}, {1, 0}}), Error);
}

TEST(ConvexHull, SquareIsItsOwnHull) {
  const auto h = convex_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  EXPECT_EQ(h.size(), 4u);
  EXPECT_NEAR(h.area(), 1.0, 1e-15);
}

TEST(ConvexHull, InteriorPointAbsorbed) {
  const auto h = convex_hull({{0, 0}, {1, 0}, {0.5, 0.5}, {1, 1}, {0, 1}});
  EXPECT_EQ(h.size(), 4u);
}

TEST(ConvexHull, RandomDiskPointsAllInside) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point2> pts;
    while (pts.size() < 100) {
      P q(U(rng), U(rng));
      if (q.norm() <= 1) pts.push_back(q);
    }
    const auto h = convex_hull(pts);
    EXPECT_TRUE(oracle::convex_ccw(h.vertices()));
    for (const auto& q : pts) {
      const bool in = oracle::inside(q, h.vertices()) || oracle::boundary_dist(q, h.vertices()) < 1e-12;
      ASSERT_TRUE(in);
    }
  }
}

TEST(Boolean, DisjointUnionKeepsTwoComponents) {
  Polygon a({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  Polygon b({{3, 0}, {4, 0}, {4, 1}, {3, 1}});
  EXPECT_EQ(boolean_op(BoolOp::kUnion, {a}, {b}).size(), 2u);
}

TEST(Boolean, HalfOverlapUnionAreaMonteCarlo) {
  Polygon a({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  Polygon b({{0.5, 0}, {1.5, 0}, {1.5, 1}, {0.5, 1}});
  const auto u = boolean_op(BoolOp::kUnion, {a}, {b});
  ASSERT_EQ(u.size(), 1u);
  // Monte-Carlo area of the result, 1e6 samples in the box [0,2]x[0,1].
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> X(0, 2), Y(0, 1);
  int hits = 0;
  const int N = 1000000;
  for (int i = 0; i < N; ++i) hits += oracle::inside(P(X(rng), Y(rng)), u[0].vertices());
  EXPECT_NEAR(2.0 * hits / N, 1.5, 1e-2);
}

TEST(Boolean, IntersectionWithSelfIsIdempotent) {
  const auto r = boolean_op(BoolOp::kIntersection, {unit_square()}, {unit_square()});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0].area(), 1.0, 1e-12);
}

TEST(Boolean, HoleIsRejected) {
  Polygon outer({{0, 0}, {4, 0}, {4, 4}, {0, 4}});
  Polygon inner({{1, 1}, {3, 1}, {3, 3}, {1, 3}});
  EXPECT_THROW(boolean_op(BoolOp::kDifference, {outer}, {inner}), Error);
}

TEST(Boolean, UnionCommutativeOnArea) {
  std::mt19937 rng(5);
  for (int t = 0; t < 30; ++t) {
    Polygon a(oracle::star_polygon(rng, 7, P(0, 0), 0.5, 1.0));
    Polygon b(oracle::star_polygon(rng, 6, P(0.6, 0.3), 0.5, 1.0));
    auto area = [](const std::vector<Polygon>& v) {
      double s = 0;
      for (const auto& p : v) s += p.area();
      return s;
    };
    const double ab = area(boolean_op(BoolOp::kUnion, {a}, {b}));
    const double ba = area(boolean_op(BoolOp::kUnion, {b}, {a}));
    const double aa = area(boolean_op(BoolOp::kUnion, {a}, {a}));
    EXPECT_NEAR(ab, ba, 1e-9 * ab);
    EXPECT_NEAR(aa, a.area(), 1e-9 * a.area());
  }
}

TEST(Dilate, ZeroRadiusIsIdentity) {
  const Polygon d = dilate(unit_square(), 0.0);
  EXPECT_NEAR(d.area(), 1.0, 1e-12);
}

TEST(Dilate, NegativeRadiusRejected) { EXPECT_THROW(dilate(unit_square(), -0.1), Error); }

TEST(Dilate, ContainsEveryPointWithinR) {
  const double r = 0.1;
  const Polygon d = dilate(unit_square(), r);
  const auto sq = unit_square().vertices();
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> U(-0.2, 1.2);
  int checked = 0;
  while (checked < 1000) {
    const P q(U(rng), U(rng));
    const bool near = oracle::inside(q, sq) || oracle::boundary_dist(q, sq) <= r;
    if (!near) continue;
    ++checked;
    ASSERT_TRUE(oracle::inside(q, d.vertices()) || oracle::boundary_dist(q, d.vertices()) < 1e-12);
  }
}

TEST(Dilate, SteinerLowerBound) {
  const Polygon t({{0, 0}, {2, 0}, {0.5, 1.5}});
  const double r = 0.2;
  EXPECT_GE(dilate(t, r).area(), t.area() + t.perimeter() * r);
}

TEST(Dilate, NonConvexStaysConservative) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int t = 0; t < 10; ++t) {
    const auto src = oracle::star_polygon(rng, 9, P(0, 0), 0.6, 1.2);
    const double r = 0.15;
    const Polygon d = dilate(Polygon(src), r);
    for (int k = 0; k < 2000; ++k) {
      const P q(U(rng), U(rng));
      if (!(oracle::inside(q, src) || oracle::boundary_dist(q, src) <= r)) continue;
      ASSERT_TRUE(oracle::inside(q, d.vertices()) || oracle::boundary_dist(q, d.vertices()) < 1e-9);
    }
  }
}

TEST(Dilate, Monotone) {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> U(-2, 2);
  const auto src = oracle::star_polygon(rng, 8, P(0, 0), 0.5, 1.0);
  const Polygon d1 = dilate(Polygon(src), 0.1), d2 = dilate(Polygon(src), 0.3);
  for (int k = 0; k < 5000; ++k) {
    const P q(U(rng), U(rng));
    if (oracle::inside(q, d1.vertices())) ASSERT_TRUE(oracle::inside(q, d2.vertices()));
  }
}

TEST(EarClip, TriangleGivesOneTriangle) {
  const auto t = ear_clip(Polygon({{0, 0}, {1, 0}, {0, 1}}));
  EXPECT_EQ(t.triangles.size(), 1u);
  EXPECT_TRUE(t.dual_edges.empty());
}

TEST(EarClip, QuadGivesTwoTriangles) {
  const auto t = ear_clip(Polygon({{0, 0}, {2, 0}, {2.5, 1}, {0, 1.2}}));
  EXPECT_EQ(t.triangles.size(), 2u);
  EXPECT_EQ(t.dual_edges.size(), 1u);
}

TEST(EarClip, CollinearVerticesMerged) {
  const auto t = ear_clip(Polygon({{0, 0}, {1, 0}, {2, 0}, {2, 2}, {0, 2}}));
  EXPECT_EQ(t.vertices.size(), 4u);
  EXPECT_EQ(t.triangles.size(), 2u);
}

TEST(EarClip, RandomPolygonsGiveTreeDuals) {
  std::mt19937 rng(42);
  for (int n = 4; n <= 30; ++n) {
    for (int rep = 0; rep < 4; ++rep) {
      const auto v = oracle::star_polygon(rng, n, P(0, 0), 0.3, 1.0);
      const auto t = ear_clip(Polygon(v));
      ASSERT_EQ(t.triangles.size(), t.vertices.size() - 2);
      ASSERT_TRUE(dual_is_tree(t)) << "n=" << n;
      ASSERT_NEAR(tri_area_sum(t), oracle::area(v), 1e-9);
      for (std::size_t i = 0; i < t.triangles.size(); ++i) ASSERT_GT(t.triangle(i).area(), 0);
    }
  }
}

TEST(EarClip, Random12GonGivesTenTriangles) {
  std::mt19937 rng(12);
  const auto t = ear_clip(Polygon(oracle::star_polygon(rng, 12, P(0, 0), 0.4, 1.0)));
  EXPECT_EQ(t.triangles.size(), 10u);
  EXPECT_TRUE(dual_is_tree(t));
}

TEST(TriangleTree, ConvexQuadRootIsLargerTriangle) {
  const Polygon q({{0, 0}, {3, 0}, {3, 1}, {0, 3}});
  const auto tree = build_triangle_tree(q, TreeMode::kInterior);
  ASSERT_EQ(tree.nodes.size(), 2u);
  const double ar = tree.nodes[tree.root].tri.area();
  const double ao = tree.nodes[1 - tree.root].tri.area();
  EXPECT_GE(ar, ao);
  EXPECT_EQ(tree.purge_order.back(), tree.root);
}

TEST(TriangleTree, LShapeDepthOrder) {
  const auto tree = build_triangle_tree(Polygon(L_shape()), TreeMode::kInterior);
  EXPECT_EQ(tree.nodes.size(), 4u);
  EXPECT_EQ(tree.purge_order.back(), tree.root);
  // Oracle: recompute depths by walking parents.
  for (std::size_t i = 0; i + 1 < tree.purge_order.size(); ++i) {
    auto depth = [&](int n) {
      int d = 0;
      while (tree.nodes[n].parent >= 0) n = tree.nodes[n].parent, ++d;
      return d;
    };
    EXPECT_GE(depth(tree.purge_order[i]), depth(tree.purge_order[i + 1]));
  }
}

TEST(TriangleTree, ChildSharesExactlyOneEdgeWithParent) {
  std::mt19937 rng(9);
  for (int rep = 0; rep < 40; ++rep) {
    const auto tree = build_triangle_tree(Polygon(oracle::star_polygon(rng, 11, P(0, 0), 0.3, 1.0)), TreeMode::kInterior);
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const auto& n = tree.nodes[i];
      if (n.parent < 0) continue;
      const auto& p = tree.nodes[n.parent].tri;
      int shared = 0;
      for (const auto& a : n.tri.points())
        for (const auto& b : p.points()) shared += (a - b).norm() < 1e-12;
      ASSERT_EQ(shared, 2);
      // v1v2 is the shared edge.
      auto on = [&](const Point2& x) { return (x - p.v1).norm() < 1e-12 || (x - p.v2).norm() < 1e-12 || (x - p.v3).norm() < 1e-12; };
      ASSERT_TRUE(on(n.tri.v1) && on(n.tri.v2));
      ASSERT_GT(n.tri.area(), 0);
    }
  }
}

TEST(TriangleTree, BoundaryModeRootEdgeOnBoundary) {
  const ConvexPolygon box({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
  const Polygon clipped({{4, 0}, {6, 0}, {6, 1}, {4, 1}});
  const auto tree = build_triangle_tree(clipped, TreeMode::kBoundary, &box);
  const auto& r = tree.nodes[tree.root].tri;
  EXPECT_NEAR(r.v1.y(), 0.0, 1e-12);
  EXPECT_NEAR(r.v2.y(), 0.0, 1e-12);
}

TEST(TriangleTree, BoundaryModeWithoutContactThrows) {
  const ConvexPolygon box({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
  try {
    build_triangle_tree(Polygon({{4, 4}, {6, 4}, {6, 6}, {4, 6}}), TreeMode::kBoundary, &box);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoBoundaryAdjacentTriangle);
  }
}

TEST(ConvexDecompose, ConvexInputSinglePiece) {
  const auto d = convex_decompose(unit_square());
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NEAR(d[0].area(), 1.0, 1e-12);
}

TEST(ConvexDecompose, LShapeAreaSum) {
  const auto d = convex_decompose(Polygon(L_shape()));
  EXPECT_GE(d.size(), 2u);
  double a = 0;
  for (const auto& p : d) a += p.area();
  EXPECT_NEAR(a, 3.0, 1e-12);
}

TEST(ConvexDecompose, StarPiecesConvex) {
  std::vector<P> star;
  for (int i = 0; i < 10; ++i) {
    const double r = i % 2 ? 0.4 : 1.0;
    star.push_back(r * P(std::cos(M_PI / 2 + i * M_PI / 5), std::sin(M_PI / 2 + i * M_PI / 5)));
  }
  const auto d = convex_decompose(Polygon(star));
  double a = 0;
  for (const auto& p : d) {
    EXPECT_TRUE(oracle::convex_ccw(p.vertices(), 1e-12));
    a += p.area();
  }
  EXPECT_NEAR(a, oracle::area(star), 1e-12);
}

TEST(Project, InteriorAndFaces) {
  const ConvexPolygon sq({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  EXPECT_LT((project_to_convex(Point2(0.5, 0.5), sq) - Point2(0.5, 0.5)).norm(), 1e-15);
  EXPECT_LT((project_to_convex(Point2(2, 0.5), sq) - Point2(1, 0.5)).norm(), 1e-15);
  EXPECT_LT((project_to_convex(Point2(2, 2), sq) - Point2(1, 1)).norm(), 1e-15);
}

TEST(Project, MatchesDenseBoundarySampling) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int t = 0; t < 20; ++t) {
    std::vector<Point2> pts;
    for (int i = 0; i < 12; ++i) pts.emplace_back(U(rng) / 2, U(rng) / 2);
    const auto c = convex_hull(pts);
    const P q(U(rng), U(rng));
    if (oracle::inside(q, c.vertices())) continue;
    double best = 1e300;
    const auto& v = c.vertices();
    for (std::size_t i = 0; i < v.size(); ++i)
      for (int k = 0; k <= 10000 / static_cast<int>(v.size()); ++k) {
        const double s = static_cast<double>(k) / (10000 / v.size());
        best = std::min(best, (q - (v[i] + s * (v[(i + 1) % v.size()] - v[i]))).norm());
      }
    const Point2 p = project_to_convex(q, c);
    EXPECT_LE((q - p).norm(), best + 1e-12);
    EXPECT_NEAR((q - p).norm(), best, 1e-3);
    EXPECT_LT((project_to_convex(p, c) - p).norm(), 1e-12);  // idempotent
  }
}

TEST(PointInPolygon, UnitSquare) {
  const auto sq = unit_square();
  EXPECT_EQ(point_in_polygon(Point2(0.5, 0.5), sq), Location::kInside);
  EXPECT_EQ(point_in_polygon(Point2(1, 0.5), sq), Location::kBoundary);
  EXPECT_EQ(point_in_polygon(Point2(1.5, 0.5), sq), Location::kOutside);
}

TEST(PointInPolygon, AgreesWithWindingNumber) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int t = 0; t < 10; ++t) {
    const auto v = oracle::star_polygon(rng, 13, P(0, 0), 0.3, 1.2);
    const Polygon p(v);
    for (int k = 0; k < 2000; ++k) {
      const P q(U(rng), U(rng));
      if (oracle::boundary_dist(q, v) < 1e-9) continue;
      ASSERT_EQ(point_in_polygon(q, p) == Location::kInside, oracle::inside(q, v));
    }
  }
}

TEST(Distance, PolygonDistanceMatchesBruteForce) {
  const Polygon a({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const Polygon b({{3, 0.5}, {4, 0.5}, {4, 2}});
  EXPECT_NEAR(polygon_distance(a, b), 2.0, 1e-12);
  EXPECT_NEAR(distance_to_polygon(Point2(0.5, 0.5), a), 0.0, 0.0);
  EXPECT_NEAR(distance_to_polygon(Point2(2, 2), a), std::sqrt(2.0), 1e-12);
}

TEST(RayCast, HitsSquareAnalytically) {
  const auto sq = unit_square().vertices();
  const auto t = ray_cast(Point2(-2, 0.25), Vec2(1, 0), sq);
  ASSERT_TRUE(t.has_value());
  EXPECT_NEAR(*t, 2.0, 1e-12);
  EXPECT_FALSE(ray_cast(Point2(-2, 2), Vec2(1, 0), sq).has_value());
}

TEST(Transform, RotatesAndTranslates) {
  const Polygon p = transform(unit_square(), {2, 3, M_PI / 2});
  EXPECT_NEAR(p.area(), 1.0, 1e-12);
  bool found = false;
  for (const auto& v : p.vertices()) found |= (v - Point2(1, 4)).norm() < 1e-12;  // (1,1) -> (-1,1) + (2,3)
  EXPECT_TRUE(found);
}

TEST(Eps, OverrideRejectsNonPositive) {
  EXPECT_THROW(set_geom_eps(0.0), Error);
  EXPECT_THROW(set_geom_eps(-1.0), Error);
}
