#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>

#include "semnav/errors.hpp"
#include "semnav/geometry.hpp"

namespace semnav {

std::vector<Point2> merge_collinear(const std::vector<Point2>& v, double tol) {
  std::vector<Point2> out = v;
  bool changed = true;
  while (changed && out.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < out.size() && out.size() > 3; ++i) {
      const std::size_t n = out.size();
      const Point2& a = out[(i + n - 1) % n];
      const Point2& b = out[i];
      const Point2& c = out[(i + 1) % n];
      const double base = (c - a).norm();
      const bool dup = (b - a).norm() <= tol || (c - b).norm() <= tol;
      const bool straight =
          base > 0 && std::abs(orient(a, b, c)) / base <= tol && (b - a).dot(c - b) > 0;
      if (dup || straight) {
        out.erase(out.begin() + static_cast<long>(i));
        changed = true;
        --i;
      }
    }
  }
  return out;
}

namespace {

double min_angle(const Point2& a, const Point2& b, const Point2& c) {
  auto ang = [](const Point2& p, const Point2& q, const Point2& r) {
    const Vec2 u = q - p, w = r - p;
    return std::atan2(std::abs(cross(u, w)), u.dot(w));
  };
  return std::min({ang(a, b, c), ang(b, c, a), ang(c, a, b)});
}

bool in_closed_triangle(const Point2& q, const Point2& a, const Point2& b, const Point2& c) {
  return orient(a, b, q) >= 0 && orient(b, c, q) >= 0 && orient(c, a, q) >= 0;
}

std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

Triangulation ear_clip(const Polygon& p) {
  Triangulation out;
  const double eps = geom_eps();
  out.vertices = merge_collinear(p.vertices(), eps);
  const int n = static_cast<int>(out.vertices.size());
  if (n < 3) throw Error(ErrorCode::kDegeneratePolygon, "polygon collapses after collinear merge");
  const auto& v = out.vertices;

  std::vector<int> ring(n);
  for (int i = 0; i < n; ++i) ring[i] = i;

  while (ring.size() > 3) {
    const int m = static_cast<int>(ring.size());
    int best = -1;
    double best_q = -1.0;
    for (int k = 0; k < m; ++k) {
      const int ia = ring[(k + m - 1) % m], ib = ring[k], ic = ring[(k + 1) % m];
      const Point2 &a = v[ia], &b = v[ib], &c = v[ic];
      if (orient(a, b, c) <= eps * (c - a).norm()) continue;
      bool blocked = false;
      for (int j = 0; j < m && !blocked; ++j) {
        const int iq = ring[j];
        if (iq == ia || iq == ib || iq == ic) continue;
        blocked = in_closed_triangle(v[iq], a, b, c);
      }
      if (blocked) continue;
      // Prefer the best-shaped ear to keep slivers out of the tree.
      const double q = min_angle(a, b, c);
      if (q > best_q) {
        best_q = q;
        best = k;
      }
    }
    if (best < 0) throw Error(ErrorCode::kDegenerateVertex, "no ear found");
    out.triangles.push_back({ring[(best + m - 1) % m], ring[best], ring[(best + 1) % m]});
    ring.erase(ring.begin() + best);
  }
  out.triangles.push_back({ring[0], ring[1], ring[2]});

  std::map<std::pair<int, int>, int> owner;
  for (int t = 0; t < static_cast<int>(out.triangles.size()); ++t) {
    const auto& tr = out.triangles[t];
    for (int e = 0; e < 3; ++e) {
      const auto key = edge_key(tr[e], tr[(e + 1) % 3]);
      auto it = owner.find(key);
      if (it == owner.end())
        owner.emplace(key, t);
      else
        out.dual_edges.emplace_back(it->second, t);
    }
  }
  return out;
}

namespace {

// Rotates a CCW index triple so that the unordered edge {a, b} comes first.
std::array<int, 3> rotate_to_edge(const std::array<int, 3>& t, int a, int b) {
  for (int r = 0; r < 3; ++r) {
    const int p = t[r], q = t[(r + 1) % 3];
    if ((p == a && q == b) || (p == b && q == a)) return {p, q, t[(r + 2) % 3]};
  }
  throw Error(ErrorCode::kDegenerateInput, "triangles do not share the requested edge");
}

bool edge_on_boundary(const Point2& a, const Point2& b, const std::vector<Point2>& boundary, double tol) {
  const std::size_t n = boundary.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = boundary[i];
    const Point2& q = boundary[(i + 1) % n];
    if (distance_to_segment(a, p, q) <= tol && distance_to_segment(b, p, q) <= tol) return true;
  }
  return false;
}

}  // namespace

TriangleTree build_triangle_tree(const Polygon& p, TreeMode mode, const ConvexPolygon* boundary) {
  const Triangulation tri = ear_clip(p);
  const int nt = static_cast<int>(tri.triangles.size());
  const int nv = static_cast<int>(tri.vertices.size());
  std::vector<std::vector<int>> adj(nt);
  for (const auto& [a, b] : tri.dual_edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& l : adj) std::sort(l.begin(), l.end());

  TriangleTree tree;
  tree.mode = mode;
  int root = -1;
  std::pair<int, int> root_edge{-1, -1};
  if (mode == TreeMode::kInterior) {
    double best = -1.0;
    for (int t = 0; t < nt; ++t) {
      const double a = tri.triangle(t).area();
      if (a > best) {
        best = a;
        root = t;
      }
    }
  } else {
    if (!boundary) throw Error(ErrorCode::kNoBoundaryAdjacentTriangle, "no boundary supplied");
    const double tol = std::max(1e-7, 100.0 * geom_eps());
    for (int t = 0; t < nt && root < 0; ++t) {
      const auto& tr = tri.triangles[t];
      double best_len = 0.0;
      for (int e = 0; e < 3; ++e) {
        const int a = tr[e], b = tr[(e + 1) % 3];
        // Only polygon edges can lie on the enclosing boundary.
        if ((a + 1) % nv != b && (b + 1) % nv != a) continue;
        if (!edge_on_boundary(tri.vertices[a], tri.vertices[b], boundary->vertices(), tol)) continue;
        const double len = (tri.vertices[a] - tri.vertices[b]).norm();
        if (len > best_len) {
          best_len = len;
          root = t;
          root_edge = {a, b};
        }
      }
    }
    if (root < 0) throw Error(ErrorCode::kNoBoundaryAdjacentTriangle, "no triangle touches the boundary");
  }

  tree.nodes.resize(nt);
  tree.root = root;
  std::vector<std::array<int, 3>> idx(nt);
  std::vector<bool> seen(nt, false);
  std::deque<int> queue{root};
  seen[root] = true;
  idx[root] = mode == TreeMode::kBoundary ? rotate_to_edge(tri.triangles[root], root_edge.first, root_edge.second)
                                          : tri.triangles[root];
  while (!queue.empty()) {
    const int t = queue.front();
    queue.pop_front();
    for (int c : adj[t]) {
      if (seen[c]) continue;
      seen[c] = true;
      tree.nodes[c].parent = t;
      tree.nodes[c].depth = tree.nodes[t].depth + 1;
      tree.nodes[t].children.push_back(c);
      // Shared edge = the two indices common to both triangles.
      std::vector<int> common;
      for (int a : tri.triangles[c])
        if (std::find(tri.triangles[t].begin(), tri.triangles[t].end(), a) != tri.triangles[t].end())
          common.push_back(a);
      idx[c] = rotate_to_edge(tri.triangles[c], common[0], common[1]);
      queue.push_back(c);
    }
  }
  for (int t = 0; t < nt; ++t) {
    if (!seen[t]) throw Error(ErrorCode::kTopologyError, "triangulation dual graph is disconnected");
    tree.nodes[t].tri = {tri.vertices[idx[t][0]], tri.vertices[idx[t][1]], tri.vertices[idx[t][2]]};
  }
  for (int t = 0; t < nt; ++t)
    if (t != root) tree.purge_order.push_back(t);
  std::stable_sort(tree.purge_order.begin(), tree.purge_order.end(),
                   [&](int a, int b) { return tree.nodes[a].depth > tree.nodes[b].depth; });
  tree.purge_order.push_back(root);
  return tree;
}

std::vector<ConvexPolygon> convex_decompose(const Polygon& p) {
  const Triangulation tri = ear_clip(p);
  const int nt = static_cast<int>(tri.triangles.size());
  std::vector<std::vector<int>> pieces(nt);
  std::vector<int> piece_of(nt);
  for (int t = 0; t < nt; ++t) {
    pieces[t] = {tri.triangles[t][0], tri.triangles[t][1], tri.triangles[t][2]};
    piece_of[t] = t;
  }
  auto pts = [&](const std::vector<int>& cyc) {
    std::vector<Point2> out;
    out.reserve(cyc.size());
    for (int i : cyc) out.push_back(tri.vertices[i]);
    return out;
  };
  for (const auto& [t1, t2] : tri.dual_edges) {
    const int pa = piece_of[t1], pb = piece_of[t2];
    if (pa == pb) continue;
    std::vector<int> common;
    for (int a : tri.triangles[t1])
      if (std::find(tri.triangles[t2].begin(), tri.triangles[t2].end(), a) != tri.triangles[t2].end())
        common.push_back(a);
    const auto& A = pieces[pa];
    const auto& B = pieces[pb];
    const int na = static_cast<int>(A.size()), nb = static_cast<int>(B.size());
    // Locate the diagonal as a directed edge u->w in A; B holds w->u.
    int ia = -1;
    for (int i = 0; i < na; ++i) {
      const int u = A[i], w = A[(i + 1) % na];
      if ((u == common[0] && w == common[1]) || (u == common[1] && w == common[0])) ia = i;
    }
    if (ia < 0) continue;
    const int u = A[ia], w = A[(ia + 1) % na];
    const int ib = static_cast<int>(std::find(B.begin(), B.end(), u) - B.begin());
    std::vector<int> merged;
    for (int k = 0; k < na; ++k) merged.push_back(A[(ia + 1 + k) % na]);  // w ... u
    for (int k = 1; k < nb - 1; ++k) merged.push_back(B[(ib + k) % nb]);  // after u ... before w
    (void)w;
    if (!is_convex_ccw(pts(merged), 1e-12)) continue;
    pieces[pa] = merged;
    pieces[pb].clear();
    for (auto& po : piece_of)
      if (po == pb) po = pa;
  }
  std::vector<ConvexPolygon> out;
  for (const auto& pc : pieces)
    if (!pc.empty()) out.emplace_back(pts(pc));
  return out;
}

}  // namespace semnav
