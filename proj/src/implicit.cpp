#include "semnav/implicit.hpp"

#include <algorithm>
#include <cmath>

#include "semnav/errors.hpp"

namespace semnav {

double halfplane_eval(const Halfplane& h, const Point2& x) { return (x - h.anchor).dot(h.normal); }

namespace {

// (|a|^p + |b|^p)^(1/p), computed relative to max(|a|,|b|) to stay finite for large p.
double pnorm(double a, double b, int p) {
  const double aa = std::abs(a), ab = std::abs(b);
  if (p == 1) return aa + ab;
  if (p == 2) return std::sqrt(a * a + b * b);
  const double m = std::max(aa, ab);
  if (m == 0.0) return 0.0;
  return m * std::pow(std::pow(aa / m, p) + std::pow(ab / m, p), 1.0 / p);
}

Jet pnorm(const Jet& a, const Jet& b, int p) {
  const double n = pnorm(a.v, b.v, p);
  if (n == 0.0) return Jet(0.0);
  const double sa = a.v < 0 ? -1.0 : 1.0, sb = b.v < 0 ? -1.0 : 1.0;
  const double ra = std::abs(a.v) / n, rb = std::abs(b.v) / n;
  double na, nb, naa, nbb, nab;
  if (p == 1) {
    na = sa;
    nb = sb;
    naa = nbb = nab = 0.0;
  } else {
    const double ra1 = std::pow(ra, p - 1), rb1 = std::pow(rb, p - 1);
    na = sa * ra1;
    nb = sb * rb1;
    naa = (p - 1) / n * (std::pow(ra, p - 2) - ra1 * ra1);
    nbb = (p - 1) / n * (std::pow(rb, p - 2) - rb1 * rb1);
    nab = -(p - 1) / n * sa * sb * ra1 * rb1;
  }
  Jet out(n);
  out.g = na * a.g + nb * b.g;
  out.h = naa * a.g * a.g.transpose() + nab * (a.g * b.g.transpose() + b.g * a.g.transpose()) +
          nbb * b.g * b.g.transpose() + na * a.h + nb * b.h;
  return out;
}

template <class S>
S leaf_value(const Halfplane& h, const Point2& x);

template <>
double leaf_value<double>(const Halfplane& h, const Point2& x) {
  return halfplane_eval(h, x);
}

template <>
Jet leaf_value<Jet>(const Halfplane& h, const Point2& x) {
  return Jet(halfplane_eval(h, x), h.normal, Mat2::Zero());
}

template <class S>
S eval_node(const ImplicitNode& n, const Point2& x, int p) {
  switch (n.kind) {
    case NodeKind::kLeaf: return leaf_value<S>(n.leaf, x);
    case NodeKind::kNot: return -eval_node<S>(n.children[0], x, p);
    case NodeKind::kAnd:
    case NodeKind::kOr: {
      const S a = eval_node<S>(n.children[0], x, p);
      const S b = eval_node<S>(n.children[1], x, p);
      const S m = pnorm(a, b, p);
      return n.kind == NodeKind::kAnd ? a + b - m : a + b + m;
    }
  }
  return S(0.0);
}

ImplicitNode make_leaf(const Point2& a, const Point2& b) {
  ImplicitNode n;
  n.kind = NodeKind::kLeaf;
  n.leaf.anchor = a;
  n.leaf.normal = rot90(b - a).normalized();
  return n;
}

ImplicitNode make_binary(NodeKind k, ImplicitNode a, ImplicitNode b) {
  ImplicitNode n;
  n.kind = k;
  n.children.push_back(std::move(a));
  n.children.push_back(std::move(b));
  return n;
}

// Positions (into pts) of the convex hull vertices, sorted ascending.
std::vector<int> hull_positions(const std::vector<Point2>& pts) {
  std::vector<int> order(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return pts[a].x() < pts[b].x() || (pts[a].x() == pts[b].x() && pts[a].y() < pts[b].y());
  });
  std::vector<int> h(2 * order.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    while (k >= 2 && orient(pts[h[k - 2]], pts[h[k - 1]], pts[order[i]]) <= 0) --k;
    h[k++] = order[i];
  }
  for (std::size_t i = order.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && orient(pts[h[k - 2]], pts[h[k - 1]], pts[order[i]]) <= 0) --k;
    h[k++] = order[i];
  }
  h.resize(k > 0 ? k - 1 : 0);
  std::sort(h.begin(), h.end());
  h.erase(std::unique(h.begin(), h.end()), h.end());
  return h;
}

struct Builder {
  const std::vector<Point2>& v;
  std::vector<bool> reflex;

  // chain: consecutive polygon vertex indices, at least 2.
  ImplicitNode chain(const std::vector<int>& c) const {
    if (c.size() == 2) return make_leaf(v[c[0]], v[c[1]]);
    std::vector<Point2> pts;
    for (int i : c) pts.push_back(v[i]);
    std::vector<int> splits;
    for (int h : hull_positions(pts))
      if (h > 0 && h < static_cast<int>(c.size()) - 1) splits.push_back(h);
    if (splits.empty()) splits.push_back(static_cast<int>(c.size()) / 2);
    std::vector<int> cuts{0};
    cuts.insert(cuts.end(), splits.begin(), splits.end());
    cuts.push_back(static_cast<int>(c.size()) - 1);
    ImplicitNode acc = chain(std::vector<int>(c.begin() + cuts[0], c.begin() + cuts[1] + 1));
    for (std::size_t k = 1; k + 1 < cuts.size(); ++k) {
      ImplicitNode next = chain(std::vector<int>(c.begin() + cuts[k], c.begin() + cuts[k + 1] + 1));
      const NodeKind op = reflex[c[cuts[k]]] ? NodeKind::kOr : NodeKind::kAnd;
      acc = make_binary(op, std::move(acc), std::move(next));
    }
    return acc;
  }
};

ImplicitNode polygon_inside(const std::vector<Point2>& v) {
  const int n = static_cast<int>(v.size());
  Builder b{v, std::vector<bool>(n)};
  for (int i = 0; i < n; ++i) b.reflex[i] = orient(v[(i + n - 1) % n], v[i], v[(i + 1) % n]) < 0;
  std::vector<int> hull = hull_positions(v);
  if (hull.size() < 3) throw Error(ErrorCode::kDegeneratePolygon, "polygon hull is degenerate");
  ImplicitNode acc;
  for (std::size_t k = 0; k < hull.size(); ++k) {
    const int s = hull[k];
    const int e = k + 1 < hull.size() ? hull[k + 1] : hull[0] + n;
    std::vector<int> c;
    for (int i = s; i <= e; ++i) c.push_back(i % n);
    ImplicitNode node = b.chain(c);
    acc = k == 0 ? std::move(node) : make_binary(NodeKind::kAnd, std::move(acc), std::move(node));
  }
  return acc;
}

}  // namespace

double r_combine(RKind kind, const std::vector<double>& values, int p) {
  if (p < 1) throw Error(ErrorCode::kDegenerateInput, "R-function power must be >= 1");
  if (kind == RKind::kNot) {
    if (values.size() != 1) throw Error(ErrorCode::kDegenerateInput, "not takes one operand");
    return -values[0];
  }
  if (values.size() != 2) throw Error(ErrorCode::kDegenerateInput, "and/or take two operands");
  const double m = pnorm(values[0], values[1], p);
  return kind == RKind::kAnd ? values[0] + values[1] - m : values[0] + values[1] + m;
}

ImplicitTree build_polygon_implicit(const std::vector<Point2>& ccw_vertices, int power) {
  if (power < 1) throw Error(ErrorCode::kDegenerateInput, "R-function power must be >= 1");
  const auto v = merge_collinear(ccw_vertices, geom_eps());
  if (v.size() < 3 || signed_area(v) <= 0) throw Error(ErrorCode::kDegeneratePolygon, "need a CCW polygon");
  ImplicitTree t;
  t.power = power;
  t.vertices = v;
  t.root.kind = NodeKind::kNot;
  t.root.children.push_back(polygon_inside(v));
  return t;
}

ImplicitTree build_polygon_implicit(const Polygon& p, int power) {
  return build_polygon_implicit(p.vertices(), power);
}

ImplicitTree build_convex_inside(const std::vector<Point2>& ccw_vertices, int power) {
  if (power < 1) throw Error(ErrorCode::kDegenerateInput, "R-function power must be >= 1");
  const auto v = merge_collinear(ccw_vertices, geom_eps());
  if (v.size() < 3 || !is_convex_ccw(v, 1e-9)) throw Error(ErrorCode::kDegeneratePolygon, "need a convex CCW polygon");
  ImplicitTree t;
  t.power = power;
  t.vertices = v;
  const std::size_t n = v.size();
  t.root = make_leaf(v[0], v[1]);
  for (std::size_t i = 1; i < n; ++i)
    t.root = make_binary(NodeKind::kAnd, std::move(t.root), make_leaf(v[i], v[(i + 1) % n]));
  return t;
}

double implicit_eval(const ImplicitTree& t, const Point2& x) { return eval_node<double>(t.root, x, t.power); }

Jet implicit_jet(const ImplicitTree& t, const Point2& x) { return eval_node<Jet>(t.root, x, t.power); }

Vec2 implicit_grad(const ImplicitTree& t, const Point2& x) {
  for (const auto& v : t.vertices)
    if ((x - v).norm() <= geom_eps()) throw Error(ErrorCode::kSingularPoint, "gradient requested at a polygon vertex");
  return implicit_jet(t, x).g;
}

int count_leaves(const ImplicitNode& n) {
  if (n.kind == NodeKind::kLeaf) return 1;
  int c = 0;
  for (const auto& ch : n.children) c += count_leaves(ch);
  return c;
}

}  // namespace semnav
