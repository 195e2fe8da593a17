#pragma once

// Finite-difference and sampling helpers for checking a built snapshot. The
// raw map is composed step by step here, without the library's Jacobian code.

#include <algorithm>
#include <array>
#include <cmath>

#include "semnav/diffeo.hpp"
#include "support.hpp"

namespace diffeo_support {

using namespace semnav;

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1.0); }

inline Point2 raw_eval(const DiffeoSnapshot& snap, Point2 y) {
  for (const auto& s : snap.steps) y = purge_map(s, y);
  return y;
}

// Five-point central stencil. Near corners |J| reaches the hundreds and the
// three-point truncation term alone exceeds 1e-5 there.
template <class F>
auto fd5(const F& f, const Point2& x, int k, double h) {
  Vec2 e = Vec2::Zero();
  e[k] = h;
  using T = decltype(f(x));
  const T out = ((f(x - 2 * e) - f(x + 2 * e)) + 8.0 * (f(x + e) - f(x - e))) / (12 * h);
  return out;
}

inline Mat2 fd_jacobian(const DiffeoSnapshot& snap, const Point2& x, double h = 1e-6) {
  Mat2 J;
  auto f = [&](const Point2& y) -> Vec2 { return raw_eval(snap, y); };
  for (int k = 0; k < 2; ++k) J.col(k) = fd5(f, x, k, h);
  return J;
}

// dJ[k] = d J / d x_k from the analytic Jacobian.
inline std::array<Mat2, 2> fd_second(const DiffeoSnapshot& snap, const Point2& x, double h = 1e-6) {
  auto f = [&](const Point2& y) -> Mat2 { return diffeo_jacobian(snap, y, false).J; };
  return {fd5(f, x, 0, h), fd5(f, x, 1, h)};
}

inline double vertex_distance(const DiffeoSnapshot& snap, const Point2& x) {
  double d = 1e300;
  for (const auto& o : snap.obstacles)
    for (const auto& v : o.vertices()) d = std::min(d, (x - v).norm());
  for (const auto& s : snap.steps)
    for (const auto& v : {s.x1, s.x2, s.x3}) d = std::min(d, (x - v).norm());
  return d;
}

inline bool in_any_collar(const DiffeoSnapshot& snap, const Point2& x) {
  for (const auto& s : snap.steps)
    if (oracle::inside(x, s.collar) || oracle::boundary_dist(x, s.collar) < 1e-12) return true;
  return false;
}

}  // namespace diffeo_support
