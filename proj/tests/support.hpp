#pragma once

// Independent oracles and generators shared by the unit tests. Nothing here
// calls into the library's geometry code.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using P = Eigen::Vector2d;

inline double seg_dist(const P& q, const P& a, const P& b) {
  const P ab = b - a;
  const double L = ab.squaredNorm();
  double t = L > 0 ? (q - a).dot(ab) / L : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (q - (a + t * ab)).norm();
}

inline double boundary_dist(const P& q, const std::vector<P>& poly) {
  double d = 1e300;
  for (std::size_t i = 0; i < poly.size(); ++i) d = std::min(d, seg_dist(q, poly[i], poly[(i + 1) % poly.size()]));
  return d;
}

// Winding number; nonzero means inside.
inline int winding(const P& q, const std::vector<P>& poly) {
  int w = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const P& a = poly[i];
    const P& b = poly[(i + 1) % poly.size()];
    const double side = (b.x() - a.x()) * (q.y() - a.y()) - (q.x() - a.x()) * (b.y() - a.y());
    if (a.y() <= q.y()) {
      if (b.y() > q.y() && side > 0) ++w;
    } else if (b.y() <= q.y() && side < 0) {
      --w;
    }
  }
  return w;
}

inline bool inside(const P& q, const std::vector<P>& poly) { return winding(q, poly) != 0; }

inline double area(const std::vector<P>& v) {
  double a = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const P& p = v[i];
    const P& q = v[(i + 1) % v.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

// Star-shaped about `c`, so simple by construction. CCW.
inline std::vector<P> star_polygon(std::mt19937& rng, int n, const P& c, double rmin, double rmax) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<P> v;
  const double off = 2 * M_PI * U(rng);
  for (int i = 0; i < n; ++i) {
    const double th = off + 2 * M_PI * (i + 0.15 + 0.7 * U(rng)) / n;
    const double r = rmin + (rmax - rmin) * U(rng);
    v.push_back(c + r * P(std::cos(th), std::sin(th)));
  }
  return v;
}

inline bool convex_ccw(const std::vector<P>& v, double tol = 1e-12) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    const P& a = v[i];
    const P& b = v[(i + 1) % v.size()];
    const P& c = v[(i + 2) % v.size()];
    if ((b.x() - a.x()) * (c.y() - b.y()) - (b.y() - a.y()) * (c.x() - b.x()) < -tol) return false;
  }
  return area(v) > 0;
}

inline std::string polygon_json(const std::vector<P>& v) {
  std::string s = "[";
  char buf[80];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s[%.17g, %.17g]", i ? ", " : "", v[i].x(), v[i].y());
    s += buf;
  }
  return s + "]";
}

inline std::string source_dir() { return SEMNAV_SOURCE_DIR; }

}  // namespace oracle
