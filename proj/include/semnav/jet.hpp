#pragma once

#include <Eigen/Core>
#include <cmath>

namespace semnav {

// Second-order forward-mode jet in two variables: value, gradient, Hessian.
struct Jet {
  double v = 0.0;
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT: constants promote implicitly
  Jet(double value, const Eigen::Vector2d& grad, const Eigen::Matrix2d& hess) : v(value), g(grad), h(hess) {}

  static Jet variable(double value, int i) {
    Jet j(value);
    j.g[i] = 1.0;
    return j;
  }
};

// f(u) given f, f', f'' at u.v
inline Jet chain(const Jet& u, double f, double df, double d2f) {
  return Jet(f, df * u.g, d2f * u.g * u.g.transpose() + df * u.h);
}

inline Jet operator+(const Jet& a, const Jet& b) { return Jet(a.v + b.v, a.g + b.g, a.h + b.h); }
inline Jet operator-(const Jet& a, const Jet& b) { return Jet(a.v - b.v, a.g - b.g, a.h - b.h); }
inline Jet operator-(const Jet& a) { return Jet(-a.v, -a.g, -a.h); }
inline Jet operator*(const Jet& a, const Jet& b) {
  return Jet(a.v * b.v, a.v * b.g + b.v * a.g,
             a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose());
}
inline Jet operator*(double s, const Jet& a) { return Jet(s * a.v, s * a.g, s * a.h); }
inline Jet operator*(const Jet& a, double s) { return s * a; }
inline Jet operator+(const Jet& a, double s) { return Jet(a.v + s, a.g, a.h); }
inline Jet operator+(double s, const Jet& a) { return a + s; }
inline Jet operator-(const Jet& a, double s) { return Jet(a.v - s, a.g, a.h); }
inline Jet operator-(double s, const Jet& a) { return Jet(s - a.v, -a.g, -a.h); }
inline Jet recip(const Jet& a) {
  const double r = 1.0 / a.v;
  return chain(a, r, -r * r, 2.0 * r * r * r);
}
inline Jet operator/(const Jet& a, const Jet& b) { return a * recip(b); }
inline Jet operator/(const Jet& a, double s) { return (1.0 / s) * a; }
inline Jet operator/(double s, const Jet& a) { return s * recip(a); }

inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}
inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

inline double value(double x) { return x; }
inline double value(const Jet& x) { return x.v; }

}  // namespace semnav
