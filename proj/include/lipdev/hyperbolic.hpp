#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>

#include "lipdev/common.hpp"
#include "lipdev/region_mask.hpp"

namespace lipdev {

/// Point (x, y) of the upper half-space R^{Dim} x (0, inf).
template <class Scalar, int Dim>
struct HalfSpacePoint {
  using Vec = Eigen::Matrix<Scalar, Dim, 1>;
  Vec x = Vec::Zero();
  Scalar y = Scalar(1);

  HalfSpacePoint() = default;
  HalfSpacePoint(const Vec& x_, Scalar y_) : x(x_), y(y_) {
    if (!(y_ > Scalar(0))) throw ConfigError("half-space point needs y > 0");
  }
};

using HPoint1 = HalfSpacePoint<double, 1>;
using HPoint2 = HalfSpacePoint<double, 2>;

inline HPoint1 hpoint(double x, double y) { return {Eigen::Matrix<double, 1, 1>(x), y}; }
inline HPoint2 hpoint(double x0, double x1, double y) { return {Eigen::Vector2d(x0, x1), y}; }

/// |p - q|^2 / (2 p.y q.y), the argument of arccosh minus one.
template <class S, int D>
S rho_delta(const HalfSpacePoint<S, D>& p, const HalfSpacePoint<S, D>& q) {
  const S dy = p.y - q.y;
  return ((p.x - q.x).squaredNorm() + dy * dy) / (S(2) * p.y * q.y);
}

/// 2 ln((|p - q| + |p - q~|) / (2 sqrt(p.y q.y))) with q~ reflected across
/// the boundary. Written as log1p of a sum of positive terms so that small
/// distances keep full relative accuracy.
template <class S, int D>
S rho_log(const HalfSpacePoint<S, D>& p, const HalfSpacePoint<S, D>& q) {
  using std::log1p;
  using std::sqrt;
  const S h2 = (p.x - q.x).squaredNorm();
  const S a = sqrt(h2 + (p.y - q.y) * (p.y - q.y));
  const S b = sqrt(h2 + (p.y + q.y) * (p.y + q.y));
  const S g = S(2) * sqrt(p.y * q.y);
  // b - g = a^2 / (b + g)
  return S(2) * log1p((a + a * a / (b + g)) / g);
}

/// Poincare distance arccosh(1 + delta), evaluated as ln(u + sqrt(u^2 - 1))
/// in the form log1p(delta + sqrt(delta (delta + 2))). Below u = 1 + 1e-8
/// the 2 ln formula is used.
template <class S, int D>
S rho(const HalfSpacePoint<S, D>& p, const HalfSpacePoint<S, D>& q) {
  using std::log1p;
  using std::sqrt;
  const S delta = rho_delta(p, q);
  if (delta < S(1e-8)) return rho_log(p, q);
  return log1p(delta + sqrt(delta * (delta + S(2))));
}

/// Horizontal ball x vertical band.
struct HalfSpaceBox {
  Eigen::Vector2d centre = Eigen::Vector2d::Zero();
  int n = 1;
  double radius = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;

  template <int D>
  bool contains(const HalfSpacePoint<double, D>& p) const {
    return (p.x - centre.head<D>()).norm() <= radius && p.y >= y_lo && p.y <= y_hi;
  }
};

struct BallBoxBounds {
  HalfSpaceBox inner;
  HalfSpaceBox outer;
};

/// Inner box of radius (t/4) z.y and band (1 -+ t/4) z.y; outer box of radius
/// 2t z.y and band (1 -+ 2t) z.y. Requires 0 < t <= 1/4.
template <int D>
BallBoxBounds ball_box_bounds(const HalfSpacePoint<double, D>& z, double t) {
  if (!(t > 0.0 && t <= 0.25)) throw RangeError("ball_box_bounds: t must lie in (0, 1/4]");
  BallBoxBounds out;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  c.head<D>() = z.x;
  out.inner = {c, D, 0.25 * t * z.y, (1 - 0.25 * t) * z.y, (1 + 0.25 * t) * z.y};
  out.outer = {c, D, 2 * t * z.y, (1 - 2 * t) * z.y, (1 + 2 * t) * z.y};
  return out;
}

/// dx dy / y mass of the marked cells.
double mu_measure(const RegionMask& m);

/// Cell centre used by the dilation: sample centre and the hyperbolic
/// midpoint of the sub-band.
HPoint2 cell_centre(const RegionMask& m, int j, int b, std::size_t p);

/// Cells whose centre lies within distance < R of some marked cell centre.
/// Rows (level, sub-band) are compared pairwise: for source height y and
/// target height v the condition reduces to a horizontal Euclidean radius,
/// evaluated with a squared distance transform of the source row. Periodic
/// grids measure horizontal distance on the torus.
RegionMask hyper_neighborhood(const RegionMask& m, double R);

/// Numerical length of the geodesic from p to q (vertical segment or
/// circular arc), composite Simpson rule with `steps` panels (rounded up to
/// even).
template <int D>
double geodesic_length(const HalfSpacePoint<double, D>& p, const HalfSpacePoint<double, D>& q, int steps);

extern template double geodesic_length<1>(const HPoint1&, const HPoint1&, int);
extern template double geodesic_length<2>(const HPoint2&, const HPoint2&, int);

}  // namespace lipdev
