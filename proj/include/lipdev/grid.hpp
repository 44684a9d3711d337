#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <type_traits>
#include <vector>

#include "lipdev/common.hpp"

namespace lipdev {

enum class Extension { zero, periodic };

std::string to_string(Extension ext);
Extension extension_from_string(const std::string& name);

/// Dyadic sampling of the box [0, 2^K)^n at spacing 2^-J.
struct GridSpec {
  int n = 1;
  int J = 1;
  int K = 0;
  Extension ext = Extension::periodic;

  void validate() const;

  long axis_samples() const { return 1L << (K + J); }
  std::size_t sample_count() const {
    const auto a = static_cast<std::size_t>(axis_samples());
    return n == 1 ? a : a * a;
  }
  double spacing() const { return std::ldexp(1.0, -J); }
  double box_side() const { return std::ldexp(1.0, K); }
  double cell_volume() const { return std::ldexp(1.0, -J * n); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

using Point = Eigen::Vector2d;
using Index2 = std::array<long, 2>;

/// Row-major flattening with the first axis fastest.
inline std::size_t flat_index(const Index2& idx, long axis, int n) {
  return n == 1 ? static_cast<std::size_t>(idx[0])
                : static_cast<std::size_t>(idx[0] + axis * idx[1]);
}

inline Index2 unflatten(std::size_t p, long axis, int n) {
  if (n == 1) return {static_cast<long>(p), 0};
  return {static_cast<long>(p % static_cast<std::size_t>(axis)),
          static_cast<long>(p / static_cast<std::size_t>(axis))};
}

/// Real function sampled at cell centres.
struct SampledFunction {
  GridSpec spec;
  Eigen::ArrayXd values;

  /// Sample value at a lattice index; indices outside the box read 0 in
  /// zero mode and wrap in periodic mode.
  double at(const Index2& idx) const {
    const long a = spec.axis_samples();
    Index2 i = idx;
    for (int d = 0; d < spec.n; ++d) {
      if (i[d] < 0 || i[d] >= a) {
        if (spec.ext == Extension::zero) return 0.0;
        i[d] = ((i[d] % a) + a) % a;
      }
    }
    return values[static_cast<Eigen::Index>(flat_index(i, a, spec.n))];
  }

  Point centre(std::size_t p) const;
  double sup_norm() const { return values.size() ? values.abs().maxCoeff() : 0.0; }
  /// Grid L2 norm with cell-volume weights.
  double l2_norm() const;
};

SampledFunction sample(const std::function<double(const Point&)>& expr,
                       const GridSpec& spec);

/// Convenience overload for one-dimensional expressions.
template <class F>
  requires std::is_invocable_r_v<double, F, double>
SampledFunction sample(F&& expr, const GridSpec& spec) {
  if (spec.n != 1) throw ConfigError("scalar expression requires n = 1");
  return sample([&](const Point& x) { return expr(x[0]); }, spec);
}

struct DyadicCube {
  int n = 1;
  int level = 0;
  Index2 index{0, 0};

  double side() const { return std::ldexp(1.0, -level); }
  double volume() const { return std::ldexp(1.0, -level * n); }
  double lower(int axis) const { return std::ldexp(static_cast<double>(index[axis]), -level); }
  double upper(int axis) const {
    return std::ldexp(static_cast<double>(index[axis] + 1), -level);
  }
  bool contains(const Point& x) const;
  /// True when `other` is a (non-strict) dyadic descendant of this cube.
  bool contains(const DyadicCube& other) const;
  DyadicCube parent() const;

  friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
};

/// Cubes of side 2^-j tiling the box, first axis fastest.
std::vector<DyadicCube> cubes_at_level(const GridSpec& spec, int j);

/// Number of level-j cubes per axis inside the box.
inline long cubes_per_axis(const GridSpec& spec, int j) { return 1L << (spec.K + j); }

/// Upper half-space region I x (l(I)/2, l(I)].
struct Tent {
  DyadicCube base;
  double y_lo = 0.0;
  double y_hi = 0.0;

  bool contains(const Point& x, double y) const {
    return base.contains(x) && y > y_lo && y <= y_hi;
  }
};

Tent tent_of(const DyadicCube& cube);

/// Range of sample indices (per axis, half open) covered by a cube at level
/// j <= J. Cubes coarser than the box are clipped to it.
std::array<Index2, 2> cube_sample_range(const GridSpec& spec, const DyadicCube& cube);

/// Per-level membership flags over the dyadic cubes of levels 0..levels-1.
/// Level j holds (2^{K+j})^n flags, first axis fastest.
struct CubeFamily {
  GridSpec spec;
  std::vector<std::vector<std::uint8_t>> levels;

  static CubeFamily empty(const GridSpec& spec, int level_count);

  int level_count() const { return static_cast<int>(levels.size()); }
  bool test(const DyadicCube& cube) const;
  void set(const DyadicCube& cube, bool on = true);
  std::size_t count(int j) const;
  std::size_t count() const;
  std::vector<DyadicCube> cubes(int j) const;
};

}  // namespace lipdev
