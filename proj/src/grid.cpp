#include "lipdev/grid.hpp"

#include <sstream>

#include "lipdev/parallel.hpp"

namespace lipdev {

std::string to_string(Extension ext) { return ext == Extension::zero ? "zero" : "periodic"; }

Extension extension_from_string(const std::string& name) {
  if (name == "zero") return Extension::zero;
  if (name == "periodic") return Extension::periodic;
  throw ConfigError("ext: expected \"zero\" or \"periodic\", got \"" + name + "\"");
}

void GridSpec::validate() const {
  require(n == 1 || n == 2, "grid.n: dimension must be 1 or 2");
  require(J >= 1, "grid.J: finest level must satisfy J >= 1");
  require(K >= 0, "grid.K: box exponent must satisfy K >= 0");
  require(n * (K + J) <= 26, "grid: more than 2^26 samples");
}

Point SampledFunction::centre(std::size_t p) const {
  const Index2 idx = unflatten(p, spec.axis_samples(), spec.n);
  const double h = spec.spacing();
  Point x = Point::Zero();
  for (int d = 0; d < spec.n; ++d) x[d] = (static_cast<double>(idx[d]) + 0.5) * h;
  return x;
}

double SampledFunction::l2_norm() const {
  const double s = pairwise_sum(0, static_cast<std::size_t>(values.size()), [&](std::size_t i) {
    return values[static_cast<Eigen::Index>(i)] * values[static_cast<Eigen::Index>(i)];
  });
  return std::sqrt(s * spec.cell_volume());
}

SampledFunction sample(const std::function<double(const Point&)>& expr, const GridSpec& spec) {
  spec.validate();
  SampledFunction f{spec, Eigen::ArrayXd(static_cast<Eigen::Index>(spec.sample_count()))};
  parallel_for(spec.sample_count(), [&](std::size_t p) {
    f.values[static_cast<Eigen::Index>(p)] = expr(f.centre(p));
  });
  for (std::size_t p = 0; p < spec.sample_count(); ++p) {
    if (!std::isfinite(f.values[static_cast<Eigen::Index>(p)])) {
      const Point x = f.centre(p);
      std::ostringstream msg;
      msg << "sample: non-finite value at x = (" << x[0];
      if (spec.n == 2) msg << ", " << x[1];
      msg << ")";
      throw NumericError(msg.str());
    }
  }
  return f;
}

bool DyadicCube::contains(const Point& x) const {
  for (int d = 0; d < n; ++d) {
    if (x[d] < lower(d) || x[d] >= upper(d)) return false;
  }
  return true;
}

bool DyadicCube::contains(const DyadicCube& other) const {
  if (other.level < level) return false;
  const int shift = other.level - level;
  for (int d = 0; d < n; ++d) {
    if ((other.index[d] >> shift) != index[d]) return false;
  }
  return true;
}

DyadicCube DyadicCube::parent() const {
  DyadicCube p = *this;
  p.level = level - 1;
  for (int d = 0; d < n; ++d) p.index[d] = index[d] >> 1;
  return p;
}

std::vector<DyadicCube> cubes_at_level(const GridSpec& spec, int j) {
  spec.validate();
  if (j < -spec.K || j > spec.J) {
    throw RangeError("cubes_at_level: level " + std::to_string(j) + " outside [" +
                     std::to_string(-spec.K) + ", " + std::to_string(spec.J) + "]");
  }
  const long per_axis = cubes_per_axis(spec, j);
  std::vector<DyadicCube> out;
  if (spec.n == 1) {
    out.reserve(static_cast<std::size_t>(per_axis));
    for (long k = 0; k < per_axis; ++k) out.push_back({1, j, {k, 0}});
  } else {
    out.reserve(static_cast<std::size_t>(per_axis * per_axis));
    for (long k1 = 0; k1 < per_axis; ++k1)
      for (long k0 = 0; k0 < per_axis; ++k0) out.push_back({2, j, {k0, k1}});
  }
  return out;
}

Tent tent_of(const DyadicCube& cube) {
  return {cube, std::ldexp(1.0, -cube.level - 1), std::ldexp(1.0, -cube.level)};
}

std::array<Index2, 2> cube_sample_range(const GridSpec& spec, const DyadicCube& cube) {
  if (cube.level > spec.J) throw RangeError("cube finer than the sample grid");
  const int shift = spec.J - cube.level;
  const long a = spec.axis_samples();
  Index2 lo{0, 0}, hi{1, 1};
  for (int d = 0; d < spec.n; ++d) {
    lo[d] = std::clamp(cube.index[d] << shift, 0L, a);
    hi[d] = std::clamp((cube.index[d] + 1) << shift, 0L, a);
  }
  return {lo, hi};
}

}  // namespace lipdev

namespace lipdev {

CubeFamily CubeFamily::empty(const GridSpec& spec, int level_count) {
  CubeFamily fam{spec, {}};
  fam.levels.resize(static_cast<std::size_t>(level_count));
  for (int j = 0; j < level_count; ++j) {
    const auto a = static_cast<std::size_t>(cubes_per_axis(spec, j));
    fam.levels[static_cast<std::size_t>(j)].assign(spec.n == 1 ? a : a * a, 0);
  }
  return fam;
}

bool CubeFamily::test(const DyadicCube& cube) const {
  if (cube.level < 0 || cube.level >= level_count()) return false;
  const long a = cubes_per_axis(spec, cube.level);
  return levels[static_cast<std::size_t>(cube.level)][flat_index(cube.index, a, spec.n)] != 0;
}

void CubeFamily::set(const DyadicCube& cube, bool on) {
  if (cube.level < 0 || cube.level >= level_count())
    throw RangeError("CubeFamily: level " + std::to_string(cube.level) + " not stored");
  const long a = cubes_per_axis(spec, cube.level);
  for (int d = 0; d < spec.n; ++d) {
    if (cube.index[d] < 0 || cube.index[d] >= a) throw RangeError("CubeFamily: cube outside box");
  }
  levels[static_cast<std::size_t>(cube.level)][flat_index(cube.index, a, spec.n)] = on ? 1 : 0;
}

std::size_t CubeFamily::count(int j) const {
  std::size_t c = 0;
  for (auto v : levels[static_cast<std::size_t>(j)]) c += v;
  return c;
}

std::size_t CubeFamily::count() const {
  std::size_t c = 0;
  for (int j = 0; j < level_count(); ++j) c += count(j);
  return c;
}

std::vector<DyadicCube> CubeFamily::cubes(int j) const {
  std::vector<DyadicCube> out;
  const long a = cubes_per_axis(spec, j);
  const auto& lv = levels[static_cast<std::size_t>(j)];
  for (std::size_t p = 0; p < lv.size(); ++p) {
    if (lv[p]) out.push_back({spec.n, j, unflatten(p, a, spec.n)});
  }
  return out;
}

}  // namespace lipdev
