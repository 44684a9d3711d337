#include "lipdev/hyperbolic.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "lipdev/parallel.hpp"

namespace lipdev {

double mu_measure(const RegionMask& m) {
  return static_cast<double>(m.count()) * m.spec.cell_volume() * m.log_width();
}

HPoint2 cell_centre(const RegionMask& m, int j, int b, std::size_t p) {
  const Index2 idx = unflatten(p, m.spec.axis_samples(), m.spec.n);
  const double h = m.spec.spacing();
  return hpoint((idx[0] + 0.5) * h, m.spec.n == 2 ? (idx[1] + 0.5) * h : 0.0, m.y_mid(j, b));
}

namespace {

constexpr double kFar = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas (Felzenszwalb-Huttenlocher), squared distance
// in index units.
std::vector<double> edt_line(const std::vector<double>& f) {
  const int n = static_cast<int>(f.size());
  std::vector<double> d(f.size(), kFar);
  std::vector<int> v(f.size());
  std::vector<double> z(f.size() + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kFar) continue;
    while (k >= 0) {
      const double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * (q - v[k]));
      if (s <= z[k]) {
        --k;
        continue;
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = kFar;
      break;
    }
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kFar;
      z[1] = kFar;
    }
  }
  if (k < 0) return d;
  int i = 0;
  for (int q = 0; q < n; ++q) {
    while (z[i + 1] < q) ++i;
    const double dq = q - v[i];
    d[q] = dq * dq + f[v[i]];
  }
  return d;
}

// Squared distance along a line, wrapping when periodic.
std::vector<double> edt_axis(const std::vector<double>& f, bool periodic) {
  if (!periodic) return edt_line(f);
  const std::size_t n = f.size();
  std::vector<double> tiled(3 * n);
  for (std::size_t t = 0; t < 3; ++t) std::copy(f.begin(), f.end(), tiled.begin() + static_cast<std::ptrdiff_t>(t * n));
  const auto d = edt_line(tiled);
  return {d.begin() + static_cast<std::ptrdiff_t>(n), d.begin() + static_cast<std::ptrdiff_t>(2 * n)};
}

// Squared horizontal distance (index units) from each cell to the nearest
// marked cell of a row.
std::vector<double> row_distance(const RegionMask& m, int j, int b) {
  const GridSpec& spec = m.spec;
  const std::size_t cells = m.cells();
  const bool periodic = spec.ext == Extension::periodic;
  std::vector<double> f(cells);
  for (std::size_t p = 0; p < cells; ++p) f[p] = m.get(j, b, p) ? 0.0 : kFar;
  if (spec.n == 1) return edt_axis(f, periodic);
  const auto a = static_cast<std::size_t>(spec.axis_samples());
  std::vector<double> line(a);
  for (std::size_t r = 0; r < a; ++r) {
    for (std::size_t c = 0; c < a; ++c) line[c] = f[r * a + c];
    const auto d = edt_axis(line, periodic);
    for (std::size_t c = 0; c < a; ++c) f[r * a + c] = d[c];
  }
  for (std::size_t c = 0; c < a; ++c) {
    for (std::size_t r = 0; r < a; ++r) line[r] = f[r * a + c];
    const auto d = edt_axis(line, periodic);
    for (std::size_t r = 0; r < a; ++r) f[r * a + c] = d[r];
  }
  return f;
}

}  // namespace

RegionMask hyper_neighborhood(const RegionMask& m, double R) {
  if (!(R > 0.0)) throw ConfigError("hyper_neighborhood: R must be positive");
  const int L = m.level_count();
  const int M = m.subbands;
  const std::size_t rows = static_cast<std::size_t>(L * M);
  const std::size_t cells = m.cells();
  const double h = m.spec.spacing();
  const double c1 = std::cosh(R) - 1.0;

  std::vector<std::vector<double>> dist(rows);
  std::vector<char> present(rows, 0);
  parallel_for(rows, [&](std::size_t row) {
    const int j = static_cast<int>(row) / M, b = static_cast<int>(row) % M;
    for (std::size_t p = 0; p < cells && !present[row]; ++p) present[row] = m.get(j, b, p);
    if (present[row]) dist[row] = row_distance(m, j, b);
  });

  RegionMask out = RegionMask::empty(m.spec, L, M);
  parallel_for(rows, [&](std::size_t target) {
    const int jt = static_cast<int>(target) / M, bt = static_cast<int>(target) % M;
    const double v = m.y_mid(jt, bt);
    for (std::size_t src = 0; src < rows; ++src) {
      if (!present[src]) continue;
      const double y = m.y_mid(static_cast<int>(src) / M, static_cast<int>(src) % M);
      // |u - x|^2 + (v - y)^2 < 2 v y (cosh R - 1)
      const double budget = 2.0 * v * y * c1 - (v - y) * (v - y);
      if (!(budget > 0.0)) continue;
      const auto& d = dist[src];
      for (std::size_t p = 0; p < cells; ++p)
        if (d[p] * h * h < budget) out.set(jt, bt, p);
    }
  });
  return out;
}

template <int D>
double geodesic_length(const HalfSpacePoint<double, D>& p, const HalfSpacePoint<double, D>& q, int steps) {
  if (steps < 2) throw ConfigError("geodesic_length: steps must be >= 2");
  if (steps % 2) ++steps;
  const double d = (q.x - p.x).norm();
  if (d == 0.0 && p.y == q.y) return 0.0;

  auto simpson = [steps](auto&& g, double a, double b) {
    const double w = (b - a) / steps;
    double acc = g(a) + g(b);
    for (int i = 1; i < steps; ++i) acc += (i % 2 ? 4.0 : 2.0) * g(a + i * w);
    return acc * w / 3.0;
  };

  if (d == 0.0) {
    const double dy = q.y - p.y;
    return std::abs(simpson([&](double t) { return dy / (p.y + t * dy); }, 0.0, 1.0));
  }
  // Circle through both points centred on the boundary; arc length is
  // the integral of d theta / sin theta.
  const double c = (d * d + q.y * q.y - p.y * p.y) / (2.0 * d);
  const double tp = std::atan2(p.y, -c);
  const double tq = std::atan2(q.y, d - c);
  return std::abs(simpson([](double th) { return 1.0 / std::sin(th); }, tp, tq));
}

template double geodesic_length<1>(const HPoint1&, const HPoint1&, int);
template double geodesic_length<2>(const HPoint2&, const HPoint2&, int);

}  // namespace lipdev
