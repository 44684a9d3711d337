#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "lipdev/hyperbolic.hpp"

using namespace lipdev;

namespace {

// Textbook arccosh with no rearrangement, for moderate distances only.
double plain_rho(double x1, double y1, double x2, double y2) {
  return std::acosh(1.0 + ((x1 - x2) * (x1 - x2) + (y1 - y2) * (y1 - y2)) / (2 * y1 * y2));
}

// All-pairs scan over cell centres.
RegionMask brute_neighborhood(const RegionMask& m, double R) {
  RegionMask out = RegionMask::empty(m.spec, m.level_count(), m.subbands);
  const double box = m.spec.box_side();
  for (int j = 0; j < m.level_count(); ++j)
    for (int b = 0; b < m.subbands; ++b)
      for (std::size_t p = 0; p < m.cells(); ++p) {
        const auto t = cell_centre(m, j, b, p);
        for (int j2 = 0; j2 < m.level_count(); ++j2)
          for (int b2 = 0; b2 < m.subbands; ++b2)
            for (std::size_t p2 = 0; p2 < m.cells(); ++p2) {
              if (!m.get(j2, b2, p2)) continue;
              auto s = cell_centre(m, j2, b2, p2);
              if (m.spec.ext == Extension::periodic) {
                for (int d = 0; d < m.spec.n; ++d) {
                  double dx = s.x[d] - t.x[d];
                  dx -= box * std::round(dx / box);
                  s.x[d] = t.x[d] + dx;
                }
              }
              if (rho(t, s) < R) out.set(j, b, p);
            }
      }
  return out;
}

}  // namespace

TEST_CASE("rho examples") {
  const auto p = hpoint(0.0, 1.0);
  CHECK(rho(p, p) == 0.0);
  CHECK(rho(p, hpoint(0.0, std::exp(2.0))) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(rho(p, hpoint(2.0, 1.0)) == doctest::Approx(std::acosh(3.0)).epsilon(1e-14));
  CHECK(std::abs(rho(p, hpoint(2.0, 1.0)) - 1.762747) < 1e-6);
  CHECK_THROWS_AS(hpoint(0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(hpoint(0.0, 0.0, -1.0), ConfigError);
}

TEST_CASE("rho formulas agree and behave as a metric") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-3, 3), uy(-6, 2);
  auto draw = [&] { return hpoint(ux(rng), ux(rng), std::exp(uy(rng))); };
  for (int i = 0; i < 20000; ++i) {
    const auto a = draw(), b = draw(), c = draw();
    const double ab = rho(a, b);
    CHECK(std::abs(ab - rho_log(a, b)) <= 1e-10 * std::max(ab, 1e-300));
    CHECK(ab == rho(b, a));
    CHECK(rho(a, c) <= ab + rho(b, c) + 1e-12);
    const double direct = plain_rho(a.x[0], a.y, b.x[0], b.y);
    if (a.x[1] == b.x[1] && direct > 1e-3) CHECK(ab == doctest::Approx(direct).epsilon(1e-12));
  }
  // Tiny separations use the log form and keep relative accuracy.
  const auto p = hpoint(0.3, 0.2);
  const auto q = hpoint(0.3 + 1e-9, 0.2);
  CHECK(rho(p, q) == doctest::Approx(1e-9 / 0.2).epsilon(1e-8));
  // Scaling and horizontal translation invariance.
  const auto u = hpoint(0.1, -0.4, 0.3), v = hpoint(1.2, 0.5, 0.05);
  CHECK(rho(hpoint(0.2, -0.8, 0.6), hpoint(2.4, 1.0, 0.1)) == doctest::Approx(rho(u, v)).epsilon(1e-14));
  CHECK(rho(hpoint(5.1, 2.6, 0.3), hpoint(6.2, 3.5, 0.05)) == doctest::Approx(rho(u, v)).epsilon(1e-13));
  // Vertical pairs reduce to |ln(y2 / y1)|.
  for (double y : {1e-4, 0.3, 2.0, 50.0})
    CHECK(std::abs(rho(hpoint(1.0, y), hpoint(1.0, 3.7 * y)) - std::log(3.7)) <= 1e-12);
}

TEST_CASE("ball box bounds") {
  const auto z = hpoint(0.0, 1.0);
  const auto bb = ball_box_bounds(z, 0.25);
  CHECK(bb.inner.y_lo == 15.0 / 16);
  CHECK(bb.inner.y_hi == 17.0 / 16);
  CHECK(bb.outer.y_lo == 0.5);
  CHECK(bb.outer.y_hi == 1.5);
  CHECK_THROWS_AS(ball_box_bounds(z, 0.3), RangeError);
  CHECK_THROWS_AS(ball_box_bounds(z, 0.0), RangeError);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u01(0, 1);
  for (int trial = 0; trial < 500; ++trial) {
    const auto c = hpoint(4 * u01(rng) - 2, std::exp(4 * u01(rng) - 3));
    const double t = 0.25 * (1 - u01(rng));
    const auto b = ball_box_bounds(c, t);
    for (int k = 0; k < 40; ++k) {
      const auto in = hpoint(c.x[0] + (2 * u01(rng) - 1) * b.inner.radius,
                             b.inner.y_lo + u01(rng) * (b.inner.y_hi - b.inner.y_lo));
      CHECK(rho(c, in) < t);
      const auto cand = hpoint(c.x[0] + (2 * u01(rng) - 1) * b.outer.radius,
                               b.outer.y_lo + u01(rng) * (b.outer.y_hi - b.outer.y_lo));
      if (rho(c, cand) < t) CHECK(b.outer.contains(cand));
    }
  }
}

TEST_CASE("mu_measure") {
  GridSpec spec{1, 6, 0, Extension::periodic};
  auto m = RegionMask::empty(spec, 6, 4);
  CHECK(mu_measure(m) == 0.0);
  m.add_tent({1, 0, {0, 0}});
  CHECK(mu_measure(m) == doctest::Approx(std::numbers::ln2).epsilon(1e-14));

  auto full = RegionMask::empty(spec, 6, 4);
  full.add_column({1, 0, {0, 0}}, 0, 5);
  CHECK(mu_measure(full) == doctest::Approx(6 * std::numbers::ln2).epsilon(1e-14));

  GridSpec sq{2, 4, 1, Extension::zero};
  auto t2 = RegionMask::empty(sq, 4, 3);
  t2.add_tent({2, 2, {1, 5}});
  CHECK(mu_measure(t2) == doctest::Approx(std::numbers::ln2 / 16).epsilon(1e-14));
}

TEST_CASE("hyper_neighborhood matches the brute-force scan") {
  for (auto ext : {Extension::zero, Extension::periodic}) {
    for (int n : {1, 2}) {
      GridSpec spec{n, n == 1 ? 5 : 3, 0, ext};
      const int L = spec.J;
      auto single = RegionMask::empty(spec, L, 3);
      single.set(0, 1, n == 1 ? 16 : 36);
      for (double R : {0.1, 0.5, 1.0, 2.5}) CHECK(hyper_neighborhood(single, R) == brute_neighborhood(single, R));

      std::mt19937 rng(n * 10 + (ext == Extension::zero));
      std::bernoulli_distribution coin(0.04);
      auto sparse = RegionMask::empty(spec, L, 3);
      for (int j = 0; j < L; ++j)
        for (int b = 0; b < 3; ++b)
          for (std::size_t p = 0; p < sparse.cells(); ++p)
            if (coin(rng)) sparse.set(j, b, p);
      for (double R : {0.3, 1.0, 2.0}) CHECK(hyper_neighborhood(sparse, R) == brute_neighborhood(sparse, R));
    }
  }
}

TEST_CASE("hyper_neighborhood properties") {
  GridSpec spec{1, 7, 0, Extension::zero};
  auto m = RegionMask::empty(spec, 7, 4);
  CHECK(hyper_neighborhood(m, 3.0).is_empty());
  m.add_tent({1, 3, {5, 0}});
  m.set(5, 2, 100);
  RegionMask prev = m;
  for (double R : {0.01, 0.2, 0.7, 1.5, 3.0, 6.0}) {
    auto d = hyper_neighborhood(m, R);
    CHECK(m.subset_of(d));
    CHECK(prev.subset_of(d));
    prev = d;
  }
  CHECK_THROWS_AS(hyper_neighborhood(m, 0.0), ConfigError);
}

TEST_CASE("mu of discretised balls is comparable to the ball scale") {
  // Balls chosen to fit inside the box and the sampled heights.
  GridSpec spec{1, 12, 0, Extension::periodic};
  const int M = 16;
  for (double R : {1.0, 2.0, 3.0}) {
    for (int j : {4, 6}) {
      auto seed = RegionMask::empty(spec, spec.J, M);
      seed.set(j, M / 2, 2048);
      const double y = seed.y_mid(j, M / 2);
      const double mu = mu_measure(hyper_neighborhood(seed, R));
      // Exact dx dy / y measure of a ball of radius R at height y: 2 pi y (cosh R - 1).
      const double exact = 2 * std::numbers::pi * y * (std::cosh(R) - 1);
      CHECK(mu / exact > 0.5);
      CHECK(mu / exact < 2.0);
    }
  }
}

TEST_CASE("geodesic lengths") {
  CHECK(geodesic_length(hpoint(0.2, 0.5), hpoint(0.2, 0.5), 10) == 0.0);
  CHECK(std::abs(geodesic_length(hpoint(0.0, 1.0), hpoint(0.0, std::numbers::e), 10000) - 1.0) < 1e-6);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 50; ++i) {
    const auto p = hpoint(u(rng), u(rng), std::exp(u(rng)));
    const auto q = hpoint(u(rng), u(rng), std::exp(u(rng)));
    CHECK(std::abs(geodesic_length(p, q, 10000) / rho(p, q) - 1.0) <= 1e-6);
  }
  CHECK_THROWS_AS(geodesic_length(hpoint(0, 1), hpoint(1, 1), 1), ConfigError);
}
