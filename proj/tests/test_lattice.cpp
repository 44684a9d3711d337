#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "lipdev/lattice.hpp"

using namespace lipdev;

namespace {

constexpr double ln2 = std::numbers::ln2;

LevelStack random_stack(const GridSpec& spec, int L, unsigned seed, double sparsity = 0.5) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  LevelStack st = LevelStack::zeros(spec, L);
  for (auto& f : st.levels)
    for (auto& v : f) v = u(rng) < sparsity ? u(rng) * 2 : 0.0;
  return st;
}

// Cells of the grid whose centre lies in the cube.
std::vector<std::size_t> cells_in(const GridSpec& spec, const DyadicCube& q) {
  SampledFunction probe{spec, Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(spec.sample_count()))};
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < spec.sample_count(); ++p)
    if (q.contains(probe.centre(p))) out.push_back(p);
  return out;
}

double powq(double v, double q) { return std::isinf(q) ? v : std::pow(v, q); }

// Direct evaluation of the type norms from their definitions, one cube at a time.
double oracle_type(const LevelStack& st, const LatticeSpec& ls) {
  const GridSpec& spec = st.spec;
  const double vol = spec.cell_volume();
  double best = 0.0;
  for (int l = -spec.K; l <= spec.J; ++l)
    for (const auto& Q : cubes_at_level(spec, l)) {
      const auto cells = cells_in(spec, Q);
      double val = 0.0;
      if (ls.tag == LatticeTag::besov_type) {
        double acc = 0.0;
        for (int j = std::max(l, 0); j < st.level_count(); ++j) {
          double s = 0.0;
          for (auto p : cells) s += std::pow(st.levels[j][static_cast<Eigen::Index>(p)], ls.p) * vol;
          acc += std::pow(std::pow(s, 1.0 / ls.p), ls.q);
        }
        val = std::pow(acc, 1.0 / ls.q);
      } else {
        double s = 0.0;
        for (auto p : cells) {
          double g = 0.0;
          for (int j = std::max(l, 0); j < st.level_count(); ++j)
            g += std::pow(st.levels[j][static_cast<Eigen::Index>(p)], ls.q);
          s += std::pow(g, ls.p / ls.q) * vol;
        }
        val = std::pow(s, 1.0 / ls.p);
      }
      best = std::max(best, std::pow(Q.volume(), -ls.tau) * val);
    }
  return best;
}

double oracle_f_inf(const LevelStack& st, double q) {
  const GridSpec& spec = st.spec;
  double best = 0.0;
  for (int l = 0; l <= spec.J; ++l)
    for (const auto& I : cubes_at_level(spec, l)) {
      const auto cells = cells_in(spec, I);
      double acc = 0.0;
      for (auto p : cells)
        for (int j = l; j < st.level_count(); ++j) acc += std::pow(st.levels[j][static_cast<Eigen::Index>(p)], q);
      best = std::max(best, std::pow(acc / cells.size(), 1.0 / q));
    }
  return best;
}

double oracle_carleson(const RegionMask& m) {
  const GridSpec& spec = m.spec;
  double best = 0.0;
  for (int l = 0; l <= spec.J; ++l)
    for (const auto& I : cubes_at_level(spec, l)) {
      double mu = 0.0;
      for (auto p : cells_in(spec, I))
        for (int j = 0; j < m.level_count(); ++j)
          for (int b = 0; b < m.subbands; ++b)
            if (m.get(j, b, p) && m.y_hi(j, b) <= I.side()) mu += spec.cell_volume() * std::log(m.y_hi(j, b) / m.y_lo(j, b));
      best = std::max(best, mu / I.volume());
    }
  return best;
}

std::vector<LatticeSpec> norm_tags() {
  return {LatticeSpec::besov(2, 2),          LatticeSpec::besov(1, kInf),       LatticeSpec::besov(0.5, 3),
          LatticeSpec::triebel(2, 2),        LatticeSpec::triebel(kInf, 1),     LatticeSpec::triebel(0.7, 0.5),
          LatticeSpec::f_inf(2),             LatticeSpec::f_inf(0.5),           LatticeSpec::besov_type(2, 2, 0.25),
          LatticeSpec::besov_type(1, 0.5, 0.0), LatticeSpec::tl_type(2, 2, 0.25), LatticeSpec::tl_type(1.5, 3, 0.5)};
}

}  // namespace

TEST_CASE("lattice spec validation and JSON") {
  CHECK_THROWS_AS(LatticeSpec::besov(0, 1).validate(), ConfigError);
  CHECK_THROWS_AS(LatticeSpec::triebel(2, -1).validate(), ConfigError);
  try {
    LatticeSpec::besov_type(2, 2, 0.5).validate();
    FAIL("expected tau rejection");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("tau < 1/p") != std::string::npos);
  }
  for (const auto& s : norm_tags()) CHECK(LatticeSpec::from_json(s.to_json()) == s);
  CHECK(LatticeSpec::from_json(LatticeSpec::nu_m().to_json()) == LatticeSpec::nu_m());
  CHECK(LatticeSpec::from_json(R"({"tag":"besov","p":"inf","q":2})").p == kInf);
  CHECK_THROWS_AS(LatticeSpec::from_json(R"({"tag":"besov","r":2})"), ConfigError);
  CHECK_THROWS_AS(LatticeSpec::from_json(R"({"tag":"sobolev"})"), ConfigError);
  CHECK_THROWS_AS(LatticeSpec::from_json("{"), ConfigError);
}

TEST_CASE("stacks from cubes and bad sets") {
  GridSpec spec{1, 5, 1, Extension::zero};
  auto fam = CubeFamily::empty(spec, 5);
  auto st0 = stack_from_cubes(fam);
  for (const auto& f : st0.levels) CHECK(f.abs().maxCoeff() == 0.0);
  fam.set({1, 2, {3, 0}});
  auto st = stack_from_cubes(fam);
  for (int j = 0; j < 5; ++j) CHECK(st.levels[j].sum() == (j == 2 ? 8.0 : 0.0));
  CHECK(st.levels[2][24] == 1.0);
  CHECK(st.levels[2][31] == 1.0);
  CHECK(st.levels[2][32] == 0.0);

  auto m = RegionMask::empty(spec, 5, 4);
  CHECK(stack_from_badset(m).levels[0].maxCoeff() == 0.0);
  m.add_tent({1, 0, {0, 0}});
  auto sb = stack_from_badset(m);
  for (long p = 0; p < 32; ++p) CHECK(sb.levels[0][p] == doctest::Approx(ln2).epsilon(1e-15));
  CHECK(sb.levels[0][40] == 0.0);

  auto half = RegionMask::empty(spec, 5, 4);
  for (std::size_t p = 0; p < 32; ++p) {
    half.set(0, 2, p);
    half.set(0, 3, p);
  }
  CHECK(stack_from_badset(half).levels[0][5] == doctest::Approx(ln2 / 2).epsilon(1e-15));
}

TEST_CASE("x_norm closed forms") {
  for (int n : {1, 2}) {
    GridSpec spec{n, 5, 1, Extension::zero};
    for (const auto& t : norm_tags()) CHECK(x_norm(LevelStack::zeros(spec, 5), t) == 0.0);
    // f_j = 1_[0,1]^n for j < m.
    for (int m : {1, 3, 5}) {
      auto fam = CubeFamily::empty(spec, 5);
      for (int j = 0; j < m; ++j)
        for (const auto& c : cubes_at_level(spec, j))
          if (c.upper(0) <= 1.0 && (n == 1 || c.upper(1) <= 1.0)) fam.set(c);
      const auto st = stack_from_cubes(fam);
      for (double p : {0.5, 1.0, 2.0, kInf})
        for (double q : {0.5, 1.0, 3.0}) {
          CHECK(x_norm(st, LatticeSpec::besov(p, q)) == doctest::Approx(std::pow(m, 1.0 / q)).epsilon(1e-12));
          CHECK(x_norm(st, LatticeSpec::triebel(p, q)) == doctest::Approx(std::pow(m, 1.0 / q)).epsilon(1e-12));
          CHECK(x_norm(st, LatticeSpec::f_inf(q)) == doctest::Approx(std::pow(m, 1.0 / q)).epsilon(1e-12));
        }
      CHECK(x_norm(st, LatticeSpec::besov(2, kInf)) == 1.0);
    }
  }
  // Single level-0 indicator under the Besov-type norm: the unit cube gives
  // 1, a level-1 sub-cube 2^{n tau} 2^{-n/p}.
  GridSpec spec{1, 4, 0, Extension::zero};
  auto fam = CubeFamily::empty(spec, 4);
  fam.set({1, 0, {0, 0}});
  const auto st = stack_from_cubes(fam);
  const double p = 2, tau = 0.3;
  CHECK(std::pow(2.0, tau) * std::pow(2.0, -1.0 / p) < 1.0);
  CHECK(x_norm(st, LatticeSpec::besov_type(p, 2, tau)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("x_norm matches cube-by-cube oracles") {
  for (int n : {1, 2}) {
    GridSpec spec{n, n == 1 ? 5 : 3, 1, Extension::zero};
    const auto st = random_stack(spec, spec.J, 40u + static_cast<unsigned>(n));
    for (const auto& t : norm_tags()) {
      if (t.tag == LatticeTag::besov_type || t.tag == LatticeTag::tl_type) {
        CHECK(x_norm(st, t) == doctest::Approx(oracle_type(st, t)).epsilon(1e-12));
      } else if (t.tag == LatticeTag::f_inf) {
        CHECK(x_norm(st, t) == doctest::Approx(oracle_f_inf(st, t.q)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("lattice monotonicity, homogeneity and shifts") {
  GridSpec spec{1, 6, 1, Extension::zero};
  const auto f = random_stack(spec, 6, 1, 0.3);
  LevelStack g = f;
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (auto& lv : g.levels)
    for (auto& v : lv) v += u(rng) < 0.2 ? u(rng) : 0.0;
  for (const auto& t : norm_tags()) {
    const double nf = x_norm(f, t);
    CHECK(nf <= x_norm(g, t) * (1 + 1e-14));
    LevelStack f4 = f;
    for (auto& lv : f4.levels) lv *= 4.0;
    CHECK(x_norm(f4, t) == doctest::Approx(4 * nf).epsilon(1e-13));
    const double bound = std::pow(2.0, spec.n * (1.0 / (std::isinf(t.p) ? kInf : t.p) + 1));
    CHECK(x_norm(shift(f, ShiftDir::left), t) <= bound * nf * (1 + 1e-12));
    CHECK(x_norm(shift(f, ShiftDir::right), t) <= bound * nf * (1 + 1e-12));
  }
  const auto rl = shift(shift(f, ShiftDir::right), ShiftDir::left);
  for (int j = 0; j + 1 < f.level_count(); ++j) CHECK((rl.levels[j] == f.levels[j]).all());
  const auto l2 = shift(stack_from_cubes([&] {
                          auto fam = CubeFamily::empty(spec, 6);
                          fam.set({1, 2, {1, 0}});
                          return fam;
                        }()),
                        ShiftDir::left);
  CHECK(l2.levels[1].sum() == 16.0);
  CHECK(l2.levels[2].sum() == 0.0);
  CHECK_THROWS_AS(x_norm(f, LatticeSpec::nu_m()), WrongFunctionalError);
}

TEST_CASE("convexification") {
  GridSpec spec{1, 5, 0, Extension::periodic};
  const auto f = random_stack(spec, 5, 8);
  const auto id = convexify(f, 1.0);
  for (int j = 0; j < 5; ++j) CHECK((id.levels[j] == f.levels[j]).all());
  auto fam = CubeFamily::empty(spec, 5);
  fam.set({1, 3, {2, 0}});
  const auto ind = stack_from_cubes(fam);
  const auto ind3 = convexify(ind, 0.3);
  for (int j = 0; j < 5; ++j) CHECK((ind3.levels[j] == ind.levels[j]).all());
  auto m = RegionMask::empty(spec, 5, 4);
  m.add_tent({1, 0, {0, 0}});
  CHECK(convexify(stack_from_badset(m), 2).levels[0][3] == doctest::Approx(ln2 * ln2).epsilon(1e-14));
  // ||f||_{X^u} = ||f^u||_X^{1/u}; for Besov ell^q(L^p), X^u is ell^{qu}(L^{pu}).
  for (double u : {0.5, 1.0, 2.0}) {
    const double lhs = std::pow(x_norm(convexify(f, u), LatticeSpec::besov(2, 3)), 1.0 / u);
    CHECK(lhs == doctest::Approx(x_norm(f, LatticeSpec::besov(2 * u, 3 * u))).epsilon(1e-12));
    const double tl = std::pow(x_norm(convexify(f, u), LatticeSpec::triebel(1.5, 2)), 1.0 / u);
    CHECK(tl == doctest::Approx(x_norm(f, LatticeSpec::triebel(1.5 * u, 2 * u))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(convexify(f, 0.0), ConfigError);
}

TEST_CASE("carleson_M exact values") {
  GridSpec spec{1, 6, 1, Extension::zero};
  CHECK(carleson_M(RegionMask::empty(spec, 6, 4)) == 0.0);
  for (int l = 0; l < 6; ++l)
    for (long k : {0L, 1L, (1L << (l + 1)) - 1}) {
      if (k >= cubes_per_axis(spec, l)) continue;
      auto m = RegionMask::empty(spec, 6, 4);
      m.add_tent({1, l, {k, 0}});
      CHECK(std::abs(carleson_M(m) - ln2) <= 1e-12);
    }
  for (int J : {6, 8, 10}) {
    GridSpec g{1, J, 0, Extension::periodic};
    auto m = RegionMask::empty(g, J + 1, 4);
    m.add_column({1, 0, {0, 0}}, 0, J);
    CHECK(std::abs(carleson_M(m) - (J + 1) * ln2) <= 1e-12);
  }
  for (int n : {1, 2}) {
    GridSpec g{n, n == 1 ? 5 : 3, 1, Extension::zero};
    std::mt19937 rng(n);
    std::bernoulli_distribution coin(0.15);
    auto m = RegionMask::empty(g, g.J, 3);
    for (int j = 0; j < g.J; ++j)
      for (int b = 0; b < 3; ++b)
        for (std::size_t p = 0; p < m.cells(); ++p)
          if (coin(rng)) m.set(j, b, p);
    CHECK(carleson_M(m) == doctest::Approx(oracle_carleson(m)).epsilon(1e-12));
  }
}

TEST_CASE("nu_eval") {
  GridSpec spec{1, 7, 0, Extension::periodic};
  auto m = RegionMask::empty(spec, 7, 4);
  CHECK(nu_eval(m, LatticeSpec::nu_m()) == 0.0);
  CHECK(nu_eval(m, LatticeSpec::nu_count()) == 0.0);
  m.set(1, 0, 3);
  m.set(3, 2, 9);
  m.set(5, 1, 100);
  CHECK(nu_eval(m, LatticeSpec::nu_count()) == 3.0);
  auto tents = RegionMask::empty(spec, 7, 4);
  for (int j = 0; j < 7; ++j)
    for (const auto& c : cubes_at_level(spec, j)) tents.add_tent(c);
  CHECK(nu_eval(tents, LatticeSpec::nu_m()) == doctest::Approx(7 * ln2).epsilon(1e-13));
  CHECK_THROWS_AS(nu_eval(m, LatticeSpec::besov(2, 2)), WrongFunctionalError);
}
