#include "doctest.h"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "lipdev/corpus.hpp"
#include "lipdev/deviation.hpp"
#include "lipdev/parallel.hpp"

using namespace lipdev;

namespace {

constexpr double ln2 = std::numbers::ln2;

SampledFunction scaled(const SampledFunction& f, double k) { return {f.spec, f.values * k}; }

WaveletCoefficients scaled(const WaveletCoefficients& c, double k) {
  WaveletCoefficients out = c;
  out.data *= k;
  return out;
}

// Values grow linearly with the resolution below `edge` and are flat above.
FunctionalSide step_side(double edge, std::vector<double> profile) {
  return FunctionalSide(10, std::move(profile), 1.0, false, [edge](double eps) {
    if (eps < edge) return std::vector<double>{8.0, 9.0, 10.0};
    return std::vector<double>{2.0, 2.0, 2.0};
  });
}

}  // namespace

TEST_CASE("preset parsing") {
  CHECK(Preset::parse("jsbmo").kind == PresetKind::jsbmo);
  const auto b = Preset::parse(" besov( 2, 3 ) ");
  CHECK(b.kind == PresetKind::besov);
  CHECK(b.p == 2.0);
  CHECK(b.q == 3.0);
  CHECK(b.name() == "besov(2,3)");
  CHECK(Preset::parse("triebel_inf(inf)").q == kInf);
  CHECK(Preset::parse("tl_type(2,1,0.25)").tau == 0.25);
  CHECK(Preset::parse("sobolev(1.5)").name() == "sobolev(1.5)");
  CHECK(Preset::parse("besov_type(1,2,0.5)").family() == "besov_type");
  for (const char* bad : {"besov(2)", "jsbmo(1)", "holder(1)", "besov(2,x)", "besov(2,3", ""})
    CHECK_THROWS_AS(Preset::parse(bad), ConfigError);

  DiffConfig cfg;
  CHECK_NOTHROW(Preset::parse("besov(2,2)").validate(cfg));
  CHECK_THROWS_AS(Preset::parse("besov(2,inf)").validate(cfg), ConfigError);
  CHECK_THROWS_AS(Preset::parse("sobolev(2)").validate(cfg), ConfigError);
  CHECK_NOTHROW(Preset::parse("sobolev(2)").validate({2, 1.0}));
  CHECK_THROWS_AS(Preset::parse("sobolev(2)").validate({1, 1.0}), ConfigError);
  CHECK_THROWS_AS(Preset::parse("tl_type(2,2,0.5)").validate(cfg), ConfigError);
  CHECK_NOTHROW(Preset::parse("tl_type(2,2,0.4)").validate(cfg));

  CHECK(Preset::parse("sobolev(3)").convexification() == 0.5);
  CHECK(Preset::parse("besov(4,2)").convexification() == 0.25);
  CHECK(Preset::parse("triebel(4,2)").convexification() == 0.5);
  CHECK(Preset::parse("jsbmo").difference_lattice().tag == LatticeTag::nu_m);
  CHECK(Preset::parse("besov_inf(2)").difference_lattice().tag == LatticeTag::nu_count);
}

TEST_CASE("eps grid") {
  const auto g = eps_grid(3.0);
  REQUIRE(g.size() == 33);
  CHECK(g.back() == 3.0);
  CHECK(g.front() == 3.0 / 256);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == doctest::Approx(3.0 * std::exp2((double(i) - 32) / 4)));
  // Scaling the top scales every point exactly.
  const auto h = eps_grid(6.0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(h[i] == 2 * g[i]);
  CHECK_THROWS_AS(eps_grid(1.0, 1), ConfigError);
}

TEST_CASE("classifier on synthetic sides") {
  ClassifierConfig cc;
  const std::vector<double> flat(10, 1.0);
  const auto eps = eps_grid(1.0);

  const auto res = deviation_constant(step_side(0.3, flat), eps, cc);
  CHECK(res.flag == DeviationFlag::resolved);
  CHECK(res.eps_hat >= 0.3);
  CHECK(res.eps_hat <= 0.3 * (1 + cc.bisection_tol));
  for (std::size_t i = 0; i < eps.size(); ++i) CHECK(res.divergent[i] == (eps[i] < 0.3));

  CHECK(deviation_constant(step_side(2.0, flat), eps, cc).flag == DeviationFlag::unresolved);
  CHECK(deviation_constant(step_side(2.0, flat), eps, cc).eps_hat == 1.0);
  CHECK(deviation_constant(step_side(1e-4, flat), eps, cc).flag == DeviationFlag::floor);
  CHECK(deviation_constant(step_side(1e-4, flat), eps, cc).eps_hat == eps.front());

  // A decaying level profile overrides growing values.
  std::vector<double> decaying;
  for (int j = 0; j < 10; ++j) decaying.push_back(std::exp2(-j));
  const auto d = deviation_constant(step_side(0.3, decaying), eps, cc);
  CHECK(d.profile_decays);
  CHECK(d.profile_slope == doctest::Approx(-1.0));
  CHECK(d.flag == DeviationFlag::floor);

  // Divergence flags are made monotone in eps.
  FunctionalSide holes(10, flat, 1.0, false, [](double eps) {
    if (eps < 0.5 && !(eps > 0.1 && eps < 0.2)) return std::vector<double>{1.0, 2.0, 3.0};
    return std::vector<double>{1.0, 1.0, 1.0};
  });
  const auto h = deviation_constant(holes, eps, cc);
  for (std::size_t i = 0; i < eps.size(); ++i) CHECK(h.divergent[i] == (eps[i] < 0.5));

  FunctionalSide zero(10, std::vector<double>(10, 0.0), 0.0, true, nullptr);
  const auto z = deviation_constant(zero, eps, cc);
  CHECK(z.flag == DeviationFlag::zero);
  CHECK(z.eps_hat == eps.front());
  CHECK(z.curve.values.isZero());
}

TEST_CASE("mass curves") {
  GridSpec spec{1, 9, 0, Extension::periodic};
  DiffConfig cfg{1, 0.5};
  const auto sys = WaveletSystem::for_smoothness(0.5, 1);
  const auto w = make_entry("weierstrass", {}, spec, sys);
  for (const char* p : {"jsbmo", "besov(2,2)", "triebel(2,1)", "besov_inf(2)"}) {
    const auto curve = mass_curve(w.f, cfg, Preset::parse(p), eps_grid(8.0, 17));
    CHECK(curve.resolutions == std::vector<int>{7, 8, 9});
    for (Eigen::Index k = 0; k < 3; ++k)
      for (Eigen::Index i = 1; i < curve.values.rows(); ++i) CHECK(curve.values(i, k) <= curve.values(i - 1, k));
    // Truncation to fewer levels never increases the value.
    for (Eigen::Index i = 0; i < curve.values.rows(); ++i) {
      CHECK(curve.values(i, 0) <= curve.values(i, 1));
      CHECK(curve.values(i, 1) <= curve.values(i, 2));
    }
  }
  const auto c = make_entry("const", {{"c", 3}}, spec, sys);
  CHECK(mass_curve(c.f, cfg, Preset::parse("jsbmo"), {0.1, 1.0}).values.isZero());
  CHECK_THROWS_AS(mass_curve(w.f, cfg, Preset::parse("jsbmo"), {1.0, 0.5}), ConfigError);
}

TEST_CASE("f_flat wavelet side matches the tent-union integral") {
  // Every cube of [0,1] at levels 0..J'-1 is marked for eps < 1, so the
  // union of tents is [0,1] x (2^-J', 1] with mass J' ln 2.
  GridSpec spec{1, 9, 0, Extension::periodic};
  const auto sys = WaveletSystem::for_smoothness(0.5, 1);
  const auto e = make_entry("f_flat", {}, spec, sys);
  const auto side = FunctionalSide::wavelet(*e.coeffs, 0.5, Preset::parse("jsbmo"));
  for (double eps : {0.25, 0.5, 0.99}) {
    const auto v = side.values(eps);
    for (int k = 0; k < 3; ++k) CHECK(v[static_cast<std::size_t>(k)] == doctest::Approx((7 + k) * ln2).epsilon(1e-12));
  }
  CHECK(side.values(1.0) == std::vector<double>{0.0, 0.0, 0.0});

  for (const char* p : {"jsbmo", "besov(2,2)", "triebel(2,2)", "besov_inf(2)"}) {
    const auto d0 = wavelet_distance_d0(*e.coeffs, 0.5, Preset::parse(p));
    CHECK(d0.flag == DeviationFlag::resolved);
    CHECK(d0.eps_hat == 1.0);
  }
}

TEST_CASE("homogeneity is exact") {
  GridSpec spec{1, 9, 0, Extension::periodic};
  DiffConfig cfg{1, 0.5};
  const auto sys = WaveletSystem::for_smoothness(0.5, 1);
  for (const char* name : {"weierstrass", "f_log", "gaussian"}) {
    const auto e = make_entry(name, {}, spec, sys);
    const auto c = e.coeffs ? *e.coeffs : analyze(e.f, sys);
    for (const char* p : {"jsbmo", "besov(2,2)"}) {
      const auto pr = Preset::parse(p);
      const auto a = lipschitz_deviation(e.f, cfg, pr), b = lipschitz_deviation(scaled(e.f, 2.0), cfg, pr);
      CHECK(b.eps_hat == 2 * a.eps_hat);
      CHECK(b.flag == a.flag);
      const auto u = wavelet_distance_d0(c, 0.5, pr), v = wavelet_distance_d0(scaled(c, 2.0), 0.5, pr);
      CHECK(v.eps_hat == 2 * u.eps_hat);
      CHECK(v.flag == u.flag);
    }
  }
}

TEST_CASE("smooth and zero functions sit at the floor") {
  GridSpec spec{1, 10, 0, Extension::periodic};
  DiffConfig cfg{1, 0.5};
  const auto sys = WaveletSystem::for_smoothness(0.5, 1);
  const auto g = make_entry("gaussian", {}, spec, sys);
  for (const char* p : {"jsbmo", "besov(2,2)", "triebel(2,2)"}) {
    const auto pr = Preset::parse(p);
    const auto d = lipschitz_deviation(g.f, cfg, pr);
    CHECK(d.eps_hat <= d.curve.eps[1]);
    CHECK(closure_test(g.f, cfg, pr, d.curve.eps).member);
  }
  const auto z = make_entry("const", {}, spec, sys);
  const auto rep = distance_estimate(z.f, cfg, Preset::parse("jsbmo"));
  CHECK(rep.zero());
  CHECK(rep.difference.flag == DeviationFlag::zero);
  CHECK(std::isnan(rep.ratio()));
}

TEST_CASE("closure verdicts") {
  GridSpec spec{1, 10, 0, Extension::periodic};
  DiffConfig cfg{1, 0.5};
  const auto sys = WaveletSystem::for_smoothness(0.5, 1);
  const auto flat = make_entry("f_flat", {}, spec, sys);
  const auto v = closure_test(flat.f, cfg, Preset::parse("jsbmo"), {0.5, 1.0});
  CHECK_FALSE(v.bounded[0]);
  CHECK_FALSE(v.member);
  const auto poly = make_entry("poly", {{"c0", 1}, {"c1", 2}}, spec, sys);
  CHECK(closure_test(poly.f, cfg, Preset::parse("jsbmo"), eps_grid(lip_norm(poly.f, cfg).seminorm)).member);

  // Zero extension on a larger box makes the tail term applicable.
  GridSpec boxed{1, 8, 3, Extension::zero};
  const auto gb = make_entry("gaussian", {}, boxed, sys);
  const auto rep = distance_estimate(gb.f, cfg, Preset::parse("jsbmo"));
  CHECK(rep.tail.applicable);
  CHECK(rep.tail_K0 >= 1 + sys.taps() - 1);
  CHECK_FALSE(distance_estimate(make_entry("gaussian", {}, spec, sys).f, cfg, Preset::parse("jsbmo")).tail.applicable);
}

TEST_CASE("report output") {
  GridSpec spec{1, 8, 0, Extension::periodic};
  DiffConfig cfg{1, 0.5};
  const auto sys = WaveletSystem::for_smoothness(0.5, 1);
  const auto e = make_entry("f_flat", {}, spec, sys);
  DistanceOptions opt;
  opt.coeffs = e.coeffs;
  const auto rep = distance_estimate(e.f, cfg, Preset::parse("besov(2,2)"), opt);
  CHECK(DeviationReport::csv_header() == "preset,s,r,epsilon,J,functional,divergent\n");
  const auto rows = rep.csv_rows(false);
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 33 * 3);
  CHECK(rows.rfind("besov(2,2),0.5,1,", 0) == 0);
  const auto j = nlohmann::json::parse(rep.summary_json());
  CHECK(j["preset"] == "besov(2,2)");
  CHECK(j["d0"] == 1.0);
  CHECK(j["d0_flag"] == "resolved");
  CHECK(j["tail"].is_null());
  CHECK(j["ratio"].get<double>() == doctest::Approx(1.0 / rep.difference.eps_hat));
}

TEST_CASE("reports do not depend on the thread count") {
  GridSpec spec{1, 9, 0, Extension::periodic};
  DiffConfig cfg{1, 0.5};
  const auto sys = WaveletSystem::for_smoothness(0.5, 1);
  const auto e = make_entry("weierstrass", {}, spec, sys);
  std::string ref;
  for (int t : {1, 4, 8}) {
    set_thread_count(t);
    const auto rep = distance_estimate(e.f, cfg, Preset::parse("triebel(2,2)"));
    const auto out = rep.csv_rows(false) + rep.csv_rows(true) + rep.summary_json();
    if (ref.empty()) ref = out;
    CHECK(out == ref);
  }
  set_thread_count(1);
}

TEST_CASE("inclusion experiment") {
  GridSpec spec{1, 8, 0, Extension::periodic};
  DiffConfig cfg{1, 0.5};
  const auto sys = WaveletSystem::for_smoothness(0.5, 1);
  const auto e = make_entry("f_flat", {}, spec, sys);
  InclusionOptions opt;
  opt.R_grid = {0.25, 1.0, 4.0};
  opt.m_max = 2;
  const auto res = inclusion_experiment(e.f, *e.coeffs, cfg, 0.5, opt);
  REQUIRE(res.rows.size() == 3 * 2 * 3);
  CHECK(res.rows[0].R == 0.25);
  CHECK(res.rows[0].m == 1);
  CHECK(res.rows[0].c == 0.5);
  CHECK(res.rows[1].c == 0.25);
  // Violations never grow with R at fixed (m, c).
  for (std::size_t k = 6; k < res.rows.size(); ++k) {
    CHECK(res.rows[k].missed_a <= res.rows[k - 6].missed_a);
    CHECK(res.rows[k].missed_b <= res.rows[k - 6].missed_b);
    CHECK(res.rows[k].marked_a == res.rows[k - 6].marked_a);
  }

  const auto z = make_entry("const", {}, spec, sys);
  const auto vac = inclusion_experiment(z.f, analyze(z.f, sys), cfg, 0.5, opt);
  REQUIRE(vac.first_holding.has_value());
  CHECK(vac.first_holding->R == 0.25);
  CHECK_THROWS_AS(inclusion_experiment(z.f, analyze(z.f, sys), cfg, 0.0, opt), ConfigError);
}
