#include "lipdev/deviation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "lipdev/hyperbolic.hpp"
#include "lipdev/parallel.hpp"

namespace lipdev {

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  if (std::isinf(v)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double parse_exponent(const std::string& text) {
  if (text == "inf") return kInf;
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw ConfigError("preset: cannot parse parameter '" + text + "'");
  return v;
}

CubeFamily truncate(const CubeFamily& fam, int levels) {
  CubeFamily out = fam;
  out.levels.resize(static_cast<std::size_t>(std::clamp(levels, 0, fam.level_count())));
  return out;
}

}  // namespace

Preset Preset::parse(const std::string& text) {
  static const std::regex form(R"(^\s*([a-z_]+)\s*(?:\(([^()]*)\))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, form)) throw ConfigError("preset: cannot parse '" + text + "'");
  const std::string name = m[1];
  std::vector<double> args;
  if (m[2].matched) {
    std::stringstream ss(m[2].str());
    std::string item;
    while (std::getline(ss, item, ',')) {
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      args.push_back(parse_exponent(item));
    }
  }
  auto want = [&](std::size_t k) {
    if (args.size() != k)
      throw ConfigError("preset " + name + ": expected " + std::to_string(k) + " parameter(s), got " +
                        std::to_string(args.size()));
  };
  Preset p;
  if (name == "jsbmo") {
    want(0);
    p.kind = PresetKind::jsbmo;
  } else if (name == "sobolev") {
    want(1);
    p = {PresetKind::sobolev, args[0], 2.0, 0.0};
  } else if (name == "besov") {
    want(2);
    p = {PresetKind::besov, args[0], args[1], 0.0};
  } else if (name == "besov_inf") {
    want(1);
    p = {PresetKind::besov_inf, kInf, args[0], 0.0};
  } else if (name == "triebel") {
    want(2);
    p = {PresetKind::triebel, args[0], args[1], 0.0};
  } else if (name == "triebel_inf") {
    want(1);
    p = {PresetKind::triebel_inf, kInf, args[0], 0.0};
  } else if (name == "besov_type") {
    want(3);
    p = {PresetKind::besov_type, args[0], args[1], args[2]};
  } else if (name == "tl_type") {
    want(3);
    p = {PresetKind::tl_type, args[0], args[1], args[2]};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return p;
}

std::string Preset::family() const {
  switch (kind) {
    case PresetKind::jsbmo: return "jsbmo";
    case PresetKind::sobolev: return "sobolev";
    case PresetKind::besov: return "besov";
    case PresetKind::besov_inf: return "besov_inf";
    case PresetKind::triebel: return "triebel";
    case PresetKind::triebel_inf: return "triebel_inf";
    case PresetKind::besov_type: return "besov_type";
    case PresetKind::tl_type: return "tl_type";
  }
  return "?";
}

std::string Preset::name() const {
  switch (kind) {
    case PresetKind::jsbmo: return "jsbmo";
    case PresetKind::sobolev: return "sobolev(" + short_num(p) + ")";
    case PresetKind::besov_inf:
    case PresetKind::triebel_inf: return family() + "(" + short_num(q) + ")";
    case PresetKind::besov:
    case PresetKind::triebel: return family() + "(" + short_num(p) + "," + short_num(q) + ")";
    default: return family() + "(" + short_num(p) + "," + short_num(q) + "," + short_num(tau) + ")";
  }
}

void Preset::validate(const DiffConfig& cfg) const {
  switch (kind) {
    case PresetKind::jsbmo: return;
    case PresetKind::besov_inf:
    case PresetKind::triebel_inf: require(q > 0.0, name() + ": q must lie in (0, inf]"); return;
    case PresetKind::sobolev:
      require(p > 0.0 && !std::isinf(p), name() + ": p must lie in (0, inf)");
      require(cfg.s == 1.0, name() + ": the Sobolev preset needs s = 1");
      require(cfg.r >= 2, name() + ": the Sobolev preset needs r >= 2 (r > s)");
      return;
    case PresetKind::besov:
    case PresetKind::triebel:
      require(p > 0.0, name() + ": p must lie in (0, inf]");
      require(q > 0.0 && !std::isinf(q), name() + ": q must lie in (0, inf); use the _inf preset for q = inf");
      return;
    case PresetKind::besov_type:
    case PresetKind::tl_type:
      require(p > 0.0 && !std::isinf(p), name() + ": p must lie in (0, inf)");
      require(q > 0.0 && !std::isinf(q), name() + ": q must lie in (0, inf)");
      require(tau >= 0.0, name() + ": tau must be >= 0");
      require(tau < 1.0 / p, name() + ": tau must satisfy tau < 1/p");
      return;
  }
}

double Preset::convexification() const {
  switch (kind) {
    case PresetKind::sobolev: return 0.5;
    case PresetKind::besov:
    case PresetKind::besov_type: return 1.0 / p;
    case PresetKind::triebel:
    case PresetKind::tl_type: return 1.0 / q;
    default: return 0.0;
  }
}

LatticeSpec Preset::difference_lattice() const {
  switch (kind) {
    case PresetKind::jsbmo:
    case PresetKind::triebel_inf: return LatticeSpec::nu_m();
    case PresetKind::besov_inf: return LatticeSpec::nu_count();
    case PresetKind::sobolev: return LatticeSpec::triebel(p, 2.0);
    case PresetKind::besov: return LatticeSpec::besov(p, q);
    case PresetKind::triebel: return LatticeSpec::triebel(p, q);
    case PresetKind::besov_type: return LatticeSpec::besov_type(p, q, tau);
    case PresetKind::tl_type: return LatticeSpec::tl_type(p, q, tau);
  }
  return {};
}

LatticeSpec Preset::wavelet_lattice() const { return difference_lattice(); }

double Preset::difference_functional(const RegionMask& bad) const {
  const LatticeSpec ls = difference_lattice();
  if (!ls.is_norm()) return nu_eval(bad, ls);
  return x_norm(convexify(stack_from_badset(bad), convexification()), ls);
}

double Preset::wavelet_functional(const SuperlevelSets& sets) const {
  switch (kind) {
    case PresetKind::jsbmo: return carleson_M(tents_of(sets.w0, 1));
    case PresetKind::triebel_inf: return carleson_M(tents_of(sets.w, 1));
    case PresetKind::besov_inf: {
      int c = 0;
      for (int j = 0; j < sets.w.level_count(); ++j) c += sets.w.count(j) ? 1 : 0;
      return c;
    }
    default: return x_norm(stack_from_cubes(sets.w0), wavelet_lattice());
  }
}

std::vector<double> eps_grid(double top, int points, double octaves) {
  require(points >= 2, "eps grid needs at least two points");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = top * std::exp2(-octaves * (points - 1 - i) / (points - 1));
  g.back() = top;
  return g;
}

FunctionalSide::FunctionalSide(int J, std::vector<double> profile, double top, bool zero, Values values)
    : J_(J), profile_(std::move(profile)), top_(top), zero_(zero), values_(std::move(values)) {
  require(J >= 3, "deviation: need J >= 3 for three resolutions");
}

std::vector<double> FunctionalSide::values(double eps) const {
  if (zero_) return std::vector<double>(3, 0.0);
  return values_(eps);
}

FunctionalSide FunctionalSide::difference(const ModulusField& field, const Preset& preset, double noise_floor) {
  const int J = field.level_count();
  const double top = field.max();
  auto values = [&field, preset, J](double eps) {
    const RegionMask bad = field.threshold(eps);
    std::vector<double> v;
    for (int Jp = J - 2; Jp <= J; ++Jp) v.push_back(preset.difference_functional(bad.truncated(Jp)));
    return v;
  };
  return {J, field.level_max(), top, top <= noise_floor, values};
}

FunctionalSide FunctionalSide::wavelet(const WaveletCoefficients& c, double s, const Preset& preset) {
  const int J = c.spec.J;
  const double top = coeff_norm_binf(c, s);
  auto values = [&c, s, preset, J](double eps) {
    const auto sets = superlevel_sets(c, s, eps);
    std::vector<double> v;
    for (int Jp = J - 2; Jp <= J; ++Jp)
      v.push_back(preset.wavelet_functional({truncate(sets.w0, Jp), truncate(sets.w, Jp), sets.v0}));
    return v;
  };
  return {J, level_profile(c, s, true), top, top == 0.0, values};
}

double FunctionalSide::profile_slope(const ClassifierConfig& cc) const {
  const int last = J_ - 2;
  const int first = std::max(0, last - cc.fit_levels + 1);
  if (last <= first) return 0.0;
  if (profile_[static_cast<std::size_t>(last)] == 0.0) return -kInf;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int j = first; j <= last; ++j) {
    const double m = profile_[static_cast<std::size_t>(j)];
    if (m == 0.0) continue;
    const double y = std::log2(m / profile_[static_cast<std::size_t>(last)]);
    sx += j;
    sy += y;
    sxx += double(j) * j;
    sxy += j * y;
    ++n;
  }
  if (n < 2) return -kInf;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

MassCurve mass_curve(const FunctionalSide& side, const std::vector<double>& eps) {
  for (std::size_t i = 0; i < eps.size(); ++i) {
    require(eps[i] > 0.0 || side.zero(), "mass_curve: eps must be positive");
    if (i) require(eps[i] > eps[i - 1] || side.zero(), "mass_curve: eps must be strictly increasing");
  }
  MassCurve curve{eps, side.resolutions(), Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(eps.size()), 3)};
  parallel_for(eps.size(), [&](std::size_t i) {
    const auto v = side.values(eps[i]);
    for (int k = 0; k < 3; ++k) curve.values(static_cast<Eigen::Index>(i), k) = v[static_cast<std::size_t>(k)];
  });
  return curve;
}

MassCurve mass_curve(const SampledFunction& f, const DiffConfig& cfg, const Preset& preset,
                     const std::vector<double>& eps) {
  preset.validate(cfg);
  const auto field = ModulusField::compute(f, cfg);
  return mass_curve(FunctionalSide::difference(field, preset), eps);
}

std::string to_string(DeviationFlag flag) {
  switch (flag) {
    case DeviationFlag::zero: return "zero";
    case DeviationFlag::floor: return "floor";
    case DeviationFlag::resolved: return "resolved";
    case DeviationFlag::unresolved: return "unresolved";
  }
  return "?";
}

namespace {

bool divergent_values(const std::vector<double>& v, const ClassifierConfig& cc) {
  if (v[2] == 0.0) return false;
  if (v[0] == 0.0) return true;
  return v[2] / v[0] >= cc.growth_threshold;
}

}  // namespace

bool classify_divergent(const FunctionalSide& side, double eps, const ClassifierConfig& cc) {
  if (side.zero()) return false;
  if (side.profile_slope(cc) <= cc.decay_slope) return false;
  return divergent_values(side.values(eps), cc);
}

DeviationResult deviation_constant(const FunctionalSide& side, const std::vector<double>& eps,
                                   const ClassifierConfig& cc) {
  require(!eps.empty(), "deviation_constant: empty eps grid");
  DeviationResult res;
  res.profile_slope = side.profile_slope(cc);
  res.profile_decays = !side.zero() && res.profile_slope <= cc.decay_slope;
  res.curve = mass_curve(side, eps);
  res.divergent.assign(eps.size(), false);
  if (side.zero()) {
    res.eps_hat = eps.front();
    res.flag = DeviationFlag::zero;
    return res;
  }
  if (!res.profile_decays) {
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const auto row = res.curve.values.row(static_cast<Eigen::Index>(i));
      res.divergent[i] = divergent_values({row(0), row(1), row(2)}, cc);
    }
  }
  // Divergence at eps implies divergence at every smaller eps.
  for (std::size_t i = eps.size() - 1; i > 0; --i)
    if (res.divergent[i]) res.divergent[i - 1] = true;

  std::size_t k = 0;
  while (k < eps.size() && res.divergent[k]) ++k;
  if (k == 0) {
    res.eps_hat = eps.front();
    res.flag = DeviationFlag::floor;
  } else if (k == eps.size()) {
    res.eps_hat = eps.back();
    res.flag = DeviationFlag::unresolved;
  } else {
    double lo = eps[k - 1], hi = eps[k];
    while (hi > lo * (1.0 + cc.bisection_tol)) {
      const double mid = std::sqrt(lo * hi);
      if (classify_divergent(side, mid, cc)) lo = mid;
      else hi = mid;
    }
    res.eps_hat = hi;
    res.flag = DeviationFlag::resolved;
  }
  return res;
}

DeviationResult lipschitz_deviation(const SampledFunction& f, const DiffConfig& cfg, const Preset& preset,
                                    const ClassifierConfig& cc) {
  preset.validate(cfg);
  const auto field = ModulusField::compute(f, cfg);
  const auto side = FunctionalSide::difference(field, preset, 1e-11 * f.sup_norm());
  return deviation_constant(side, eps_grid(side.top()), cc);
}

DeviationResult wavelet_distance_d0(const WaveletCoefficients& c, double s, const Preset& preset,
                                    const ClassifierConfig& cc) {
  const auto side = FunctionalSide::wavelet(c, s, preset);
  return deviation_constant(side, eps_grid(side.top()), cc);
}

double DeviationReport::ratio() const {
  if (difference.flag != DeviationFlag::resolved || wavelet.flag != DeviationFlag::resolved) return std::nan("");
  return wavelet.eps_hat / difference.eps_hat;
}

std::string DeviationReport::csv_header() { return "preset,s,r,epsilon,J,functional,divergent\n"; }

std::string DeviationReport::csv_rows(bool wavelet_side) const {
  const DeviationResult& d = wavelet_side ? wavelet : difference;
  std::string out;
  for (std::size_t i = 0; i < d.curve.eps.size(); ++i)
    for (std::size_t k = 0; k < d.curve.resolutions.size(); ++k) {
      out += preset + "," + num(s) + "," + std::to_string(r) + "," + num(d.curve.eps[i]) + "," +
             std::to_string(d.curve.resolutions[k]) + "," +
             num(d.curve.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k))) + "," +
             (d.divergent[i] ? "1" : "0") + "\n";
    }
  return out;
}

std::string DeviationReport::summary_json() const {
  auto val = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json j{{"preset", preset},
                   {"s", s},
                   {"r", r},
                   {"J", J},
                   {"eps_hat", val(difference.eps_hat)},
                   {"eps_hat_flag", to_string(difference.flag)},
                   {"d0", val(wavelet.eps_hat)},
                   {"d0_flag", to_string(wavelet.flag)},
                   {"tail", tail.applicable ? val(tail.value) : nlohmann::json(nullptr)},
                   {"tail_applicable", tail.applicable},
                   {"tail_K0", tail_K0},
                   {"sum", val(sum())},
                   {"ratio", val(ratio())}};
  return j.dump(2);
}

long tail_radius(const SampledFunction& f, const WaveletSystem& sys) {
  const GridSpec& spec = f.spec;
  const double box = spec.box_side();
  double radius = 0.0;
  for (std::size_t p = 0; p < spec.sample_count(); ++p) {
    if (f.values[static_cast<Eigen::Index>(p)] == 0.0) continue;
    const Point x = f.centre(p);
    double r2 = 0.0;
    for (int d = 0; d < spec.n; ++d) {
      const double t = x[d] < 0.5 * box ? x[d] : x[d] - box;
      r2 += (std::abs(t) + spec.spacing()) * (std::abs(t) + spec.spacing());
    }
    radius = std::max(radius, std::sqrt(r2));
  }
  return static_cast<long>(std::ceil(radius)) + sys.taps() - 1;
}

DeviationReport distance_estimate(const SampledFunction& f, const DiffConfig& cfg, const Preset& preset,
                                  const DistanceOptions& opt) {
  cfg.validate(f.spec.n);
  preset.validate(cfg);
  const WaveletSystem sys = opt.system ? *opt.system : WaveletSystem::for_smoothness(cfg.s, cfg.r);
  const WaveletCoefficients c = opt.coeffs ? *opt.coeffs : analyze(f, sys);
  require(c.spec == f.spec, "distance_estimate: coefficients belong to another grid");
  DeviationReport rep;
  rep.preset = preset.name();
  rep.s = cfg.s;
  rep.r = cfg.r;
  rep.J = f.spec.J;
  rep.difference = lipschitz_deviation(f, cfg, preset, opt.classifier);
  rep.wavelet = wavelet_distance_d0(c, cfg.s, preset, opt.classifier);
  rep.tail_K0 = tail_radius(f, c.system);
  rep.tail = scaling_tail(c, rep.tail_K0);
  return rep;
}

ClosureVerdict closure_test(const SampledFunction& f, const DiffConfig& cfg, const Preset& preset,
                            const std::vector<double>& eps, const ClassifierConfig& cc) {
  preset.validate(cfg);
  const auto field = ModulusField::compute(f, cfg);
  const auto side = FunctionalSide::difference(field, preset, 1e-11 * f.sup_norm());
  ClosureVerdict v;
  v.eps = eps;
  v.bounded.assign(eps.size(), true);
  parallel_for(eps.size(), [&](std::size_t i) { v.bounded[i] = !classify_divergent(side, eps[i], cc); });
  const auto sys = WaveletSystem::for_smoothness(cfg.s, cfg.r);
  const auto tail = scaling_tail(analyze(f, sys), tail_radius(f, sys));
  const double floor = eps.empty() ? 0.0 : *std::min_element(eps.begin(), eps.end());
  v.tail_ok = !tail.applicable || tail.value <= floor;
  v.member = v.tail_ok && std::all_of(v.bounded.begin(), v.bounded.end(), [](bool b) { return b; });
  return v;
}

InclusionResult inclusion_experiment(const SampledFunction& f, const WaveletCoefficients& c, const DiffConfig& cfg,
                                     double eps, const InclusionOptions& opt) {
  require(eps > 0.0, "inclusion_experiment: eps must be positive");
  require(c.spec == f.spec, "inclusion_experiment: coefficients belong to another grid");
  require(opt.m_max >= 1, "inclusion_experiment: m must be >= 1");
  const GridSpec& spec = f.spec;
  const int J = spec.J;
  const int j_lo = std::max(0, opt.j_lo);
  const int j_hi = opt.j_hi < 0 ? J - 3 : std::min(opt.j_hi, J - 1);
  const auto field = ModulusField::compute(f, cfg);
  const int M = cfg.subbands;

  auto level = [](const RegionMask& m, int j) { return m.restricted(j, j); };
  auto missed = [](const RegionMask& lhs, const RegionMask& cover, std::size_t& marked, std::size_t& miss) {
    for (int j = 0; j < lhs.level_count(); ++j) {
      const auto& a = lhs.levels[static_cast<std::size_t>(j)];
      const auto& b = cover.levels[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        ++marked;
        if (!b[i]) ++miss;
      }
    }
  };

  const RegionMask S_eps = field.threshold(eps);
  const auto sets_eps = superlevel_sets(c, cfg.s, eps);
  const RegionMask T_eps = tents_of(sets_eps.w, M);

  // rows indexed [R][m][c]
  const std::size_t nc = opt.c_grid.size(), nR = opt.R_grid.size();
  const auto nm = static_cast<std::size_t>(opt.m_max);
  std::vector<InclusionRow> table(nR * nm * nc);
  std::vector<double> cs = opt.c_grid;
  std::sort(cs.begin(), cs.end(), std::greater<>());

  for (std::size_t ci = 0; ci < nc; ++ci) {
    const double ce = cs[ci] * eps;
    const RegionMask S_c = field.threshold(ce);
    const RegionMask T0_c = tents_of(superlevel_sets(c, cfg.s, ce).w0, M);
    for (std::size_t ri = 0; ri < nR; ++ri) {
      const double R = opt.R_grid[ri];
      std::vector<RegionMask> dS, dT;
      for (int i = 0; i < J; ++i) {
        dS.push_back(hyper_neighborhood(level(S_c, i), R));
        dT.push_back(hyper_neighborhood(level(T0_c, i), R));
      }
      for (std::size_t mi = 0; mi < nm; ++mi) {
        const int m = static_cast<int>(mi) + 1;
        InclusionRow row{cs[ci], m, R};
        for (int j = j_lo; j <= j_hi; ++j) {
          RegionMask coverA = RegionMask::empty(spec, J, M);
          for (int i = j + 1; i <= std::min(j + m, J - 1); ++i) coverA |= dS[static_cast<std::size_t>(i)];
          missed(level(T_eps, j), coverA, row.marked_a, row.missed_a);
          RegionMask coverB = RegionMask::empty(spec, J, M);
          for (int i = std::max(j - m, 0); i <= std::min(j + m, J - 1); ++i) coverB |= dT[static_cast<std::size_t>(i)];
          missed(level(S_eps, j), coverB, row.marked_b, row.missed_b);
        }
        table[(ri * nm + mi) * nc + ci] = row;
      }
    }
  }
  InclusionResult res{table, std::nullopt};
  for (const auto& row : res.rows)
    if (row.holds()) {
      res.first_holding = row;
      break;
    }
  return res;
}

}  // namespace lipdev
