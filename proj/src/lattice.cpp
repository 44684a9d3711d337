#include "lipdev/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace lipdev {

std::string to_string(LatticeTag tag) {
  switch (tag) {
    case LatticeTag::besov: return "besov";
    case LatticeTag::triebel: return "triebel";
    case LatticeTag::f_inf: return "f_inf";
    case LatticeTag::besov_type: return "besov_type";
    case LatticeTag::tl_type: return "tl_type";
    case LatticeTag::nu_m: return "nu_m";
    case LatticeTag::nu_count: return "nu_count";
  }
  return "?";
}

LatticeTag lattice_tag_from_string(const std::string& name) {
  for (auto t : {LatticeTag::besov, LatticeTag::triebel, LatticeTag::f_inf, LatticeTag::besov_type,
                 LatticeTag::tl_type, LatticeTag::nu_m, LatticeTag::nu_count})
    if (to_string(t) == name) return t;
  throw ConfigError("unknown lattice tag '" + name + "'");
}

void LatticeSpec::validate() const {
  if (!is_norm()) return;
  require(p > 0.0, "lattice: p must lie in (0, inf]");
  require(q > 0.0, "lattice: q must lie in (0, inf]");
  if (tag == LatticeTag::besov_type || tag == LatticeTag::tl_type) {
    require(tau >= 0.0, "lattice: tau must be >= 0");
    require(tau < 1.0 / p, "lattice: tau must satisfy tau < 1/p");
  }
}

namespace {

nlohmann::json exponent_json(double v) { return std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v); }

double exponent_value(const nlohmann::json& j, const std::string& key) {
  if (j.is_string() && j.get<std::string>() == "inf") return kInf;
  if (!j.is_number()) throw ConfigError("lattice: '" + key + "' must be a number or \"inf\"");
  return j.get<double>();
}

}  // namespace

std::string LatticeSpec::to_json() const {
  nlohmann::json j{{"tag", to_string(tag)}};
  if (is_norm()) {
    if (tag != LatticeTag::f_inf) j["p"] = exponent_json(p);
    j["q"] = exponent_json(q);
    if (tag == LatticeTag::besov_type || tag == LatticeTag::tl_type) j["tau"] = tau;
  }
  return j.dump();
}

LatticeSpec LatticeSpec::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("lattice: malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("tag")) throw ConfigError("lattice: missing 'tag'");
  LatticeSpec s;
  s.tag = lattice_tag_from_string(j.at("tag").get<std::string>());
  if (!s.is_norm()) {
    s.p = s.q = kInf;
  } else if (s.tag == LatticeTag::f_inf) {
    s.p = kInf;
  }
  for (const auto& [key, value] : j.items()) {
    if (key == "tag") continue;
    if (key == "p") s.p = exponent_value(value, key);
    else if (key == "q") s.q = exponent_value(value, key);
    else if (key == "tau") s.tau = exponent_value(value, key);
    else throw ConfigError("lattice: unknown key '" + key + "'");
  }
  s.validate();
  return s;
}

LevelStack LevelStack::zeros(const GridSpec& spec, int level_count) {
  LevelStack st{spec, {}};
  st.levels.assign(static_cast<std::size_t>(level_count),
                   Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(spec.sample_count())));
  return st;
}

LevelStack stack_from_cubes(const CubeFamily& family) {
  const GridSpec& spec = family.spec;
  LevelStack st = LevelStack::zeros(spec, family.level_count());
  const long a = spec.axis_samples();
  for (int j = 0; j < family.level_count(); ++j) {
    const auto expected = static_cast<std::size_t>(spec.n == 1 ? cubes_per_axis(spec, j)
                                                               : cubes_per_axis(spec, j) * cubes_per_axis(spec, j));
    if (family.levels[static_cast<std::size_t>(j)].size() != expected)
      throw ConfigError("stack_from_cubes: level " + std::to_string(j) + " holds cubes of another level");
    for (const auto& cube : family.cubes(j)) {
      const auto r = cube_sample_range(spec, cube);
      for (long i1 = r[0][1]; i1 < r[1][1]; ++i1)
        for (long i0 = r[0][0]; i0 < r[1][0]; ++i0)
          st.levels[static_cast<std::size_t>(j)][static_cast<Eigen::Index>(flat_index({i0, i1}, a, spec.n))] += 1.0;
    }
  }
  return st;
}

LevelStack stack_from_badset(const RegionMask& m) {
  LevelStack st = LevelStack::zeros(m.spec, m.level_count());
  const double w = m.log_width();
  for (int j = 0; j < m.level_count(); ++j) {
    auto& f = st.levels[static_cast<std::size_t>(j)];
    for (int b = 0; b < m.subbands; ++b)
      for (std::size_t p = 0; p < m.cells(); ++p)
        if (m.get(j, b, p)) f[static_cast<Eigen::Index>(p)] += w;
  }
  return st;
}

std::vector<Eigen::ArrayXd> block_pyramid(const GridSpec& spec, const Eigen::ArrayXd& cells, int coarsest,
                                          bool use_max) {
  require(coarsest >= -spec.K && coarsest <= spec.J, "block_pyramid: level outside [-K, J]");
  std::vector<Eigen::ArrayXd> out;
  out.push_back(cells);
  for (int l = spec.J - 1; l >= coarsest; --l) {
    const long a = cubes_per_axis(spec, l);
    const long fine = 2 * a;
    const Eigen::ArrayXd& src = out.back();
    Eigen::ArrayXd dst(spec.n == 1 ? a : a * a);
    auto combine = [use_max](double x, double y) { return use_max ? std::max(x, y) : x + y; };
    if (spec.n == 1) {
      for (long k = 0; k < a; ++k) dst[k] = combine(src[2 * k], src[2 * k + 1]);
    } else {
      for (long k1 = 0; k1 < a; ++k1)
        for (long k0 = 0; k0 < a; ++k0) {
          const long base = 2 * k0 + fine * 2 * k1;
          dst[k0 + a * k1] = combine(combine(src[base], src[base + 1]),
                                     combine(src[base + fine], src[base + fine + 1]));
        }
    }
    out.push_back(std::move(dst));
  }
  return out;
}

namespace {

double lp_norm(const Eigen::ArrayXd& f, double p, double vol) {
  if (f.size() == 0) return 0.0;
  if (std::isinf(p)) return f.maxCoeff();
  return std::pow((f.pow(p)).sum() * vol, 1.0 / p);
}

// (sum a_j^q)^{1/q} with q = inf as max.
double lq_combine(const std::vector<double>& a, double q) {
  double acc = 0.0;
  for (double v : a) acc = std::isinf(q) ? std::max(acc, v) : acc + std::pow(v, q);
  return std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
}

// Pointwise (sum_{j >= lo} f_j^q)^{1/q}.
Eigen::ArrayXd level_lq(const LevelStack& st, int lo, double q) {
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(st.spec.sample_count()));
  for (int j = std::max(lo, 0); j < st.level_count(); ++j) {
    const auto& f = st.levels[static_cast<std::size_t>(j)];
    if (std::isinf(q)) acc = acc.max(f);
    else acc += f.pow(q);
  }
  if (!std::isinf(q)) acc = acc.pow(1.0 / q);
  return acc;
}

double besov(const LevelStack& st, double p, double q) {
  std::vector<double> norms;
  for (const auto& f : st.levels) norms.push_back(lp_norm(f, p, st.spec.cell_volume()));
  return lq_combine(norms, q);
}

double triebel(const LevelStack& st, double p, double q) {
  return lp_norm(level_lq(st, 0, q), p, st.spec.cell_volume());
}

double f_inf(const LevelStack& st, double q) {
  const GridSpec& spec = st.spec;
  double best = 0.0;
  for (int l = 0; l < std::min(st.level_count(), spec.J + 1); ++l) {
    Eigen::ArrayXd g = level_lq(st, l, q);
    if (!std::isinf(q)) g = g.pow(q);
    const auto pyr = block_pyramid(spec, g, l, std::isinf(q));
    const Eigen::ArrayXd& blocks = pyr.back();
    // Block sums times |cell| / |I| give the averages.
    const double scale = std::isinf(q) ? 1.0 : std::ldexp(1.0, -(spec.J - l) * spec.n);
    const double m = blocks.maxCoeff() * scale;
    best = std::max(best, std::isinf(q) ? m : std::pow(m, 1.0 / q));
  }
  return best;
}

double besov_type(const LevelStack& st, double p, double q, double tau) {
  const GridSpec& spec = st.spec;
  const bool pinf = std::isinf(p), qinf = std::isinf(q);
  // acc[J - l][Q] accumulates sum_j ||f_j 1_Q||_p^q over admissible j.
  std::vector<Eigen::ArrayXd> acc;
  for (int l = spec.J; l >= -spec.K; --l)
    acc.push_back(Eigen::ArrayXd::Zero(spec.n == 1 ? cubes_per_axis(spec, l)
                                                   : cubes_per_axis(spec, l) * cubes_per_axis(spec, l)));
  for (int j = 0; j < st.level_count(); ++j) {
    const auto& f = st.levels[static_cast<std::size_t>(j)];
    const Eigen::ArrayXd cells = pinf ? f : Eigen::ArrayXd(f.pow(p) * spec.cell_volume());
    const auto pyr = block_pyramid(spec, cells, -spec.K, pinf);
    for (int l = std::min(j, spec.J); l >= -spec.K; --l) {
      const auto idx = static_cast<std::size_t>(spec.J - l);
      const Eigen::ArrayXd norm = pinf ? pyr[idx] : Eigen::ArrayXd(pyr[idx].pow(1.0 / p));
      if (qinf) acc[idx] = acc[idx].max(norm);
      else acc[idx] += norm.pow(q);
    }
  }
  double best = 0.0;
  for (int l = spec.J; l >= -spec.K; --l) {
    const auto& a = acc[static_cast<std::size_t>(spec.J - l)];
    const double v = qinf ? a.maxCoeff() : std::pow(a.maxCoeff(), 1.0 / q);
    best = std::max(best, std::exp2(l * spec.n * tau) * v);
  }
  return best;
}

double tl_type(const LevelStack& st, double p, double q, double tau) {
  const GridSpec& spec = st.spec;
  const bool pinf = std::isinf(p);
  double best = 0.0;
  for (int l = std::min(spec.J, std::max(st.level_count() - 1, 0)); l >= -spec.K; --l) {
    const Eigen::ArrayXd g = level_lq(st, l, q);
    const Eigen::ArrayXd cells = pinf ? g : Eigen::ArrayXd(g.pow(p) * spec.cell_volume());
    const auto pyr = block_pyramid(spec, cells, l, pinf);
    const double m = pyr.back().maxCoeff();
    best = std::max(best, std::exp2(l * spec.n * tau) * (pinf ? m : std::pow(m, 1.0 / p)));
  }
  return best;
}

}  // namespace

double x_norm(const LevelStack& st, const LatticeSpec& spec) {
  spec.validate();
  for (const auto& f : st.levels)
    if (f.size() && (!(f >= 0.0).all() || !f.isFinite().all()))
      throw NumericError("x_norm: stack values must be finite and nonnegative");
  switch (spec.tag) {
    case LatticeTag::besov: return besov(st, spec.p, spec.q);
    case LatticeTag::triebel: return triebel(st, spec.p, spec.q);
    case LatticeTag::f_inf: return f_inf(st, spec.q);
    case LatticeTag::besov_type: return besov_type(st, spec.p, spec.q, spec.tau);
    case LatticeTag::tl_type: return tl_type(st, spec.p, spec.q, spec.tau);
    default: break;
  }
  throw WrongFunctionalError("x_norm: tag " + to_string(spec.tag) + " is a measure, use nu_eval");
}

double carleson_M(const RegionMask& m) {
  const GridSpec& spec = m.spec;
  const LevelStack st = stack_from_badset(m);
  double best = 0.0;
  Eigen::ArrayXd suffix = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(spec.sample_count()));
  for (int j = st.level_count() - 1; j > spec.J; --j) suffix += st.levels[static_cast<std::size_t>(j)];
  for (int l = std::min(spec.J, st.level_count() - 1); l >= 0; --l) {
    suffix += st.levels[static_cast<std::size_t>(l)];
    const auto pyr = block_pyramid(spec, suffix, l, false);
    // mu = block sum * cell volume; divide by |I| = 2^{-n l}.
    best = std::max(best, pyr.back().maxCoeff() * spec.cell_volume() * std::exp2(l * spec.n));
  }
  // Cubes at levels beyond the stack see nothing.
  return best;
}

double nu_eval(const RegionMask& m, const LatticeSpec& spec) {
  switch (spec.tag) {
    case LatticeTag::nu_m: return carleson_M(m);
    case LatticeTag::nu_count: {
      int c = 0;
      for (int j = 0; j < m.level_count(); ++j) c += m.level_empty(j) ? 0 : 1;
      return c;
    }
    default: break;
  }
  throw WrongFunctionalError("nu_eval: tag " + to_string(spec.tag) + " is a norm, use x_norm");
}

LevelStack convexify(const LevelStack& st, double u) {
  require(u > 0.0, "convexify: u must be positive");
  LevelStack out = st;
  if (u == 1.0) return out;
  for (auto& f : out.levels) f = f.pow(u);
  return out;
}

LevelStack shift(const LevelStack& st, ShiftDir dir) {
  LevelStack out = LevelStack::zeros(st.spec, st.level_count());
  const int L = st.level_count();
  for (int j = 0; j < L; ++j) {
    const int src = dir == ShiftDir::left ? j + 1 : j - 1;
    if (src >= 0 && src < L) out.levels[static_cast<std::size_t>(j)] = st.levels[static_cast<std::size_t>(src)];
  }
  return out;
}

}  // namespace lipdev
