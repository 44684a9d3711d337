#include "lipdev/difference.hpp"

#include <algorithm>
#include <map>
#include <numbers>

#include "lipdev/minimax.hpp"
#include "lipdev/parallel.hpp"

namespace lipdev {

std::string to_string(StepMode mode) { return mode == StepMode::exact ? "exact" : "sup"; }

StepMode step_mode_from_string(const std::string& name) {
  if (name == "exact") return StepMode::exact;
  if (name == "sup") return StepMode::sup;
  throw ConfigError("unknown h-mode '" + name + "' (expected exact or sup)");
}

void DiffConfig::validate(int n) const {
  require(r >= 1, "difference order r must be >= 1");
  require(s > 0.0, "smoothness s must be > 0");
  require(r > s, "difference order r must exceed s");
  require(subbands >= 1, "sub-band count M must be >= 1");
  require(n == 1 || directions >= 2, "direction count D must be >= 2 when n = 2");
}

std::vector<double> binomial_weights(int r) {
  std::vector<double> w(static_cast<std::size_t>(r) + 1);
  double c = 1.0;
  for (int i = 0; i <= r; ++i) {
    w[static_cast<std::size_t>(i)] = (i % 2 ? -c : c);
    c = c * (r - i) / (i + 1);
  }
  return w;
}

double sym_diff(const SampledFunction& f, const Index2& x, const Index2& h, int r) {
  if (r < 1) throw ConfigError("difference order r must be >= 1");
  const auto w = binomial_weights(r);
  // Work in half-sample units: point_i = 2x + shift + (r - 2i) h.
  Index2 shift{0, 0};
  for (int d = 0; d < f.spec.n; ++d) shift[d] = (r * h[d]) % 2 != 0 ? 1 : 0;
  double acc = 0.0;
  for (int i = 0; i <= r; ++i) {
    Index2 p{0, 0};
    for (int d = 0; d < f.spec.n; ++d) p[d] = (2 * x[d] + shift[d] + (r - 2 * i) * h[d]) / 2;
    acc += w[static_cast<std::size_t>(i)] * f.at(p);
  }
  return acc;
}

std::vector<Index2> step_vectors(int n, long m, int directions) {
  if (n == 1) return {Index2{m, 0}};
  std::vector<Index2> out;
  for (int k = 0; k < directions; ++k) {
    const double theta = std::numbers::pi * k / directions;
    Index2 v{std::lround(m * std::cos(theta)), std::lround(m * std::sin(theta))};
    if (v[0] == 0 && v[1] == 0) continue;
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

namespace {

double exact_modulus(const SampledFunction& f, const Index2& x, const std::vector<Index2>& steps,
                     int r) {
  double m = 0.0;
  for (const auto& h : steps) m = std::max(m, std::abs(sym_diff(f, x, h, r)));
  return m;
}

long steps_for(double y, double spacing) { return std::max(1L, std::lround(y / spacing)); }

// Largest Delta(x, m h) / (m h)^p over m in [lo, hi]; sup mode takes the
// running maximum over all smaller steps first.
double sweep(const SampledFunction& f, const Index2& x, long lo, long hi, const DiffConfig& cfg,
             double p, const std::vector<std::vector<Index2>>& vecs) {
  const double h = f.spec.spacing();
  double running = 0.0, best = 0.0;
  const long start = cfg.mode == StepMode::sup ? 1 : lo;
  for (long m = start; m <= hi; ++m) {
    const double d = exact_modulus(f, x, vecs[static_cast<std::size_t>(m)], cfg.r);
    running = cfg.mode == StepMode::sup ? std::max(running, d) : d;
    if (m >= lo) best = std::max(best, running / std::pow(m * h, p));
  }
  return best;
}

std::vector<std::vector<Index2>> vector_table(int n, long hi, int directions) {
  std::vector<std::vector<Index2>> vecs(static_cast<std::size_t>(hi) + 1);
  for (long m = 1; m <= hi; ++m) vecs[static_cast<std::size_t>(m)] = step_vectors(n, m, directions);
  return vecs;
}

}  // namespace

double diff_modulus(const SampledFunction& f, const Index2& x, double y, const DiffConfig& cfg) {
  cfg.validate(f.spec.n);
  if (!(y > 0.0)) throw ConfigError("diff_modulus: y must be positive");
  const long m = steps_for(y, f.spec.spacing());
  if (cfg.mode == StepMode::exact) return exact_modulus(f, x, step_vectors(f.spec.n, m, cfg.directions), cfg.r);
  const auto vecs = vector_table(f.spec.n, m, cfg.directions);
  return sweep(f, x, m, m, cfg, 0.0, vecs);
}

long representative_step(const GridSpec& spec, int j, int b, int subbands) {
  return std::max(1L, std::lround(std::exp2(spec.J - j - 1 + double(b + 1) / subbands)));
}

ModulusField ModulusField::compute(const SampledFunction& f, const DiffConfig& cfg) {
  const GridSpec& spec = f.spec;
  spec.validate();
  cfg.validate(spec.n);
  const int M = cfg.subbands;
  const int L = spec.J;
  const std::size_t cells = spec.sample_count();
  const long axis = spec.axis_samples();
  ModulusField out{spec, M, std::vector<Eigen::ArrayXd>(static_cast<std::size_t>(L * M))};

  // Distinct sampled steps, each mapped to the slots that use it.
  std::map<long, std::vector<std::size_t>> users;
  for (int j = 0; j < L; ++j)
    for (int b = 0; b < M; ++b)
      users[representative_step(spec, j, b, M)].push_back(static_cast<std::size_t>(j * M + b));
  const long m_max = users.rbegin()->first;
  const auto vecs = vector_table(spec.n, m_max, cfg.directions);
  std::vector<long> steps;
  for (const auto& [m, _] : users) steps.push_back(m);

  // rows[k][p]: Delta / y^s at the k-th distinct step.
  std::vector<Eigen::ArrayXd> rows(steps.size(), Eigen::ArrayXd(static_cast<Eigen::Index>(cells)));
  const double h = spec.spacing();
  parallel_for(cells, [&](std::size_t p) {
    const Index2 x = unflatten(p, axis, spec.n);
    if (cfg.mode == StepMode::exact) {
      for (std::size_t k = 0; k < steps.size(); ++k) {
        const long m = steps[k];
        rows[k][static_cast<Eigen::Index>(p)] =
            exact_modulus(f, x, vecs[static_cast<std::size_t>(m)], cfg.r) / std::pow(m * h, cfg.s);
      }
    } else {
      double running = 0.0;
      std::size_t k = 0;
      for (long m = 1; m <= m_max; ++m) {
        running = std::max(running, exact_modulus(f, x, vecs[static_cast<std::size_t>(m)], cfg.r));
        if (m == steps[k]) rows[k++][static_cast<Eigen::Index>(p)] = running / std::pow(m * h, cfg.s);
      }
    }
  });
  for (std::size_t k = 0; k < steps.size(); ++k)
    for (std::size_t slot : users[steps[k]]) out.ratio[slot] = rows[k];
  return out;
}

double ModulusField::max() const {
  double m = 0.0;
  for (const auto& r : ratio)
    if (r.size()) m = std::max(m, r.maxCoeff());
  return m;
}

std::vector<double> ModulusField::level_max() const {
  std::vector<double> out(static_cast<std::size_t>(level_count()), 0.0);
  for (int j = 0; j < level_count(); ++j)
    for (int b = 0; b < subbands; ++b) {
      const auto& r = ratio[static_cast<std::size_t>(j * subbands + b)];
      if (r.size()) out[static_cast<std::size_t>(j)] = std::max(out[static_cast<std::size_t>(j)], r.maxCoeff());
    }
  return out;
}

RegionMask ModulusField::threshold(double eps) const {
  if (!(eps > 0.0)) throw ConfigError("bad_set: eps must be positive");
  RegionMask m = RegionMask::empty(spec, level_count(), subbands);
  for (int j = 0; j < level_count(); ++j)
    for (int b = 0; b < subbands; ++b) {
      const auto& r = ratio[static_cast<std::size_t>(j * subbands + b)];
      for (Eigen::Index p = 0; p < r.size(); ++p)
        if (r[p] > eps) m.set(j, b, static_cast<std::size_t>(p));
    }
  return m;
}

LipNorm lip_norm(const SampledFunction& f, const DiffConfig& cfg) {
  return {f.sup_norm(), ModulusField::compute(f, cfg).max()};
}

RegionMask bad_set(const SampledFunction& f, const DiffConfig& cfg, double eps) {
  if (!(eps > 0.0)) throw ConfigError("bad_set: eps must be positive");
  return ModulusField::compute(f, cfg).threshold(eps);
}

double default_whitney_A(double A0, int r) { return std::max(A0, 4.0 * r); }

namespace {

// Sample indices whose centres lie in the cube dilated by `factor` about its
// centre, per axis [lo, hi).
std::array<Index2, 2> dilated_range(const GridSpec& spec, const DyadicCube& I, double factor, bool clip) {
  const double h = spec.spacing();
  Index2 lo{0, 0}, hi{1, 1};
  for (int d = 0; d < spec.n; ++d) {
    const double c = 0.5 * (I.lower(d) + I.upper(d));
    const double half = 0.5 * factor * I.side();
    lo[d] = static_cast<long>(std::ceil((c - half) / h - 0.5));
    hi[d] = static_cast<long>(std::floor((c + half) / h - 0.5)) + 1;
    if (clip) {
      lo[d] = std::clamp(lo[d], 0L, spec.axis_samples());
      hi[d] = std::clamp(hi[d], 0L, spec.axis_samples());
    }
  }
  return {lo, hi};
}

std::vector<Index2> range_points(const std::array<Index2, 2>& r, int n) {
  std::vector<Index2> pts;
  for (long i1 = r[0][1]; i1 < (n == 2 ? r[1][1] : r[0][1] + 1); ++i1)
    for (long i0 = r[0][0]; i0 < r[1][0]; ++i0) pts.push_back({i0, n == 2 ? i1 : 0});
  return pts;
}

// sup over x in pts of the sweep; parallel with a max reduction.
double sup_over(const SampledFunction& f, const std::vector<Index2>& pts, long lo, long hi,
                const DiffConfig& cfg, double p) {
  const auto vecs = vector_table(f.spec.n, hi, cfg.directions);
  std::vector<double> part(pts.size(), 0.0);
  parallel_for(pts.size(), [&](std::size_t i) { part[i] = sweep(f, pts[i], lo, hi, cfg, p, vecs); });
  return part.empty() ? 0.0 : *std::max_element(part.begin(), part.end());
}

}  // namespace

InequalityProbe whitney_gap(const SampledFunction& f, const DyadicCube& I, const DiffConfig& cfg,
                            double A0, double A) {
  const GridSpec& spec = f.spec;
  cfg.validate(spec.n);
  require(A0 > 2.0, "whitney_gap: A0 must exceed 2");
  if (A <= 0.0) A = default_whitney_A(A0, cfg.r);
  require(A >= 1.0, "whitney_gap: A must be >= 1");
  if (I.level > spec.J) throw RangeError("whitney_gap: cube finer than the grid");

  const auto pts = range_points(dilated_range(spec, I, A0, spec.ext == Extension::zero), spec.n);
  // Monomials of total degree <= r - 1 in coordinates scaled to [-1, 1].
  std::vector<std::array<int, 2>> powers;
  for (int a = 0; a < cfg.r; ++a)
    for (int b = 0; b + a < cfg.r; ++b)
      if (spec.n == 2 || b == 0) powers.push_back({a, b});
  if (pts.size() < powers.size())
    throw ConfigError("whitney_gap: degenerate cube (fewer grid points than polynomial coefficients)");

  const double h = spec.spacing();
  const double half = 0.5 * A0 * I.side();
  Eigen::MatrixXd B(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(powers.size()));
  Eigen::VectorXd vals(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double u[2] = {0, 0};
    for (int d = 0; d < spec.n; ++d)
      u[d] = ((pts[i][d] + 0.5) * h - 0.5 * (I.lower(d) + I.upper(d))) / half;
    for (std::size_t k = 0; k < powers.size(); ++k)
      B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          std::pow(u[0], powers[k][0]) * std::pow(u[1], powers[k][1]);
    vals(static_cast<Eigen::Index>(i)) = f.at(pts[i]);
  }

  InequalityProbe out;
  out.lhs = discrete_minimax(B, vals);
  const long hi = std::max(1L, static_cast<long>(std::floor(I.side() / (2.0 * h))));
  const long lo = std::min(hi, std::max(1L, static_cast<long>(std::ceil(I.side() / (A * h)))));
  out.rhs = sup_over(f, range_points(dilated_range(spec, I, A, false), spec.n), lo, hi, cfg, 0.0);
  return out;
}

InequalityProbe tent_coeff_bound(const WaveletCoefficients& c, const SampledFunction& f,
                                 const DyadicCube& I, const DiffConfig& cfg, double A0) {
  const GridSpec& spec = f.spec;
  cfg.validate(spec.n);
  require(c.spec == spec, "tent_coeff_bound: coefficient grid differs from the function grid");
  require(A0 > 1.0, "tent_coeff_bound: A0 must exceed 1");
  if (I.level < 0 || I.level >= spec.J) throw RangeError("tent_coeff_bound: cube level outside [0, J)");

  InequalityProbe out;
  out.lhs = coeff_weight(I.level, cfg.s, spec.n) * c.cube_max(I, false);
  const double h = spec.spacing();
  const long hi = std::max(1L, static_cast<long>(std::floor(I.side() / (2.0 * h))));
  const long lo = std::min(hi, std::max(1L, static_cast<long>(std::ceil(I.side() / (A0 * h)))));
  out.rhs = sup_over(f, range_points(dilated_range(spec, I, A0, false), spec.n), lo, hi, cfg, cfg.s);
  return out;
}

}  // namespace lipdev
