#pragma once

#include <Eigen/Core>

#include <cmath>
#include <type_traits>
#include <vector>

#include "lipdev/grid.hpp"
#include "lipdev/region_mask.hpp"
#include "lipdev/wavelet.hpp"

namespace lipdev {

enum class StepMode { exact, sup };

std::string to_string(StepMode mode);
StepMode step_mode_from_string(const std::string& name);

struct DiffConfig {
  int r = 1;
  double s = 0.5;
  StepMode mode = StepMode::exact;
  int directions = 8;  // D, used when n = 2
  int subbands = 4;    // M

  void validate(int n) const;
};

/// (-1)^i C(r, i) for i = 0..r.
std::vector<double> binomial_weights(int r);

/// Continuous r-th symmetric difference: sum (-1)^i C(r,i) f(x + (r/2 - i) h).
template <class F, class Vec>
  requires std::is_invocable_v<F&, const Vec&>
auto sym_diff(F&& f, const Vec& x, const Vec& h, int r) {
  const auto w = binomial_weights(r);
  decltype(f(x)) acc{};
  for (int i = 0; i <= r; ++i) acc += w[static_cast<std::size_t>(i)] * f(x + (0.5 * r - i) * h);
  return acc;
}

/// Lattice version with x and h in sample units. When r h_d is odd along an
/// axis the evaluation points fall on cell boundaries; the difference is then
/// taken about the point half a cell above x on that axis, so every
/// evaluation lands on a sample centre.
double sym_diff(const SampledFunction& f, const Index2& x, const Index2& h, int r);

/// Lattice step vectors of length ~m used for direction sampling.
std::vector<Index2> step_vectors(int n, long m, int directions);

/// Delta_r f(x, y): largest |sym_diff| over sampled h with |h| = y (exact) or
/// |h| <= y (sup). y is rounded to a whole number of samples (at least one).
double diff_modulus(const SampledFunction& f, const Index2& x, double y, const DiffConfig& cfg);

/// Sampled y of each (level, sub-band): the upper end of the sub-band, rounded
/// to whole samples.
long representative_step(const GridSpec& spec, int j, int b, int subbands);

/// Delta_r f(x, y) / y^s for every x-cell and every (level, sub-band).
struct ModulusField {
  GridSpec spec;
  int subbands = 4;
  /// ratio[j * M + b][p]
  std::vector<Eigen::ArrayXd> ratio;

  static ModulusField compute(const SampledFunction& f, const DiffConfig& cfg);

  int level_count() const { return static_cast<int>(ratio.size()) / subbands; }
  double max() const;
  /// Largest ratio on each level.
  std::vector<double> level_max() const;
  /// Cells with ratio > eps.
  RegionMask threshold(double eps) const;
};

struct LipNorm {
  double sup_norm = 0.0;
  double seminorm = 0.0;
  double value() const { return sup_norm + seminorm; }
};

LipNorm lip_norm(const SampledFunction& f, const DiffConfig& cfg);
RegionMask bad_set(const SampledFunction& f, const DiffConfig& cfg, double eps);

struct InequalityProbe {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio() const { return rhs > 0 ? lhs / rhs : (lhs > 0 ? INFINITY : 0.0); }
};

/// Default dilation A of the Whitney probe: max(A0, 4r).
double default_whitney_A(double A0, int r);

/// Local polynomial approximation on A0 I against the difference modulus on
/// A I for y in [l(I)/A, l(I)/2]. A <= 0 selects the default.
InequalityProbe whitney_gap(const SampledFunction& f, const DyadicCube& I, const DiffConfig& cfg,
                            double A0, double A = 0.0);

/// Normalised detail coefficients of I against sup of Delta_r f / y^s over
/// A0 I x [l(I)/A0, l(I)/2].
InequalityProbe tent_coeff_bound(const WaveletCoefficients& c, const SampledFunction& f,
                                 const DyadicCube& I, const DiffConfig& cfg, double A0);

}  // namespace lipdev
