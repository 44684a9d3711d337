#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lipdev/difference.hpp"
#include "lipdev/lattice.hpp"
#include "lipdev/wavelet.hpp"

namespace lipdev {

enum class PresetKind { jsbmo, sobolev, besov, besov_inf, triebel, triebel_inf, besov_type, tl_type };

/// A target function space together with the functionals
/// used on the difference side (bad sets) and the wavelet side (coefficient
/// super-level sets).
struct Preset {
  PresetKind kind = PresetKind::jsbmo;
  double p = 2.0;
  double q = 2.0;
  double tau = 0.0;

  /// "jsbmo", "sobolev(p)", "besov(p,q)", "besov_inf(q)", "triebel(p,q)",
  /// "triebel_inf(q)", "besov_type(p,q,tau)", "tl_type(p,q,tau)".
  static Preset parse(const std::string& text);
  std::string name() const;
  std::string family() const;
  void validate(const DiffConfig& cfg) const;

  /// Exponent u of the convexification applied to the bad-set stack
  /// (0 when the side uses a measure instead of a norm).
  double convexification() const;
  /// Lattice for the difference side (after convexification).
  LatticeSpec difference_lattice() const;
  /// Lattice for the wavelet side.
  LatticeSpec wavelet_lattice() const;

  double difference_functional(const RegionMask& bad) const;
  double wavelet_functional(const SuperlevelSets& sets) const;
};

/// top * 2^{-octaves (points-1-i)/(points-1)}, i = 0..points-1.
std::vector<double> eps_grid(double top, int points = 33, double octaves = 8.0);

struct ClassifierConfig {
  /// Value ratio v(J) / v(J-2) at or above which an eps is divergent.
  double growth_threshold = 1.04;
  /// Level-profile slope (log2 per level) at or below which every eps is
  /// bounded: the super-level sets empty out at finite depth.
  double decay_slope = -0.25;
  /// Levels used for the slope fit, ending at J-2.
  int fit_levels = 4;
  /// Relative width at which bisection stops.
  double bisection_tol = 1e-2;
};

/// Functional values as a function of (eps, resolution), plus the level
/// profile used for the decay test. Resolutions are J-2, J-1, J: the
/// super-level sets computed at J are truncated to levels below J'.
class FunctionalSide {
 public:
  /// Values at the three resolutions for one eps.
  using Values = std::function<std::vector<double>(double eps)>;

  FunctionalSide(int J, std::vector<double> profile, double top, bool zero, Values values);

  /// Bad sets of f under the preset. The side counts as zero when the
  /// largest ratio is at most `noise_floor`.
  static FunctionalSide difference(const ModulusField& field, const Preset& preset, double noise_floor = 0.0);
  /// Coefficient super-level sets under the preset.
  static FunctionalSide wavelet(const WaveletCoefficients& c, double s, const Preset& preset);

  int J() const { return J_; }
  std::vector<int> resolutions() const { return {J_ - 2, J_ - 1, J_}; }
  const std::vector<double>& profile() const { return profile_; }
  double top() const { return top_; }
  std::vector<double> values(double eps) const;
  bool zero() const { return zero_; }
  /// Least-squares slope of log2 profile over the fit window ending at
  /// level J-2 (-inf once the profile reaches 0 there).
  double profile_slope(const ClassifierConfig& cc) const;

 private:
  int J_;
  std::vector<double> profile_;
  double top_;
  bool zero_;
  Values values_;
};

struct MassCurve {
  std::vector<double> eps;
  std::vector<int> resolutions;
  Eigen::MatrixXd values;  // eps x resolution
};

MassCurve mass_curve(const FunctionalSide& side, const std::vector<double>& eps);
MassCurve mass_curve(const SampledFunction& f, const DiffConfig& cfg, const Preset& preset,
                     const std::vector<double>& eps);

enum class DeviationFlag { zero, floor, resolved, unresolved };
std::string to_string(DeviationFlag flag);

struct DeviationResult {
  double eps_hat = 0.0;
  DeviationFlag flag = DeviationFlag::resolved;
  MassCurve curve;
  std::vector<bool> divergent;
  bool profile_decays = false;
  double profile_slope = 0.0;
};

/// True when the functional grows without bound at this eps.
bool classify_divergent(const FunctionalSide& side, double eps, const ClassifierConfig& cc);

/// Smallest eps above which every value stays bounded; bisection between the
/// bracketing grid points returns the bounded end.
DeviationResult deviation_constant(const FunctionalSide& side, const std::vector<double>& eps,
                                   const ClassifierConfig& cc = {});

/// Difference side with the default grid (top = Lipschitz seminorm).
DeviationResult lipschitz_deviation(const SampledFunction& f, const DiffConfig& cfg, const Preset& preset,
                                    const ClassifierConfig& cc = {});

/// Wavelet side with the default grid (top = b^s_{inf,inf} norm).
DeviationResult wavelet_distance_d0(const WaveletCoefficients& c, double s, const Preset& preset,
                                    const ClassifierConfig& cc = {});

struct DeviationReport {
  std::string preset;
  double s = 0.0;
  int r = 1;
  int J = 0;
  DeviationResult difference;
  DeviationResult wavelet;
  TailResult tail;
  long tail_K0 = 0;
  double sum() const { return difference.eps_hat + wavelet.eps_hat + (tail.applicable ? tail.value : 0.0); }
  /// d0 / eps_hat when both are resolved and nonzero, else NaN.
  double ratio() const;
  bool zero() const { return difference.flag == DeviationFlag::zero && wavelet.flag == DeviationFlag::zero; }

  /// Rows: preset,s,r,epsilon,J,functional,divergent for one side.
  std::string csv_rows(bool wavelet_side) const;
  static std::string csv_header();
  std::string summary_json() const;
};

struct DistanceOptions {
  std::optional<WaveletSystem> system;           // default: for_smoothness(s, r)
  std::optional<WaveletCoefficients> coeffs;     // default: analyze(f)
  ClassifierConfig classifier;
};

DeviationReport distance_estimate(const SampledFunction& f, const DiffConfig& cfg, const Preset& preset,
                                  const DistanceOptions& opt = {});

/// Radius of the support in unit cubes plus the filter length.
long tail_radius(const SampledFunction& f, const WaveletSystem& sys);

struct ClosureVerdict {
  std::vector<double> eps;
  std::vector<bool> bounded;
  bool tail_ok = true;
  bool member = false;
};

ClosureVerdict closure_test(const SampledFunction& f, const DiffConfig& cfg, const Preset& preset,
                            const std::vector<double>& eps, const ClassifierConfig& cc = {});

struct InclusionRow {
  double c = 0.0;
  int m = 0;
  double R = 0.0;
  std::size_t marked_a = 0, missed_a = 0;  // T_j not covered by dilated S
  std::size_t marked_b = 0, missed_b = 0;  // S_j not covered by dilated T0
  double fraction_a() const { return marked_a ? double(missed_a) / double(marked_a) : 0.0; }
  double fraction_b() const { return marked_b ? double(missed_b) / double(marked_b) : 0.0; }
  bool holds() const { return missed_a == 0 && missed_b == 0; }
};

struct InclusionOptions {
  std::vector<double> c_grid{0.125, 0.25, 0.5};
  int m_max = 4;
  std::vector<double> R_grid{0.25, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0};
  int j_lo = 1;
  int j_hi = -1;  // default J - 3
};

struct InclusionResult {
  std::vector<InclusionRow> rows;  // ordered by R, then m, then c descending
  std::optional<InclusionRow> first_holding;
};

InclusionResult inclusion_experiment(const SampledFunction& f, const WaveletCoefficients& c, const DiffConfig& cfg,
                                     double eps, const InclusionOptions& opt = {});

}  // namespace lipdev
