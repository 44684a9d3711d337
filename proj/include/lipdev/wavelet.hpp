#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "lipdev/grid.hpp"

namespace lipdev {

/// Orthonormal Daubechies family Db-N (N vanishing moments, 2N taps).
struct WaveletSystem {
  int N = 1;
  std::vector<double> lowpass;  // h_0 .. h_{2N-1}, sum = sqrt(2)
  double holder = 0.0;          // tabulated Hölder exponent of phi and psi

  static WaveletSystem daubechies(int N);
  /// Db-N with N = max(r, ceil(s) + 2).
  static WaveletSystem for_smoothness(double s, int r);

  int taps() const { return 2 * N; }
  /// g_m = (-1)^m h_{2N-1-m}.
  std::vector<double> highpass() const;
  static int genders(int n) { return (1 << n) - 1; }
  static int max_order() { return 10; }

  friend bool operator==(const WaveletSystem& a, const WaveletSystem& b) { return a.N == b.N; }
};

/// Coefficients of the critically sampled periodised transform, stored in
/// the usual pyramid layout over an array shaped like the samples.
///
/// Scaling coefficients (level 0, one per unit cube of the box) occupy the
/// block [0, 2^K)^n. The level-j details of gender g sit in the block offset
/// by 2^{K+j} along every axis whose bit is set in g (bit 0 = first axis).
struct WaveletCoefficients {
  GridSpec spec;
  WaveletSystem system;
  Eigen::ArrayXd data;

  static WaveletCoefficients zeros(const GridSpec& spec, const WaveletSystem& sys);

  std::size_t scaling_slot(const Index2& k) const;
  std::size_t detail_slot(int gender, int j, const Index2& k) const;

  double scaling(const Index2& k) const { return data[slot(scaling_slot(k))]; }
  double& scaling(const Index2& k) { return data[slot(scaling_slot(k))]; }
  double detail(int gender, int j, const Index2& k) const {
    return data[slot(detail_slot(gender, j, k))];
  }
  double& detail(int gender, int j, const Index2& k) {
    return data[slot(detail_slot(gender, j, k))];
  }

  /// Largest |c| over every gender attached to the cube (scaling included
  /// at level 0 when `with_scaling`).
  double cube_max(const DyadicCube& cube, bool with_scaling) const;

 private:
  static Eigen::Index slot(std::size_t s) { return static_cast<Eigen::Index>(s); }
};

/// |I|^{-s/n-1/2} for a level-j cube.
inline double coeff_weight(int j, double s, int n) { return std::exp2(j * (s + 0.5 * n)); }

WaveletCoefficients analyze(const SampledFunction& f, const WaveletSystem& sys);
SampledFunction synthesize(const WaveletCoefficients& c);

/// sup over the family of |I_w|^{-s/n-1/2} |c_w| (the b^s_{inf,inf} norm).
double coeff_norm_binf(const WaveletCoefficients& c, double s);

/// Largest normalised coefficient at each level 0..J-1.
std::vector<double> level_profile(const WaveletCoefficients& c, double s, bool with_scaling);

struct SuperlevelSets {
  CubeFamily w0;  // scaling and detail coefficients
  CubeFamily w;   // detail coefficients only
  CubeFamily v0;  // level-0 cubes whose scaling coefficient exceeds eps
};

SuperlevelSets superlevel_sets(const WaveletCoefficients& c, double s, double eps);

/// Keeps every coefficient attached to a cube of W0(s, f, eps).
WaveletCoefficients threshold_approx(const WaveletCoefficients& c, double s, double eps);

struct TailResult {
  double value = 0.0;
  bool applicable = true;   // false in periodic mode
  bool beyond_box = false;  // no scaling position satisfies |k| >= K0
};

/// max |<f, phi_k>| over scaling positions with |k| >= K0. Positions are read
/// as signed offsets from the origin, wrapping at half the box.
TailResult scaling_tail(const WaveletCoefficients& c, long K0);

/// Signed position of a level-0 cube index (k in [0, 2^K) -> (-2^{K-1}, 2^{K-1}]).
long signed_position(long k, int K);

}  // namespace lipdev
