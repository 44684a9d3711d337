#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "lipdev/grid.hpp"

namespace lipdev {

/// Cellwise subset of the upper half-space. Level j covers the octave
/// y in (2^{-j-1}, 2^{-j}], split into M log-uniform sub-bands; each cell is
/// (grid x-cell) x (sub-band).
struct RegionMask {
  GridSpec spec;
  int subbands = 4;
  /// levels[j][b * cells + p]
  std::vector<std::vector<std::uint8_t>> levels;

  static RegionMask empty(const GridSpec& spec, int level_count, int subbands);

  int level_count() const { return static_cast<int>(levels.size()); }
  std::size_t cells() const { return spec.sample_count(); }

  bool get(int j, int b, std::size_t p) const {
    return levels[static_cast<std::size_t>(j)][static_cast<std::size_t>(b) * cells() + p] != 0;
  }
  void set(int j, int b, std::size_t p, bool on = true) {
    levels[static_cast<std::size_t>(j)][static_cast<std::size_t>(b) * cells() + p] = on ? 1 : 0;
  }

  double y_lo(int j, int b) const { return std::ldexp(std::exp2(double(b) / subbands), -j - 1); }
  double y_hi(int j, int b) const { return std::ldexp(std::exp2(double(b + 1) / subbands), -j - 1); }
  /// Hyperbolic midpoint of the sub-band.
  double y_mid(int j, int b) const {
    return std::ldexp(std::exp2((b + 0.5) / subbands), -j - 1);
  }
  /// ln(y_hi / y_lo), identical for every cell.
  double log_width() const { return std::numbers::ln2 / subbands; }

  bool level_empty(int j) const;
  bool is_empty() const;
  std::size_t count() const;
  std::size_t count(int j) const;

  /// Marks the tent of a dyadic cube (levels beyond the mask are ignored).
  void add_tent(const DyadicCube& cube);
  /// Marks every level between `lo` and `hi` (inclusive) over a cube.
  void add_column(const DyadicCube& cube, int lo, int hi);

  RegionMask& operator|=(const RegionMask& other);
  bool subset_of(const RegionMask& other) const;
  /// Keeps levels 0..level_count-1 (others dropped).
  RegionMask truncated(int level_count) const;
  /// Keeps only the listed level range, clearing all others.
  RegionMask restricted(int lo, int hi) const;

  friend bool operator==(const RegionMask&, const RegionMask&) = default;
};

/// Union of the tents over every cube in the family.
RegionMask tents_of(const CubeFamily& family, int subbands);

/// JSON header {"J", "M", "n", "K", "ext", "levels"} where each level is a
/// run-length list over its bitmap (b-major), starting with a run of zeros.
std::string to_json(const RegionMask& mask);
RegionMask region_mask_from_json(const std::string& text);

}  // namespace lipdev
