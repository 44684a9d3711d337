#pragma once

#include <Eigen/Core>

#include <limits>
#include <string>
#include <vector>

#include "lipdev/grid.hpp"
#include "lipdev/region_mask.hpp"

namespace lipdev {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class LatticeTag { besov, triebel, f_inf, besov_type, tl_type, nu_m, nu_count };

std::string to_string(LatticeTag tag);
LatticeTag lattice_tag_from_string(const std::string& name);

struct LatticeSpec {
  LatticeTag tag = LatticeTag::besov;
  double p = 2.0;  // (0, inf]
  double q = 2.0;  // (0, inf]
  double tau = 0.0;

  static LatticeSpec besov(double p, double q) { return {LatticeTag::besov, p, q, 0.0}; }
  static LatticeSpec triebel(double p, double q) { return {LatticeTag::triebel, p, q, 0.0}; }
  static LatticeSpec f_inf(double q) { return {LatticeTag::f_inf, kInf, q, 0.0}; }
  static LatticeSpec besov_type(double p, double q, double tau) { return {LatticeTag::besov_type, p, q, tau}; }
  static LatticeSpec tl_type(double p, double q, double tau) { return {LatticeTag::tl_type, p, q, tau}; }
  static LatticeSpec nu_m() { return {LatticeTag::nu_m, kInf, kInf, 0.0}; }
  static LatticeSpec nu_count() { return {LatticeTag::nu_count, kInf, kInf, 0.0}; }

  void validate() const;
  bool is_norm() const { return tag != LatticeTag::nu_m && tag != LatticeTag::nu_count; }

  /// {"tag": ..., "p": ..., "q": ..., "tau": ...}; infinite exponents as "inf".
  std::string to_json() const;
  static LatticeSpec from_json(const std::string& text);

  friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;
};

/// Nonnegative functions f_0 .. f_{L-1} sampled on the grid cells.
struct LevelStack {
  GridSpec spec;
  std::vector<Eigen::ArrayXd> levels;

  static LevelStack zeros(const GridSpec& spec, int level_count);
  int level_count() const { return static_cast<int>(levels.size()); }
};

/// f_j = sum of indicators of the level-j cubes of the family.
LevelStack stack_from_cubes(const CubeFamily& family);

/// f_j(x) = dy/y mass of the marked level-j cells above x.
LevelStack stack_from_badset(const RegionMask& m);

/// Quasi-norm of the stack for a norm tag. Throws WrongFunctionalError for
/// the NU_* tags.
double x_norm(const LevelStack& st, const LatticeSpec& spec);

/// sup over dyadic I of side <= 1 of mu(m cap I x (0, l(I))) / |I|.
double carleson_M(const RegionMask& m);

/// NU_M: carleson_M of the levelwise union; NU_COUNT: number of nonempty
/// levels. Throws WrongFunctionalError for norm tags.
double nu_eval(const RegionMask& m, const LatticeSpec& spec);

/// f_j -> f_j^u.
LevelStack convexify(const LevelStack& st, double u);

enum class ShiftDir { left, right };

/// left: f_j <- f_{j+1}; right: f_j <- f_{j-1} with f_{-1} = 0.
LevelStack shift(const LevelStack& st, ShiftDir dir);

/// Block reductions of a cell array to the dyadic cubes of levels
/// `coarsest`..J; entry [J - l] holds the level-l cubes, first axis fastest.
std::vector<Eigen::ArrayXd> block_pyramid(const GridSpec& spec, const Eigen::ArrayXd& cells,
                                          int coarsest, bool use_max);

}  // namespace lipdev
