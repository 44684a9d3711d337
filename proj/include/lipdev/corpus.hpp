#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lipdev/grid.hpp"
#include "lipdev/wavelet.hpp"

namespace lipdev {

enum class Verdict { member, non_member, boundary, unspecified };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& name);

struct CorpusEntry {
  std::string name;
  std::map<std::string, double> params;
  SampledFunction f;
  /// Prescribed coefficients for wavelet-defined entries.
  std::optional<WaveletCoefficients> coeffs;
  /// Expected closure verdict, keyed by preset family name ("*" = any).
  std::map<std::string, Verdict> expected;
  std::string basis;  // where the expectation comes from

  Verdict expected_for(const std::string& preset_family) const;
};

/// Entry names: f_flat, f_log, gaussian, weierstrass, poly, const.
/// Parameters (defaults in brackets):
///   f_flat: s [0.5]
///   f_log: s [0.5], a [0.5]
///   gaussian: center [0.5], width [0.125]
///   weierstrass: s [0.5], base [2], terms [J]
///   poly: c0, c1, ... (coefficients, [1])
///   const: c [0]
CorpusEntry make_entry(const std::string& name, const std::map<std::string, double>& params,
                       const GridSpec& spec, const WaveletSystem& sys);

std::vector<std::string> corpus_names();

/// Manifest listing entries, parameters, expected verdicts and their basis.
std::string corpus_manifest_json(const std::vector<CorpusEntry>& entries);

/// Smooth window equal to 1 on [1/4, 3/4] and 0 outside (0, 1).
double unit_window(double t);

}  // namespace lipdev
