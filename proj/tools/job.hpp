#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lipdev/deviation.hpp"

namespace lipdev::job {

/// One function to process: a corpus entry or a sample file.
struct Source {
  std::string corpus;                    // corpus entry name, or empty
  std::map<std::string, double> params;  // corpus parameters
  std::string input;                     // whitespace-separated samples
  std::string label;                     // used in file names
};

struct JobConfig {
  GridSpec grid{1, 10, 0, Extension::periodic};
  int wavelet_order = 0;  // 0: chosen from s and r
  DiffConfig diff;
  std::vector<std::string> presets{"jsbmo"};
  int eps_points = 33;
  double eps_octaves = 8.0;
  ClassifierConfig classifier;
  std::vector<Source> functions;  // empty: the whole corpus
  double badset_eps = 0.5;
  double whitney_A0 = 4.0;
  double whitney_A = 0.0;
  int whitney_max_level = -1;  // -1: min(J - 3, 6)
  double inclusion_eps = 0.5;
  InclusionOptions inclusion;
  long hypcheck_samples = 10000;
  std::string out = "out";
  std::uint64_t seed = 1;
  int threads = 1;

  WaveletSystem system() const;
  /// Canonical JSON with every default filled in.
  std::string canonical_json() const;
  /// FNV-1a 64 of the canonical JSON without `out` and `threads`.
  std::string hash() const;
};

/// Parses and validates a configuration. Unknown keys and range violations
/// raise ConfigError naming the key path. Relative input paths resolve
/// against `base_dir`.
JobConfig parse_config(const std::string& text, const std::string& base_dir = ".");

struct JobOutput {
  std::map<std::string, std::string> files;  // relative name -> content
  int status = 0;                            // 0 or 3 (corpus mismatch) or 4 (failed check)
  std::string summary;                       // printed on stdout
};

std::vector<std::string> subcommands();

/// Runs one subcommand. Nothing is written to disk here.
JobOutput run_job(const std::string& subcommand, const JobConfig& cfg);

/// Writes every file under `dir`. On failure the files already written are
/// removed and the error is rethrown.
void write_outputs(const JobOutput& out, const std::string& dir);

/// Exit code for an exception escaping run_job or parse_config.
int exit_code_for(const std::exception& e);

}  // namespace lipdev::job
