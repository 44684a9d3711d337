#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "job.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lipdev::ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace lipdev::job;
  CLI::App app{"Lipschitz deviation estimates from differences and wavelet coefficients"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 0;
  long long seed = -1;
  bool print_config = false;
  for (const auto& name : subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON job configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--threads", threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "random seed (overrides the config)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--print-config", print_config, "print the canonical configuration and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    const auto base = std::filesystem::path(config_path).parent_path().string();
    JobConfig cfg = parse_config(read_file(config_path), base.empty() ? "." : base);
    if (!out_dir.empty()) cfg.out = out_dir;
    if (threads > 0) cfg.threads = threads;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (print_config) {
      std::cout << cfg.canonical_json();
      return 0;
    }
    const JobOutput out = run_job(sub, cfg);
    write_outputs(out, cfg.out);
    std::cout << out.summary;
    return out.status;
  } catch (const std::exception& e) {
    std::cerr << "lipdev " << sub << ": " << e.what() << "\n";
    return exit_code_for(e);
  }
}
