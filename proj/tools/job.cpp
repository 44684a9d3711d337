#include "job.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lipdev/corpus.hpp"
#include "lipdev/hyperbolic.hpp"
#include "lipdev/parallel.hpp"

namespace lipdev::job {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Object reader that remembers which keys were consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(where() + "expected an object");
  }

  template <class T>
  void get(const std::string& key, T& dst) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      dst = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(key_path(key) + ": wrong type");
    }
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) throw ConfigError(key_path(item.key()) + ": unknown key");
  }

 private:
  std::string where() const { return path_.empty() ? "config: " : path_ + ": "; }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Rethrows a module ConfigError with the key path in front.
template <class Fn>
void checked(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> read_samples(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read input file " + path.string());
  std::vector<double> v;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ConfigError(path.string() + ": not a number: '" + tok + "'");
    if (!std::isfinite(x)) throw NumericError(path.string() + ": non-finite sample");
    v.push_back(x);
  }
  return v;
}

}  // namespace

WaveletSystem JobConfig::system() const {
  return wavelet_order > 0 ? WaveletSystem::daubechies(wavelet_order) : WaveletSystem::for_smoothness(diff.s, diff.r);
}

std::string JobConfig::canonical_json() const {
  json fns = json::array();
  for (const auto& s : functions) {
    if (!s.corpus.empty()) fns.push_back({{"corpus", s.corpus}, {"params", s.params}, {"label", s.label}});
    else fns.push_back({{"input", s.input}, {"label", s.label}});
  }
  json j{{"grid", {{"n", grid.n}, {"J", grid.J}, {"K", grid.K}, {"ext", to_string(grid.ext)}}},
         {"wavelet", {{"order", system().N}}},
         {"diff",
          {{"r", diff.r}, {"s", diff.s}, {"mode", to_string(diff.mode)}, {"directions", diff.directions},
           {"subbands", diff.subbands}}},
         {"presets", presets},
         {"eps", {{"points", eps_points}, {"octaves", eps_octaves}}},
         {"classifier",
          {{"growth_threshold", classifier.growth_threshold},
           {"decay_slope", classifier.decay_slope},
           {"fit_levels", classifier.fit_levels},
           {"bisection_tol", classifier.bisection_tol}}},
         {"functions", fns},
         {"badset", {{"eps", badset_eps}}},
         {"whitney", {{"A0", whitney_A0}, {"A", whitney_A}, {"max_level", whitney_max_level}}},
         {"inclusion",
          {{"eps", inclusion_eps},
           {"c_grid", inclusion.c_grid},
           {"m_max", inclusion.m_max},
           {"R_grid", inclusion.R_grid},
           {"j_lo", inclusion.j_lo},
           {"j_hi", inclusion.j_hi}}},
         {"hypcheck", {{"samples", hypcheck_samples}}},
         {"out", out},
         {"seed", seed},
         {"threads", threads}};
  return j.dump(2) + "\n";
}

std::string JobConfig::hash() const {
  json j = json::parse(canonical_json());
  j.erase("out");
  j.erase("threads");
  return fnv1a(j.dump());
}

JobConfig parse_config(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  JobConfig cfg;
  Reader top(root, "");

  if (const json* g = top.child("grid")) {
    Reader r(*g, "grid");
    std::string ext = to_string(cfg.grid.ext);
    r.get("n", cfg.grid.n);
    r.get("J", cfg.grid.J);
    r.get("K", cfg.grid.K);
    r.get("ext", ext);
    r.finish();
    checked("grid.ext", [&] { cfg.grid.ext = extension_from_string(ext); });
  }
  cfg.grid.validate();

  if (const json* w = top.child("wavelet")) {
    Reader r(*w, "wavelet");
    r.get("order", cfg.wavelet_order);
    r.finish();
    require(cfg.wavelet_order >= 0 && cfg.wavelet_order <= WaveletSystem::max_order(),
            "wavelet.order: must lie in 1.." + std::to_string(WaveletSystem::max_order()));
  }

  if (const json* d = top.child("diff")) {
    Reader r(*d, "diff");
    std::string mode = to_string(cfg.diff.mode);
    r.get("r", cfg.diff.r);
    r.get("s", cfg.diff.s);
    r.get("mode", mode);
    r.get("directions", cfg.diff.directions);
    r.get("subbands", cfg.diff.subbands);
    r.finish();
    checked("diff.mode", [&] { cfg.diff.mode = step_mode_from_string(mode); });
  }
  checked("diff", [&] { cfg.diff.validate(cfg.grid.n); });

  top.get("presets", cfg.presets);
  require(!cfg.presets.empty(), "presets: at least one preset is required");
  for (std::size_t i = 0; i < cfg.presets.size(); ++i) {
    checked("presets[" + std::to_string(i) + "]", [&] {
      const auto p = Preset::parse(cfg.presets[i]);
      p.validate(cfg.diff);
      cfg.presets[i] = p.name();
    });
  }

  if (const json* e = top.child("eps")) {
    Reader r(*e, "eps");
    r.get("points", cfg.eps_points);
    r.get("octaves", cfg.eps_octaves);
    r.finish();
  }
  require(cfg.eps_points >= 2, "eps.points: need at least 2 points");
  require(cfg.eps_octaves > 0.0, "eps.octaves: must be positive");

  if (const json* c = top.child("classifier")) {
    Reader r(*c, "classifier");
    r.get("growth_threshold", cfg.classifier.growth_threshold);
    r.get("decay_slope", cfg.classifier.decay_slope);
    r.get("fit_levels", cfg.classifier.fit_levels);
    r.get("bisection_tol", cfg.classifier.bisection_tol);
    r.finish();
  }
  require(cfg.classifier.growth_threshold > 1.0, "classifier.growth_threshold: must exceed 1");
  require(cfg.classifier.fit_levels >= 2, "classifier.fit_levels: need at least 2 levels");
  require(cfg.classifier.bisection_tol > 0.0, "classifier.bisection_tol: must be positive");
  require(cfg.grid.J >= 3, "grid.J: deviation estimates need J >= 3");

  if (const json* fs_ = top.child("functions")) {
    if (!fs_->is_array()) throw ConfigError("functions: expected an array");
    std::map<std::string, int> used;
    for (std::size_t i = 0; i < fs_->size(); ++i) {
      const std::string path = "functions[" + std::to_string(i) + "]";
      Reader r((*fs_)[i], path);
      Source s;
      r.get("corpus", s.corpus);
      r.get("input", s.input);
      r.get("label", s.label);
      if (const json* p = r.child("params")) {
        Reader pr(*p, path + ".params");
        for (const auto& item : p->items()) pr.get(item.key(), s.params[item.key()]);
        pr.finish();
      }
      r.finish();
      if (s.corpus.empty() == s.input.empty()) throw ConfigError(path + ": give exactly one of 'corpus' and 'input'");
      if (!s.input.empty() && !s.params.empty()) throw ConfigError(path + ".params: only corpus entries take parameters");
      if (s.label.empty()) s.label = s.corpus.empty() ? fs::path(s.input).stem().string() : s.corpus;
      for (char ch : s.label)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-'))
          throw ConfigError(path + ".label: use letters, digits, '_' or '-'");
      if (used[s.label]++) s.label += "_" + std::to_string(i);
      cfg.functions.push_back(std::move(s));
    }
  }
  if (cfg.functions.empty())
    for (const auto& name : corpus_names()) cfg.functions.push_back({name, {}, "", name});

  // Build every function once so that parameter errors surface here.
  const auto sys = cfg.system();
  for (std::size_t i = 0; i < cfg.functions.size(); ++i) {
    auto& s = cfg.functions[i];
    const std::string path = "functions[" + std::to_string(i) + "]";
    if (!s.corpus.empty()) {
      checked(path, [&] { s.params = make_entry(s.corpus, s.params, cfg.grid, sys).params; });
    } else {
      fs::path p(s.input);
      if (p.is_relative()) p = fs::path(base_dir) / p;
      const auto v = read_samples(p);
      if (v.size() != cfg.grid.sample_count())
        throw ConfigError(path + ".input: expected " + std::to_string(cfg.grid.sample_count()) + " samples, found " +
                          std::to_string(v.size()));
      s.input = p.lexically_normal().string();
    }
  }

  if (const json* b = top.child("badset")) {
    Reader r(*b, "badset");
    r.get("eps", cfg.badset_eps);
    r.finish();
  }
  require(cfg.badset_eps > 0.0, "badset.eps: must be positive");

  if (const json* w = top.child("whitney")) {
    Reader r(*w, "whitney");
    r.get("A0", cfg.whitney_A0);
    r.get("A", cfg.whitney_A);
    r.get("max_level", cfg.whitney_max_level);
    r.finish();
  }
  require(cfg.whitney_A0 > 2.0, "whitney.A0: must exceed 2");
  require(cfg.whitney_A == 0.0 || cfg.whitney_A >= 1.0, "whitney.A: must be 0 (default) or >= 1");
  require(cfg.whitney_max_level >= -1 && cfg.whitney_max_level < cfg.grid.J, "whitney.max_level: must lie in -1..J-1");

  if (const json* in = top.child("inclusion")) {
    Reader r(*in, "inclusion");
    r.get("eps", cfg.inclusion_eps);
    r.get("c_grid", cfg.inclusion.c_grid);
    r.get("m_max", cfg.inclusion.m_max);
    r.get("R_grid", cfg.inclusion.R_grid);
    r.get("j_lo", cfg.inclusion.j_lo);
    r.get("j_hi", cfg.inclusion.j_hi);
    r.finish();
  }
  require(cfg.inclusion_eps > 0.0, "inclusion.eps: must be positive");
  require(!cfg.inclusion.c_grid.empty() && !cfg.inclusion.R_grid.empty(), "inclusion: c_grid and R_grid must be nonempty");
  for (double c : cfg.inclusion.c_grid) require(c > 0.0 && c <= 1.0, "inclusion.c_grid: values must lie in (0, 1]");
  for (std::size_t i = 0; i < cfg.inclusion.R_grid.size(); ++i) {
    require(cfg.inclusion.R_grid[i] > 0.0, "inclusion.R_grid: values must be positive");
    require(i == 0 || cfg.inclusion.R_grid[i] > cfg.inclusion.R_grid[i - 1], "inclusion.R_grid: must be increasing");
  }
  require(cfg.inclusion.m_max >= 1, "inclusion.m_max: must be >= 1");

  if (const json* h = top.child("hypcheck")) {
    Reader r(*h, "hypcheck");
    r.get("samples", cfg.hypcheck_samples);
    r.finish();
  }
  require(cfg.hypcheck_samples >= 1, "hypcheck.samples: must be >= 1");

  top.get("out", cfg.out);
  top.get("seed", cfg.seed);
  top.get("threads", cfg.threads);
  top.finish();
  require(cfg.threads >= 1, "threads: must be >= 1");
  return cfg;
}

std::vector<std::string> subcommands() {
  return {"analyze", "lipnorm", "badset", "deviation", "distance", "corpus", "hypcheck", "whitney", "inclusion"};
}

namespace {

struct Item {
  std::string label;
  SampledFunction f;
  std::optional<WaveletCoefficients> coeffs;
  std::optional<CorpusEntry> entry;
};

std::vector<Item> build_items(const JobConfig& cfg) {
  std::vector<Item> items;
  const auto sys = cfg.system();
  for (const auto& s : cfg.functions) {
    if (!s.corpus.empty()) {
      auto e = make_entry(s.corpus, s.params, cfg.grid, sys);
      items.push_back({s.label, e.f, e.coeffs, e});
    } else {
      const auto v = read_samples(s.input);
      SampledFunction f{cfg.grid, Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size()))};
      items.push_back({s.label, f, std::nullopt, std::nullopt});
    }
  }
  return items;
}

std::string csv_start(const JobConfig& cfg, const std::string& header) {
  return "# config_hash=fnv1a64:" + cfg.hash() + "\n" + header;
}

std::string run_analyze(const JobConfig& cfg, const std::vector<Item>& items, JobOutput& out) {
  const auto sys = cfg.system();
  for (const auto& it : items) {
    const auto c = analyze(it.f, sys);
    std::string csv = csv_start(cfg, "gender,j,k0,k1,c\n");
    const long units = cubes_per_axis(cfg.grid, 0);
    for (long b = 0; b < (cfg.grid.n == 2 ? units : 1); ++b)
      for (long a = 0; a < units; ++a)
        csv += "0,-1," + std::to_string(a) + "," + std::to_string(b) + "," + num(c.scaling({a, b})) + "\n";
    for (int j = 0; j < cfg.grid.J; ++j)
      for (const auto& cube : cubes_at_level(cfg.grid, j))
        for (int g = 1; g <= WaveletSystem::genders(cfg.grid.n); ++g)
          csv += std::to_string(g) + "," + std::to_string(j) + "," + std::to_string(cube.index[0]) + "," +
                 std::to_string(cube.index[1]) + "," + num(c.detail(g, j, cube.index)) + "\n";
    out.files["analyze_" + it.label + ".csv"] = csv;
  }
  return "analyze: " + std::to_string(items.size()) + " coefficient table(s), Db" + std::to_string(sys.N) + "\n";
}

std::string run_lipnorm(const JobConfig& cfg, const std::vector<Item>& items, JobOutput& out) {
  std::string csv = csv_start(cfg, "function,s,r,sup_norm,seminorm,value\n");
  std::string summary;
  for (const auto& it : items) {
    const auto ln = lip_norm(it.f, cfg.diff);
    csv += it.label + "," + num(cfg.diff.s) + "," + std::to_string(cfg.diff.r) + "," + num(ln.sup_norm) + "," +
           num(ln.seminorm) + "," + num(ln.value()) + "\n";
    summary += "lipnorm " + it.label + ": " + num(ln.value()) + "\n";
  }
  out.files["lipnorm.csv"] = csv;
  return summary;
}

std::string run_badset(const JobConfig& cfg, const std::vector<Item>& items, JobOutput& out) {
  std::string csv = csv_start(cfg, "function,epsilon,level,cells,mu\n");
  std::string summary;
  for (const auto& it : items) {
    const auto bad = bad_set(it.f, cfg.diff, cfg.badset_eps);
    out.files["badset_" + it.label + ".json"] = to_json(bad) + "\n";
    for (int j = 0; j < bad.level_count(); ++j)
      csv += it.label + "," + num(cfg.badset_eps) + "," + std::to_string(j) + "," + std::to_string(bad.count(j)) +
             "," + num(mu_measure(bad.restricted(j, j))) + "\n";
    summary += "badset " + it.label + ": " + std::to_string(bad.count()) + " cells\n";
  }
  out.files["badset.csv"] = csv;
  return summary;
}

json summary_of(const DeviationReport& rep, const std::string& label) {
  json j = json::parse(rep.summary_json());
  j["function"] = label;
  return j;
}

std::string run_deviation(const JobConfig& cfg, const std::vector<Item>& items, JobOutput& out) {
  std::string summary;
  json all = json::array();
  for (const auto& it : items) {
    std::string csv = csv_start(cfg, DeviationReport::csv_header());
    for (const auto& name : cfg.presets) {
      const auto preset = Preset::parse(name);
      DeviationReport rep;
      rep.preset = preset.name();
      rep.s = cfg.diff.s;
      rep.r = cfg.diff.r;
      rep.J = cfg.grid.J;
      const auto field = ModulusField::compute(it.f, cfg.diff);
      const auto side = FunctionalSide::difference(field, preset, 1e-11 * it.f.sup_norm());
      rep.difference = deviation_constant(side, eps_grid(side.top(), cfg.eps_points, cfg.eps_octaves), cfg.classifier);
      csv += rep.csv_rows(false);
      all.push_back({{"function", it.label},
                     {"preset", rep.preset},
                     {"eps_hat", rep.difference.eps_hat},
                     {"eps_hat_flag", to_string(rep.difference.flag)}});
      summary += "deviation " + it.label + " " + rep.preset + ": eps_hat=" + num(rep.difference.eps_hat) + " (" +
                 to_string(rep.difference.flag) + ")\n";
    }
    out.files["deviation_" + it.label + ".csv"] = csv;
  }
  out.files["deviation_summary.json"] = all.dump(2) + "\n";
  return summary;
}

DeviationReport report_for(const JobConfig& cfg, const Item& it, const Preset& preset) {
  DistanceOptions opt;
  opt.system = cfg.system();
  if (it.coeffs && it.coeffs->system == *opt.system) opt.coeffs = it.coeffs;
  opt.classifier = cfg.classifier;
  // distance_estimate uses the default grid size; rebuild both sides when the
  // configured grid differs.
  if (cfg.eps_points == 33 && cfg.eps_octaves == 8.0) return distance_estimate(it.f, cfg.diff, preset, opt);
  DeviationReport rep;
  rep.preset = preset.name();
  rep.s = cfg.diff.s;
  rep.r = cfg.diff.r;
  rep.J = cfg.grid.J;
  const auto field = ModulusField::compute(it.f, cfg.diff);
  const auto dside = FunctionalSide::difference(field, preset, 1e-11 * it.f.sup_norm());
  rep.difference = deviation_constant(dside, eps_grid(dside.top(), cfg.eps_points, cfg.eps_octaves), cfg.classifier);
  const auto c = opt.coeffs ? *opt.coeffs : analyze(it.f, *opt.system);
  const auto wside = FunctionalSide::wavelet(c, cfg.diff.s, preset);
  rep.wavelet = deviation_constant(wside, eps_grid(wside.top(), cfg.eps_points, cfg.eps_octaves), cfg.classifier);
  rep.tail_K0 = tail_radius(it.f, c.system);
  rep.tail = scaling_tail(c, rep.tail_K0);
  return rep;
}

std::string run_distance(const JobConfig& cfg, const std::vector<Item>& items, JobOutput& out) {
  std::string summary;
  for (const auto& it : items) {
    std::string dcsv = csv_start(cfg, DeviationReport::csv_header());
    std::string wcsv = dcsv;
    json all = json::array();
    for (const auto& name : cfg.presets) {
      const auto rep = report_for(cfg, it, Preset::parse(name));
      dcsv += rep.csv_rows(false);
      wcsv += rep.csv_rows(true);
      all.push_back(summary_of(rep, it.label));
      summary += "distance " + it.label + " " + rep.preset + ": eps_hat=" + num(rep.difference.eps_hat) + " (" +
                 to_string(rep.difference.flag) + ") d0=" + num(rep.wavelet.eps_hat) + " (" +
                 to_string(rep.wavelet.flag) + ") ratio=" + num(rep.ratio()) + "\n";
    }
    out.files["distance_" + it.label + "_difference.csv"] = dcsv;
    out.files["distance_" + it.label + "_wavelet.csv"] = wcsv;
    out.files["distance_" + it.label + ".json"] = all.dump(2) + "\n";
  }
  return summary;
}

std::string run_corpus(const JobConfig& cfg, const std::vector<Item>& items, JobOutput& out) {
  std::string csv = csv_start(cfg, "function,preset,expected,computed,match\n");
  std::vector<CorpusEntry> entries;
  std::string summary;
  int mismatches = 0;
  for (const auto& it : items) {
    if (it.entry) entries.push_back(*it.entry);
    const auto top = lip_norm(it.f, cfg.diff).seminorm;
    for (const auto& name : cfg.presets) {
      const auto preset = Preset::parse(name);
      const Verdict expected = it.entry ? it.entry->expected_for(preset.family()) : Verdict::unspecified;
      const auto v = closure_test(it.f, cfg.diff, preset, eps_grid(top > 0 ? top : 1.0, cfg.eps_points, cfg.eps_octaves),
                                  cfg.classifier);
      const Verdict computed = v.member ? Verdict::member : Verdict::non_member;
      std::string match = "n/a";
      if (expected == Verdict::member || expected == Verdict::non_member) {
        match = expected == computed ? "yes" : "no";
        mismatches += expected != computed;
      }
      csv += it.label + "," + preset.name() + "," + to_string(expected) + "," + to_string(computed) + "," + match + "\n";
      summary += "corpus " + it.label + " " + preset.name() + ": expected " + to_string(expected) + ", computed " +
                 to_string(computed) + (match == "no" ? "  MISMATCH" : "") + "\n";
    }
  }
  out.files["corpus.csv"] = csv;
  out.files["corpus_manifest.json"] = corpus_manifest_json(entries) + "\n";
  if (mismatches) out.status = 3;
  return summary + std::to_string(mismatches) + " mismatch(es)\n";
}

std::string run_hypcheck(const JobConfig& cfg, JobOutput& out) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> ux(-3, 3), ly(-6, 2), u01(0, 1);
  const long n = cfg.hypcheck_samples;
  struct Check {
    std::string name;
    long violations = 0;
    double max_error = 0.0;
    double tolerance;
  };
  Check agree{"rho_forms_agree", 0, 0, 1e-10}, tri{"triangle_inequality", 0, 0, 1e-12},
      vert{"vertical_pairs", 0, 0, 1e-12}, inner{"inner_box_in_ball", 0, 0, 0}, outer{"ball_in_outer_box", 0, 0, 0};
  auto draw = [&] { return hpoint(ux(rng), ux(rng), std::exp(ly(rng))); };
  for (long i = 0; i < n; ++i) {
    const auto a = draw(), b = draw(), c = draw();
    const double ab = rho(a, b);
    const double rel = std::abs(ab - rho_log(a, b)) / std::max(ab, 1e-300);
    agree.max_error = std::max(agree.max_error, rel);
    agree.violations += rel > agree.tolerance;
    const double excess = rho(a, c) - ab - rho(b, c);
    tri.max_error = std::max(tri.max_error, excess);
    tri.violations += excess > tri.tolerance;
    const double y = std::exp(ly(rng)), k = std::exp(ly(rng));
    const double err = std::abs(rho(hpoint(a.x[0], a.x[1], y), hpoint(a.x[0], a.x[1], k * y)) - std::abs(std::log(k)));
    vert.max_error = std::max(vert.max_error, err);
    vert.violations += err > vert.tolerance;
  }
  const long boxes = std::max(1L, n / 100);
  for (long i = 0; i < boxes; ++i) {
    const auto z = hpoint(ux(rng), std::exp(ly(rng)));
    const double t = 0.25 * (1 - u01(rng));
    const auto bb = ball_box_bounds(z, t);
    for (int k = 0; k < 100; ++k) {
      const auto p = hpoint(z.x[0] + (2 * u01(rng) - 1) * bb.inner.radius,
                            bb.inner.y_lo + u01(rng) * (bb.inner.y_hi - bb.inner.y_lo));
      inner.violations += !(rho(z, p) < t);
      const auto q = hpoint(z.x[0] + (2 * u01(rng) - 1) * bb.outer.radius * 1.5,
                            bb.outer.y_lo * 0.5 + u01(rng) * (bb.outer.y_hi * 1.5 - bb.outer.y_lo * 0.5));
      outer.violations += rho(z, q) < t && !bb.outer.contains(q);
    }
  }
  std::string csv = csv_start(cfg, "check,samples,violations,max_error,tolerance,pass\n");
  std::string summary;
  bool ok = true;
  for (const auto* c : {&agree, &tri, &vert, &inner, &outer}) {
    const long samples = (c == &inner || c == &outer) ? boxes * 100 : n;
    csv += c->name + "," + std::to_string(samples) + "," + std::to_string(c->violations) + "," + num(c->max_error) +
           "," + num(c->tolerance) + "," + (c->violations ? "0" : "1") + "\n";
    summary += "hypcheck " + c->name + ": " + (c->violations ? "FAIL" : "pass") + "\n";
    ok = ok && !c->violations;
  }
  out.files["hypcheck.csv"] = csv;
  if (!ok) out.status = 4;
  return summary;
}

std::string run_whitney(const JobConfig& cfg, const std::vector<Item>& items, JobOutput& out) {
  const int max_level = cfg.whitney_max_level >= 0 ? cfg.whitney_max_level : std::max(0, std::min(cfg.grid.J - 3, 6));
  const auto sys = cfg.system();
  std::string summary;
  for (const auto& it : items) {
    const auto c = analyze(it.f, sys);
    std::vector<DyadicCube> cubes;
    for (int j = 0; j <= max_level; ++j)
      for (const auto& q : cubes_at_level(cfg.grid, j)) cubes.push_back(q);
    std::vector<InequalityProbe> gap(cubes.size()), tent(cubes.size());
    parallel_for(cubes.size(), [&](std::size_t i) {
      gap[i] = whitney_gap(it.f, cubes[i], cfg.diff, cfg.whitney_A0, cfg.whitney_A);
      tent[i] = tent_coeff_bound(c, it.f, cubes[i], cfg.diff, cfg.whitney_A0);
    });
    std::string csv = csv_start(cfg, "level,k0,k1,gap_lhs,gap_rhs,gap_ratio,tent_lhs,tent_rhs,tent_ratio\n");
    double worst_gap = 0.0, worst_tent = 0.0;
    for (std::size_t i = 0; i < cubes.size(); ++i) {
      csv += std::to_string(cubes[i].level) + "," + std::to_string(cubes[i].index[0]) + "," +
             std::to_string(cubes[i].index[1]) + "," + num(gap[i].lhs) + "," + num(gap[i].rhs) + "," +
             num(gap[i].ratio()) + "," + num(tent[i].lhs) + "," + num(tent[i].rhs) + "," + num(tent[i].ratio()) + "\n";
      worst_gap = std::max(worst_gap, gap[i].ratio());
      worst_tent = std::max(worst_tent, tent[i].ratio());
    }
    out.files["whitney_" + it.label + ".csv"] = csv;
    summary += "whitney " + it.label + ": max gap ratio " + num(worst_gap) + ", max tent ratio " + num(worst_tent) + "\n";
  }
  return summary;
}

std::string run_inclusion(const JobConfig& cfg, const std::vector<Item>& items, JobOutput& out) {
  const auto sys = cfg.system();
  std::string summary;
  for (const auto& it : items) {
    const auto c = it.coeffs && it.coeffs->system == sys ? *it.coeffs : analyze(it.f, sys);
    const auto res = inclusion_experiment(it.f, c, cfg.diff, cfg.inclusion_eps, cfg.inclusion);
    std::string csv =
        csv_start(cfg, "epsilon,c,m,R,marked_a,missed_a,fraction_a,marked_b,missed_b,fraction_b,holds\n");
    for (const auto& r : res.rows)
      csv += num(cfg.inclusion_eps) + "," + num(r.c) + "," + std::to_string(r.m) + "," + num(r.R) + "," +
             std::to_string(r.marked_a) + "," + std::to_string(r.missed_a) + "," + num(r.fraction_a()) + "," +
             std::to_string(r.marked_b) + "," + std::to_string(r.missed_b) + "," + num(r.fraction_b()) + "," +
             (r.holds() ? "1" : "0") + "\n";
    out.files["inclusion_" + it.label + ".csv"] = csv;
    if (res.first_holding)
      summary += "inclusion " + it.label + ": holds at c=" + num(res.first_holding->c) +
                 " m=" + std::to_string(res.first_holding->m) + " R=" + num(res.first_holding->R) + "\n";
    else
      summary += "inclusion " + it.label + ": no grid point without violations\n";
  }
  return summary;
}

}  // namespace

JobOutput run_job(const std::string& subcommand, const JobConfig& cfg) {
  set_thread_count(cfg.threads);
  JobOutput out;
  if (subcommand == "hypcheck") {
    out.summary = run_hypcheck(cfg, out);
    return out;
  }
  const auto items = build_items(cfg);
  if (subcommand == "analyze") out.summary = run_analyze(cfg, items, out);
  else if (subcommand == "lipnorm") out.summary = run_lipnorm(cfg, items, out);
  else if (subcommand == "badset") out.summary = run_badset(cfg, items, out);
  else if (subcommand == "deviation") out.summary = run_deviation(cfg, items, out);
  else if (subcommand == "distance") out.summary = run_distance(cfg, items, out);
  else if (subcommand == "corpus") out.summary = run_corpus(cfg, items, out);
  else if (subcommand == "whitney") out.summary = run_whitney(cfg, items, out);
  else if (subcommand == "inclusion") out.summary = run_inclusion(cfg, items, out);
  else throw ConfigError("unknown subcommand '" + subcommand + "'");
  return out;
}

void write_outputs(const JobOutput& out, const std::string& dir) {
  std::vector<fs::path> written;
  try {
    fs::create_directories(dir);
    for (const auto& [name, content] : out.files) {
      const fs::path p = fs::path(dir) / name;
      written.push_back(p);
      std::ofstream f(p, std::ios::binary);
      f << content;
      f.close();
      if (!f) throw NumericError("cannot write " + p.string());
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    throw;
  }
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const WrongFunctionalError*>(&e)) return 2;
  return 4;
}

}  // namespace lipdev::job
