#include "lipdev/corpus.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

namespace lipdev {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::member: return "member";
    case Verdict::non_member: return "non-member";
    case Verdict::boundary: return "boundary";
    case Verdict::unspecified: return "unspecified";
  }
  return "?";
}

Verdict verdict_from_string(const std::string& name) {
  for (auto v : {Verdict::member, Verdict::non_member, Verdict::boundary, Verdict::unspecified})
    if (to_string(v) == name) return v;
  throw ConfigError("unknown verdict '" + name + "'");
}

Verdict CorpusEntry::expected_for(const std::string& preset_family) const {
  if (auto it = expected.find(preset_family); it != expected.end()) return it->second;
  if (auto it = expected.find("*"); it != expected.end()) return it->second;
  return Verdict::unspecified;
}

std::vector<std::string> corpus_names() { return {"f_flat", "f_log", "gaussian", "weierstrass", "poly", "const"}; }

double unit_window(double t) {
  auto psi = [](double u) { return u > 0 ? std::exp(-1.0 / u) : 0.0; };
  // Smooth step from 0 at a to 1 at b.
  auto step = [&](double u, double a, double b) {
    const double x = (u - a) / (b - a);
    return psi(x) / (psi(x) + psi(1 - x));
  };
  if (t <= 0.0 || t >= 1.0) return 0.0;
  if (t < 0.25) return step(t, 0.0, 0.25);
  if (t > 0.75) return step(1.0 - t, 0.0, 0.25);
  return 1.0;
}

namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void check_keys(const std::string& name, const std::map<std::string, double>& p,
                const std::vector<std::string>& allowed) {
  for (const auto& [k, _] : p) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || a == k;
    if (!ok) throw ConfigError("corpus entry " + name + ": unknown parameter '" + k + "'");
  }
}

// Synthesised f = sum over cubes in [0,1]^n, levels 0..J-1, every gender, of
// weight(j) 2^{-j(s + n/2)} psi.
CorpusEntry wavelet_entry(const std::string& name, std::map<std::string, double> params, const GridSpec& spec,
                          const WaveletSystem& sys, double s, double a) {
  auto c = WaveletCoefficients::zeros(spec, sys);
  for (int j = 0; j < spec.J; ++j) {
    const double w = (a > 0.0 && j > 0 ? std::pow(j, -a) : 1.0) / coeff_weight(j, s, spec.n);
    for (const auto& cube : cubes_at_level(spec, j)) {
      if (cube.upper(0) > 1.0 || (spec.n == 2 && cube.upper(1) > 1.0)) continue;
      for (int g = 1; g <= WaveletSystem::genders(spec.n); ++g) c.detail(g, j, cube.index) = w;
    }
  }
  CorpusEntry e{name, std::move(params), synthesize(c), c, {}, {}};
  return e;
}

}  // namespace

CorpusEntry make_entry(const std::string& name, const std::map<std::string, double>& params, const GridSpec& spec,
                       const WaveletSystem& sys) {
  spec.validate();
  const bool periodic = spec.ext == Extension::periodic;

  if (name == "f_flat") {
    check_keys(name, params, {"s"});
    const double s = param(params, "s", 0.5);
    require(s > 0.0, "f_flat: s must be positive");
    auto e = wavelet_entry(name, {{"s", s}}, spec, sys, s, 0.0);
    e.expected = {{"*", Verdict::non_member}};
    e.basis = "flat coefficient construction: every level carries a cube at normalised size 1";
    return e;
  }
  if (name == "f_log") {
    check_keys(name, params, {"s", "a"});
    const double s = param(params, "s", 0.5), a = param(params, "a", 0.5);
    require(s > 0.0 && a > 0.0, "f_log: s and a must be positive");
    auto e = wavelet_entry(name, {{"s", s}, {"a", a}}, spec, sys, s, a);
    e.expected = {{"*", Verdict::boundary}};
    e.basis = "j^{-a} weighted construction: in the closure, but only levels j < eps^{-1/a} are active, "
              "so small eps are not resolved at finite J";
    return e;
  }
  if (name == "gaussian") {
    check_keys(name, params, {"center", "width"});
    const double c = param(params, "center", 0.5), w = param(params, "width", 0.125);
    require(w > 0.0, "gaussian: width must be positive");
    const double box = spec.box_side();
    auto g = [&](double t) {
      if (!periodic) return std::exp(-(t - c) * (t - c) / (w * w));
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) acc += std::exp(-(t - c + k * box) * (t - c + k * box) / (w * w));
      return acc;
    };
    CorpusEntry e{name, {{"center", c}, {"width", w}},
                  sample([&](const Point& x) { return spec.n == 1 ? g(x[0]) : g(x[0]) * g(x[1]); }, spec),
                  std::nullopt, {{"*", Verdict::member}}, "smooth function"};
    return e;
  }
  if (name == "weierstrass") {
    check_keys(name, params, {"s", "base", "terms"});
    const double s = param(params, "s", 0.5), base = param(params, "base", 2.0);
    const int terms = static_cast<int>(param(params, "terms", spec.J));
    require(s > 0.0 && base > 1.0 && terms >= 1, "weierstrass: need s > 0, base > 1, terms >= 1");
    auto w = [&](double t) {
      double acc = 0.0;
      for (int j = 0; j < terms; ++j) acc += std::pow(base, -j * s) * std::cos(2 * std::numbers::pi * std::pow(base, j) * t);
      return acc;
    };
    CorpusEntry e{name, {{"s", s}, {"base", base}, {"terms", terms}},
                  sample([&](const Point& x) { return spec.n == 1 ? w(x[0]) : w(x[0] + x[1]); }, spec),
                  std::nullopt, {{"*", Verdict::non_member}},
                  "lacunary series at exactly s: positive deviation expected (no closed-form verdict)"};
    return e;
  }
  if (name == "poly") {
    std::vector<double> coeffs;
    for (int k = 0;; ++k) {
      auto it = params.find("c" + std::to_string(k));
      if (it == params.end()) break;
      coeffs.push_back(it->second);
    }
    if (coeffs.size() != params.size()) throw ConfigError("poly: parameters must be c0, c1, ... without gaps");
    if (coeffs.empty()) coeffs = {1.0};
    auto P = [&](double t) {
      double acc = 0.0;
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
      return acc;
    };
    std::map<std::string, double> used;
    for (std::size_t k = 0; k < coeffs.size(); ++k) used["c" + std::to_string(k)] = coeffs[k];
    CorpusEntry e{name, used,
                  sample([&](const Point& x) {
                    return spec.n == 1 ? P(x[0]) * unit_window(x[0])
                                       : P(x[0] + x[1]) * unit_window(x[0]) * unit_window(x[1]);
                  }, spec),
                  std::nullopt, {{"*", Verdict::member}}, "polynomial times a smooth window"};
    return e;
  }
  if (name == "const") {
    check_keys(name, params, {"c"});
    const double c = param(params, "c", 0.0);
    // A nonzero constant jumps at the box edge under zero extension.
    const Verdict v = (c == 0.0 || periodic) ? Verdict::member : Verdict::unspecified;
    CorpusEntry e{name, {{"c", c}}, sample([c](const Point&) { return c; }, spec), std::nullopt,
                  {{"*", v}}, "constant"};
    return e;
  }
  throw ConfigError("unknown corpus entry '" + name + "'");
}

std::string corpus_manifest_json(const std::vector<CorpusEntry>& entries) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json exp = nlohmann::json::object();
    for (const auto& [k, v] : e.expected) exp[k] = to_string(v);
    arr.push_back({{"name", e.name},
                   {"params", e.params},
                   {"wavelet_defined", e.coeffs.has_value()},
                   {"expected", exp},
                   {"basis", e.basis}});
  }
  return nlohmann::json{{"entries", arr}}.dump(2);
}

}  // namespace lipdev
