#include "lipdev/region_mask.hpp"

#include <algorithm>

#include <json.hpp>

namespace lipdev {

RegionMask RegionMask::empty(const GridSpec& spec, int level_count, int subbands) {
  spec.validate();
  require(subbands >= 1, "region mask: sub-band count must be >= 1");
  require(level_count >= 0, "region mask: negative level count");
  RegionMask m{spec, subbands, {}};
  m.levels.assign(static_cast<std::size_t>(level_count),
                  std::vector<std::uint8_t>(static_cast<std::size_t>(subbands) * spec.sample_count(), 0));
  return m;
}

bool RegionMask::level_empty(int j) const {
  const auto& lv = levels[static_cast<std::size_t>(j)];
  return std::none_of(lv.begin(), lv.end(), [](std::uint8_t v) { return v != 0; });
}

bool RegionMask::is_empty() const {
  for (int j = 0; j < level_count(); ++j)
    if (!level_empty(j)) return false;
  return true;
}

std::size_t RegionMask::count(int j) const {
  const auto& lv = levels[static_cast<std::size_t>(j)];
  return static_cast<std::size_t>(std::count_if(lv.begin(), lv.end(), [](std::uint8_t v) { return v != 0; }));
}

std::size_t RegionMask::count() const {
  std::size_t c = 0;
  for (int j = 0; j < level_count(); ++j) c += count(j);
  return c;
}

void RegionMask::add_column(const DyadicCube& cube, int lo, int hi) {
  const auto range = cube_sample_range(spec, cube);
  const long a = spec.axis_samples();
  for (int j = std::max(lo, 0); j <= std::min(hi, level_count() - 1); ++j) {
    for (long i1 = range[0][1]; i1 < range[1][1]; ++i1)
      for (long i0 = range[0][0]; i0 < range[1][0]; ++i0) {
        const std::size_t p = flat_index({i0, i1}, a, spec.n);
        for (int b = 0; b < subbands; ++b) set(j, b, p);
      }
  }
}

void RegionMask::add_tent(const DyadicCube& cube) { add_column(cube, cube.level, cube.level); }

RegionMask& RegionMask::operator|=(const RegionMask& other) {
  require(other.spec == spec && other.subbands == subbands, "region mask: shape mismatch in union");
  if (other.level_count() > level_count())
    levels.resize(other.levels.size(), std::vector<std::uint8_t>(levels.empty() ? 0 : levels[0].size(), 0));
  for (int j = 0; j < other.level_count(); ++j) {
    auto& dst = levels[static_cast<std::size_t>(j)];
    const auto& src = other.levels[static_cast<std::size_t>(j)];
    if (dst.size() != src.size()) dst.resize(src.size(), 0);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] |= src[i];
  }
  return *this;
}

bool RegionMask::subset_of(const RegionMask& other) const {
  for (int j = 0; j < level_count(); ++j) {
    const auto& lv = levels[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < lv.size(); ++i) {
      if (!lv[i]) continue;
      if (j >= other.level_count() || !other.levels[static_cast<std::size_t>(j)][i]) return false;
    }
  }
  return true;
}

RegionMask RegionMask::truncated(int count) const {
  RegionMask out = *this;
  out.levels.resize(static_cast<std::size_t>(std::clamp(count, 0, level_count())));
  return out;
}

RegionMask RegionMask::restricted(int lo, int hi) const {
  RegionMask out = *this;
  for (int j = 0; j < level_count(); ++j)
    if (j < lo || j > hi) std::fill(out.levels[static_cast<std::size_t>(j)].begin(),
                                    out.levels[static_cast<std::size_t>(j)].end(), 0);
  return out;
}

RegionMask tents_of(const CubeFamily& family, int subbands) {
  RegionMask m = RegionMask::empty(family.spec, family.level_count(), subbands);
  for (int j = 0; j < family.level_count(); ++j)
    for (const auto& cube : family.cubes(j)) m.add_tent(cube);
  return m;
}

std::string to_json(const RegionMask& mask) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& lv : mask.levels) {
    nlohmann::json runs = nlohmann::json::array();
    std::uint8_t cur = 0;
    std::size_t len = 0;
    for (std::uint8_t v : lv) {
      if ((v != 0) == (cur != 0)) {
        ++len;
        continue;
      }
      runs.push_back(len);
      cur = v != 0;
      len = 1;
    }
    runs.push_back(len);
    levels.push_back(std::move(runs));
  }
  nlohmann::json j{{"J", mask.spec.J},         {"M", mask.subbands},
                   {"n", mask.spec.n},         {"K", mask.spec.K},
                   {"ext", to_string(mask.spec.ext)}, {"levels", std::move(levels)}};
  return j.dump();
}

RegionMask region_mask_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    GridSpec spec{j.at("n").get<int>(), j.at("J").get<int>(), j.at("K").get<int>(),
                  extension_from_string(j.at("ext").get<std::string>())};
    const auto& levels = j.at("levels");
    RegionMask m = RegionMask::empty(spec, static_cast<int>(levels.size()), j.at("M").get<int>());
    for (std::size_t l = 0; l < levels.size(); ++l) {
      auto& lv = m.levels[l];
      std::size_t pos = 0;
      std::uint8_t cur = 0;
      for (const auto& run : levels[l]) {
        const auto len = run.get<std::size_t>();
        if (pos + len > lv.size()) throw ConfigError("region mask: run lengths exceed level size");
        std::fill_n(lv.begin() + static_cast<std::ptrdiff_t>(pos), len, cur);
        pos += len;
        cur ^= 1;
      }
      if (pos != lv.size()) throw ConfigError("region mask: run lengths do not cover level " + std::to_string(l));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("region mask: malformed JSON: ") + e.what());
  }
}

}  // namespace lipdev
