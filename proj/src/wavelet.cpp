#include "lipdev/wavelet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "lipdev/parallel.hpp"

namespace lipdev {

namespace {

// Extremal-phase Daubechies scaling filters, sum = sqrt(2).
const std::vector<std::vector<double>> kDaubechiesFilters = {
// Db1
    {0.707106781186547524401, 0.707106781186547524401},
    // Db2
    {0.482962913144534143375, 0.836516303737807905575, 0.224143868042013381026, -0.129409522551260381174},
    // Db3
    {0.332670552950082615999, 0.806891509311092576494, 0.459877502118491570095, -0.135011020010254588696, -0.0854412738820266616928, 0.0352262918857095366027},
    // Db4
    {0.230377813308896500863, 0.71484657055291564709, 0.630880767929858907882, -0.0279837694168598542114, -0.18703481171909308408, 0.0308413818355607636272, 0.0328830116668851997354, -0.0105974017850690321049},
    // Db5
    {0.160102397974192914481, 0.60382926979718967054, 0.724308528437772927728, 0.138428145901320731505, -0.242294887066382031863, -0.0322448695846383746485, 0.0775714938400457135231, -0.00624149021279827427419, -0.0125807519990819994685, 0.003335725285473771278},
    // Db6
    {0.111540743350109463621, 0.494623890398453085677, 0.751133908021095350679, 0.315250351709197629086, -0.226264693965439820076, -0.129766867567261935562, 0.0975016055873230491023, 0.0275228655303057286255, -0.0315820393174860295651, 0.000553842201161496139252, 0.00477725751094551063964, -0.00107730108530847956485},
    // Db7
    {0.07785205408500917902, 0.396539319481917306539, 0.729132090846235119917, 0.469782287405193122472, -0.143906003928564975405, -0.224036184993874982638, 0.0713092192668302647509, 0.0806126091510830719129, -0.0380299369350144135796, -0.0165745416306668806541, 0.012550998556099840613, 0.000429577972921366521132, -0.00180164070404749091527, 0.000353713799974520248446},
    // Db8
    {0.054415842243104009955, 0.312871590914299970659, 0.675630736297289806808, 0.585354683654206712771, -0.0158291052563493056674, -0.284015542961546926516, 0.000472484573913282770361, 0.128747426620478458857, -0.0173693010018075461696, -0.0440882539307947515068, 0.0139810279173982816487, 0.00874609404740577671638, -0.00487035299345157431042, -0.000391740373376947046298, 0.00067544940645056936637, -0.000117476784124769533731},
    // Db9
    {0.0380779473638783465887, 0.243834674612590353732, 0.604823123690111111903, 0.657288078051300538078, 0.133197385825007576191, -0.293273783279174908806, -0.0968407832229764605135, 0.148540749338106380135, 0.0307256814793333792123, -0.0676328290613299736756, 0.000250947114831451957587, 0.0223616621236790972054, -0.00472320475775139727793, -0.0042815036824634298345, 0.00184764688305622647662, 0.000230385763523195967205, -0.000251963188942710136975, 0.0000393473203162715994807},
    // Db10
    {0.0266700579005555535866, 0.188176800077691489021, 0.527201188931725586482, 0.688459039453603565742, 0.281172343660577460749, -0.249846424327315379416, -0.195946274377377043504, 0.127369340335793260083, 0.0930573646035723511604, -0.0713941471663970871453, -0.0294575368218758128583, 0.0332126740593410017398, 0.00360655356695616965542, -0.0107331754833305750443, 0.00139535174705290116579, 0.00199240529518505611716, -0.000685856694959711626561, -0.000116466855129285450951, 0.0000935886703200695913341, -0.0000132642028945212448124},
};

// Hölder exponents of the Db-N scaling function (Db1 is discontinuous).
constexpr std::array<double, 10> kHolder = {0.0,    0.5500, 1.0878, 1.6179, 1.9690,
                                            2.1891, 2.4604, 2.7608, 3.0736, 3.3615};

// One analysis step on a periodic signal of even length.
void forward_step(const double* in, std::size_t len, const std::vector<double>& h,
                  const std::vector<double>& g, double* approx, double* detail) {
  const std::size_t half = len / 2;
  const std::size_t taps = h.size();
  for (std::size_t k = 0; k < half; ++k) {
    double a = 0.0, d = 0.0;
    for (std::size_t m = 0; m < taps; ++m) {
      const double v = in[(2 * k + m) % len];
      a += h[m] * v;
      d += g[m] * v;
    }
    approx[k] = a;
    detail[k] = d;
  }
}

void inverse_step(const double* approx, const double* detail, std::size_t len,
                  const std::vector<double>& h, const std::vector<double>& g, double* out) {
  const std::size_t half = len / 2;
  const std::size_t taps = h.size();
  std::fill(out, out + len, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    const double a = approx[k];
    const double d = detail[k];
    for (std::size_t m = 0; m < taps; ++m) out[(2 * k + m) % len] += h[m] * a + g[m] * d;
  }
}

// Applies `step` to every line of the leading len x len block along `axis`.
template <class Step>
void for_each_line(Eigen::ArrayXd& data, long stride_axis, int n, int axis, std::size_t len,
                   Step&& step) {
  const std::size_t lines = n == 1 ? 1 : len;
  parallel_for(lines, [&](std::size_t line) {
    std::vector<double> buf(len), out(len);
    auto at = [&](std::size_t i) -> double& {
      const long x = axis == 0 ? static_cast<long>(i) : static_cast<long>(line);
      const long y = axis == 0 ? static_cast<long>(line) : static_cast<long>(i);
      return data[static_cast<Eigen::Index>(n == 1 ? x : x + stride_axis * y)];
    };
    for (std::size_t i = 0; i < len; ++i) buf[i] = at(i);
    step(buf.data(), out.data());
    for (std::size_t i = 0; i < len; ++i) at(i) = out[i];
  });
}

void check_fit(const GridSpec& spec, const WaveletSystem& sys) {
  if (sys.taps() > spec.axis_samples()) {
    throw ConfigError("wavelet: Db" + std::to_string(sys.N) + " has " +
                      std::to_string(sys.taps()) + " taps but the axis holds only " +
                      std::to_string(spec.axis_samples()) + " samples");
  }
}

}  // namespace

WaveletSystem WaveletSystem::daubechies(int N) {
  if (N < 1 || N > max_order())
    throw ConfigError("wavelet: Daubechies order must lie in [1, " + std::to_string(max_order()) +
                      "], got " + std::to_string(N));
  return {N, kDaubechiesFilters[static_cast<std::size_t>(N - 1)],
          kHolder[static_cast<std::size_t>(N - 1)]};
}

WaveletSystem WaveletSystem::for_smoothness(double s, int r) {
  const int N = std::max(r, static_cast<int>(std::ceil(s)) + 2);
  return daubechies(std::min(N, max_order()));
}

std::vector<double> WaveletSystem::highpass() const {
  std::vector<double> g(lowpass.size());
  const std::size_t L = lowpass.size();
  for (std::size_t m = 0; m < L; ++m) g[m] = (m % 2 ? -1.0 : 1.0) * lowpass[L - 1 - m];
  return g;
}

WaveletCoefficients WaveletCoefficients::zeros(const GridSpec& spec, const WaveletSystem& sys) {
  spec.validate();
  return {spec, sys, Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(spec.sample_count()))};
}

std::size_t WaveletCoefficients::scaling_slot(const Index2& k) const {
  const long a0 = cubes_per_axis(spec, 0);
  for (int d = 0; d < spec.n; ++d)
    if (k[d] < 0 || k[d] >= a0) throw RangeError("scaling position outside the box");
  return flat_index(k, spec.axis_samples(), spec.n);
}

std::size_t WaveletCoefficients::detail_slot(int gender, int j, const Index2& k) const {
  if (gender < 1 || gender > WaveletSystem::genders(spec.n)) throw RangeError("bad gender");
  if (j < 0 || j >= spec.J) throw RangeError("detail level outside [0, J)");
  const long o = cubes_per_axis(spec, j);
  Index2 pos{0, 0};
  for (int d = 0; d < spec.n; ++d) {
    if (k[d] < 0 || k[d] >= o) throw RangeError("detail position outside the box");
    pos[d] = k[d] + ((gender >> d) & 1 ? o : 0);
  }
  return flat_index(pos, spec.axis_samples(), spec.n);
}

double WaveletCoefficients::cube_max(const DyadicCube& cube, bool with_scaling) const {
  double m = 0.0;
  if (cube.level < spec.J) {
    for (int g = 1; g <= WaveletSystem::genders(spec.n); ++g)
      m = std::max(m, std::abs(detail(g, cube.level, cube.index)));
  }
  if (with_scaling && cube.level == 0) m = std::max(m, std::abs(scaling(cube.index)));
  return m;
}

WaveletCoefficients analyze(const SampledFunction& f, const WaveletSystem& sys) {
  f.spec.validate();
  check_fit(f.spec, sys);
  const GridSpec& spec = f.spec;
  WaveletCoefficients c{spec, sys, f.values * std::exp2(-0.5 * spec.J * spec.n)};
  const auto h = sys.lowpass;
  const auto g = sys.highpass();
  const long stride = spec.axis_samples();
  for (int j = spec.J - 1; j >= 0; --j) {
    const auto len = static_cast<std::size_t>(cubes_per_axis(spec, j + 1));
    const std::size_t half = len / 2;
    auto step = [&](const double* in, double* out) {
      forward_step(in, len, h, g, out, out + half);
    };
    for (int axis = 0; axis < spec.n; ++axis) for_each_line(c.data, stride, spec.n, axis, len, step);
  }
  return c;
}

SampledFunction synthesize(const WaveletCoefficients& c) {
  const GridSpec& spec = c.spec;
  spec.validate();
  check_fit(spec, c.system);
  Eigen::ArrayXd data = c.data;
  const auto h = c.system.lowpass;
  const auto g = c.system.highpass();
  const long stride = spec.axis_samples();
  for (int j = 0; j < spec.J; ++j) {
    const auto len = static_cast<std::size_t>(cubes_per_axis(spec, j + 1));
    const std::size_t half = len / 2;
    auto step = [&](const double* in, double* out) { inverse_step(in, in + half, len, h, g, out); };
    for (int axis = spec.n - 1; axis >= 0; --axis) for_each_line(data, stride, spec.n, axis, len, step);
  }
  return {spec, data * std::exp2(0.5 * spec.J * spec.n)};
}

std::vector<double> level_profile(const WaveletCoefficients& c, double s, bool with_scaling) {
  const GridSpec& spec = c.spec;
  std::vector<double> prof(static_cast<std::size_t>(spec.J), 0.0);
  for (int j = 0; j < spec.J; ++j) {
    const double w = coeff_weight(j, s, spec.n);
    for (const auto& cube : cubes_at_level(spec, j))
      prof[static_cast<std::size_t>(j)] =
          std::max(prof[static_cast<std::size_t>(j)], c.cube_max(cube, with_scaling) * w);
  }
  return prof;
}

double coeff_norm_binf(const WaveletCoefficients& c, double s) {
  const auto prof = level_profile(c, s, true);
  return prof.empty() ? 0.0 : *std::max_element(prof.begin(), prof.end());
}

SuperlevelSets superlevel_sets(const WaveletCoefficients& c, double s, double eps) {
  if (!(eps > 0.0)) throw ConfigError("superlevel_sets: eps must be positive");
  const GridSpec& spec = c.spec;
  SuperlevelSets out{CubeFamily::empty(spec, spec.J), CubeFamily::empty(spec, spec.J),
                     CubeFamily::empty(spec, spec.J)};
  for (int j = 0; j < spec.J; ++j) {
    const double w = coeff_weight(j, s, spec.n);
    for (const auto& cube : cubes_at_level(spec, j)) {
      const double detail = c.cube_max(cube, false) * w;
      const double scal = j == 0 ? std::abs(c.scaling(cube.index)) : 0.0;
      if (detail > eps) out.w.set(cube);
      if (std::max(detail, scal) > eps) out.w0.set(cube);
      if (scal > eps) out.v0.set(cube);
    }
  }
  return out;
}

WaveletCoefficients threshold_approx(const WaveletCoefficients& c, double s, double eps) {
  const auto sets = superlevel_sets(c, s, eps);
  WaveletCoefficients out = WaveletCoefficients::zeros(c.spec, c.system);
  const int genders = WaveletSystem::genders(c.spec.n);
  for (int j = 0; j < c.spec.J; ++j) {
    for (const auto& cube : sets.w0.cubes(j)) {
      for (int g = 1; g <= genders; ++g) out.detail(g, j, cube.index) = c.detail(g, j, cube.index);
      if (j == 0) out.scaling(cube.index) = c.scaling(cube.index);
    }
  }
  return out;
}

long signed_position(long k, int K) {
  if (K == 0) return 0;
  const long half = 1L << (K - 1);
  return k < half ? k : k - (1L << K);
}

TailResult scaling_tail(const WaveletCoefficients& c, long K0) {
  TailResult res;
  if (c.spec.ext == Extension::periodic) {
    res.applicable = false;
    return res;
  }
  bool any = false;
  for (const auto& cube : cubes_at_level(c.spec, 0)) {
    double r2 = 0.0;
    for (int d = 0; d < c.spec.n; ++d) {
      const double kk = static_cast<double>(signed_position(cube.index[d], c.spec.K));
      r2 += kk * kk;
    }
    if (std::sqrt(r2) >= static_cast<double>(K0)) {
      any = true;
      res.value = std::max(res.value, std::abs(c.scaling(cube.index)));
    }
  }
  res.beyond_box = !any;
  return res;
}

}  // namespace lipdev
