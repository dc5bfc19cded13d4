#include "microlocal/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "microlocal/dyadic.hpp"
#include "microlocal/errors.hpp"
#include "microlocal/lpdecomp.hpp"
#include "microlocal/synthesis.hpp"

namespace microlocal {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> grid(int depth) {
  require(depth >= 1 && depth <= 20, "corpus depth out of range");
  const std::size_t n = std::size_t{1} << depth;
  std::vector<double> x(n);
  for (std::size_t m = 0; m < n; ++m) x[m] = static_cast<double>(m) / static_cast<double>(n);
  return x;
}

double window(double d) { return bump_profile(d / 0.15); }

double distance(double x, double x0) {
  const Point a{x, 0.0};
  const Point b{x0, 0.0};
  return torus_distance(a, b, 1);
}

}  // namespace

GaussianStream::GaussianStream(std::uint64_t seed) : rng_(seed) {}

double GaussianStream::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  has_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

SampledSignal cusp(int depth, double alpha, double x0) {
  require(alpha > 0.0, "cusp exponent must be positive");
  const auto x = grid(depth);
  std::vector<double> v(x.size());
  for (std::size_t m = 0; m < x.size(); ++m) {
    const double d = distance(x[m], x0);
    v[m] = std::pow(d, alpha) * window(d);
  }
  return SampledSignal::from_real(1, depth, v);
}

SampledSignal chirp(int depth, double alpha, double beta, double x0) {
  require(alpha > 0.0 && beta > 0.0, "chirp exponents must be positive");
  const auto x = grid(depth);
  std::vector<double> v(x.size());
  for (std::size_t m = 0; m < x.size(); ++m) {
    const double d = distance(x[m], x0);
    v[m] = d == 0.0 ? 0.0 : std::pow(d, alpha) * std::sin(std::pow(d, -beta)) * window(d);
  }
  return SampledSignal::from_real(1, depth, v);
}

SampledSignal weierstrass(int depth, double hurst, int terms) {
  require(terms >= 1, "need at least one term");
  const auto x = grid(depth);
  std::vector<double> v(x.size(), 0.0);
  for (int k = 0; k < terms; ++k) {
    const double a = std::exp2(-k * hurst);
    const double f = std::exp2(k);
    for (std::size_t m = 0; m < x.size(); ++m) v[m] += a * std::cos(kTwoPi * f * x[m]);
  }
  return SampledSignal::from_real(1, depth, v);
}

SampledSignal random_wavelet_series(int depth, std::uint64_t seed, double hurst, int max_level) {
  require(max_level >= 1, "need at least one wavelet level");
  const WaveletSystem w = build_wavelet_system(4);
  GaussianStream g(seed);
  // Synthesized once on a fine grid by the cascade and subsampled, so every depth samples the same
  // function.
  const int fine = std::max(depth, 16);
  WaveletCoefficients coefs{Complex{}, CoefField(1, fine)};
  for (int j = 0; j < max_level; ++j) {
    CoefField l2(1, depth);
    const std::size_t count = std::size_t{1} << j;
    std::vector<double> draws(count);
    for (auto& d : draws) d = std::exp2(-j * (hurst + 0.5)) * g.next();
    if (j >= fine) continue;
    auto& level = coefs.c.level(j);
    // c(Q) = l(Q)^{-1/2} times the L2-normalized coefficient.
    for (std::size_t k = 0; k < count; ++k) level[k] = std::exp2(0.5 * j) * draws[k];
  }
  const auto dense = wavelet_synthesis(coefs, w, WaveletInit::Samples);
  const std::size_t stride = std::size_t{1} << (fine - depth);
  std::vector<double> v(std::size_t{1} << depth);
  for (std::size_t m = 0; m < v.size(); ++m) v[m] = dense[m * stride].real();
  return SampledSignal::from_real(1, depth, v);
}

SampledSignal band_limited_noise(int depth, std::uint64_t seed, int max_freq, double decay) {
  require(max_freq >= 1, "max_freq must be >= 1");
  const std::size_t n = std::size_t{1} << depth;
  GaussianStream g(seed);
  std::vector<Complex> spec(n);
  for (int xi = 1; xi <= max_freq; ++xi) {
    const double amp = std::pow(1.0 + xi, -decay);
    const Complex c(amp * g.next(), amp * g.next());
    if (static_cast<std::size_t>(xi) >= n / 2) continue;
    spec[static_cast<std::size_t>(xi)] = c;
    spec[n - static_cast<std::size_t>(xi)] = std::conj(c);
  }
  auto v = inverse_fft(spec, 1, depth);
  for (auto& z : v) z = Complex(z.real(), 0.0);
  return SampledSignal(1, depth, std::move(v));
}

std::vector<CorpusEntry> standard_corpus(int depth, int random_count, std::uint64_t seed) {
  require(random_count >= 0, "random_count must be nonnegative");
  std::vector<CorpusEntry> out;
  out.push_back({"cusp", cusp(depth)});
  out.push_back({"chirp", chirp(depth)});
  out.push_back({"weierstrass", weierstrass(depth)});
  out.push_back({"wavelet_series", random_wavelet_series(depth, seed)});
  out.push_back({"bl_noise", band_limited_noise(depth, seed + 1, 60, 0.5)});
  for (int r = 0; r < random_count; ++r) {
    char name[32];
    std::snprintf(name, sizeof name, "random_%02d", r);
    out.push_back({name, band_limited_noise(depth, seed + 100 + static_cast<std::uint64_t>(r), 24, 1.0)});
  }
  return out;
}

}  // namespace microlocal
