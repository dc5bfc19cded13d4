#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "microlocal/signal.hpp"

namespace microlocal {

// Fixture signals on the 1-D torus. Each is a fixed continuous function sampled at depth D, so
// the same fixture can be compared across depths. Random fixtures depend only on the seed.

// |x - x0|^alpha times a smooth window that is 1 within 0.15 of x0 and 0 beyond 0.3.
SampledSignal cusp(int depth, double alpha = 0.5, double x0 = 0.5);
// |x - x0|^alpha sin(|x - x0|^-beta), same window.
SampledSignal chirp(int depth, double alpha = 1.0, double beta = 0.5, double x0 = 0.5);
// sum_{k < terms} 2^{-k H} cos(2 pi 2^k x)
SampledSignal weierstrass(int depth, double hurst = 0.5, int terms = 7);
// db4 wavelet series with L2-normalized detail coefficients 2^{-j (H + 1/2)} g, levels 0..max_level-1.
SampledSignal random_wavelet_series(int depth, std::uint64_t seed, double hurst = 0.5, int max_level = 6);
// Gaussian Fourier coefficients with amplitude (1 + |xi|)^-1 for 1 <= |xi| <= max_freq.
SampledSignal band_limited_noise(int depth, std::uint64_t seed, int max_freq = 60, double decay = 1.0);

struct CorpusEntry {
  std::string name;
  SampledSignal signal;
};

// cusp, chirp, weierstrass, wavelet_series, bl_noise, then random_00..random_{n-1}.
std::vector<CorpusEntry> standard_corpus(int depth, int random_count = 20, std::uint64_t seed = 20240601);

// Portable standard normal draws from mt19937_64 (Box-Muller on 53-bit uniforms).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed);
  double next();
  double uniform();  // [0, 1)

 private:
  std::mt19937_64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace microlocal
