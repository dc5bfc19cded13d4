#include "microlocal/lpdecomp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "microlocal/errors.hpp"

namespace microlocal {

namespace {

double glue(double t, double steepness) { return t > 0.0 ? std::exp(-steepness / t) : 0.0; }

// Per-axis bin of grid bin m (points_per_axis n) on a coarser axis of 2^level points.
std::size_t alias_bin(std::size_t m, int dim, int depth, int level) {
  const std::size_t n = std::size_t{1} << depth;
  const std::size_t mask = (std::size_t{1} << level) - 1;
  if (dim == 1) return m & mask;
  return ((m / n) & mask) << level | ((m % n) & mask);
}

}  // namespace

double bump_profile(double r, double steepness) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double a = glue(2.0 - r, steepness);
  const double b = glue(r - 1.0, steepness);
  return a / (a + b);
}

double band_profile(int j, int top, double radius, const ProfileSpec& spec) {
  const double f = spec.base_frequency;
  const auto h = [&](int level) { return bump_profile(radius / (std::ldexp(f, level)), spec.steepness); };
  if (j == 0) return top == 0 ? 1.0 : h(0);
  if (j == top) return 1.0 - h(j - 1);
  return h(j) - h(j - 1);
}

double FilterBank::partition_deviation() const {
  double worst = 0.0;
  const std::size_t bins = profiles_.front().size();
  for (std::size_t m = 0; m < bins; ++m) {
    double sum = 0.0;
    for (const auto& p : profiles_) sum += p[m];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

FilterBank build_filter_bank(int dim, int depth, const ProfileSpec& spec) {
  require(dim >= 1 && dim <= kMaxDim, "filter bank dimension must be 1 or 2");
  require(depth >= 2 && depth <= 30 / dim, "filter bank depth must be at least 2");
  require(spec.base_frequency > 0.0 && spec.steepness > 0.0, "profile parameters must be positive");
  // The top band starts at 2^(D-1) f_base; it must not lie beyond Nyquist.
  require(std::ldexp(spec.base_frequency, depth - 1) <= std::ldexp(1.0, depth - 1),
          "grid too small to represent the top band (base_frequency must be <= 1)");
  FilterBank bank;
  bank.dim_ = dim;
  bank.depth_ = depth;
  bank.spec_ = spec;
  const std::size_t bins = std::size_t{1} << (dim * depth);
  bank.profiles_.assign(static_cast<std::size_t>(depth) + 1, std::vector<double>(bins));
  for (std::size_t m = 0; m < bins; ++m) {
    const double r = radial_frequency(m, dim, depth);
    for (int j = 0; j <= depth; ++j) bank.profiles_[static_cast<std::size_t>(j)][m] = band_profile(j, depth, r, spec);
  }
  return bank;
}

FilterBank build_dual_bank(const FilterBank& bank) {
  constexpr double kFloor = 1e-3;
  FilterBank out = bank;
  const std::size_t bins = bank.profiles_.front().size();
  out.duals_.assign(bank.profiles_.size(), std::vector<double>(bins, 0.0));
  for (std::size_t m = 0; m < bins; ++m) {
    double sq = 0.0;
    for (const auto& p : bank.profiles_) sq += p[m] * p[m];
    if (sq < kFloor) throw InvalidInput("sum of squared profiles drops below the floor; bad profile");
    for (std::size_t j = 0; j < bank.profiles_.size(); ++j) out.duals_[j][m] = bank.profiles_[j][m] / sq;
  }
  return out;
}

SampledSignal BandStack::sum() const {
  require(!pieces.empty(), "empty band stack");
  SampledSignal s = pieces.front();
  for (std::size_t j = 1; j < pieces.size(); ++j) s += pieces[j];
  return s;
}

BandStack lp_pieces(const SampledSignal& f, const FilterBank& bank) {
  require(f.dim() == bank.dim() && f.depth() == bank.depth(), "signal and filter bank shapes differ");
  const auto spectrum = forward_fft(f.values(), f.dim(), f.depth());
  BandStack out;
  out.pieces.reserve(static_cast<std::size_t>(bank.depth()) + 1);
  std::vector<Complex> band(spectrum.size());
  for (int j = 0; j <= bank.depth(); ++j) {
    const auto& phi = bank.profile(j);
    for (std::size_t m = 0; m < band.size(); ++m) band[m] = spectrum[m] * phi[m];
    out.pieces.emplace_back(f.dim(), f.depth(), inverse_fft(band, f.dim(), f.depth()));
  }
  return out;
}

CoefField phi_analysis(const SampledSignal& f, const FilterBank& bank) {
  const BandStack stack = lp_pieces(f, bank);
  const int dim = f.dim();
  const int depth = f.depth();
  const std::size_t n = std::size_t{1} << depth;
  CoefField c(dim, depth);
  for (int j = 0; j <= depth; ++j) {
    auto& level = c.level(j);
    const auto& piece = stack.pieces[static_cast<std::size_t>(j)];
    const int stride = depth - j;
    const std::size_t per_axis = std::size_t{1} << j;
    for (std::size_t idx = 0; idx < level.size(); ++idx) {
      std::size_t m = 0;
      if (dim == 1) {
        m = idx << stride;
      } else {
        m = ((idx / per_axis) << stride) * n + ((idx % per_axis) << stride);
      }
      level[idx] = piece[m];
    }
  }
  return c;
}

SampledSignal phi_synthesis(const CoefField& c, const FilterBank& bank) {
  require(bank.has_dual(), "phi_synthesis needs a dual bank");
  require(c.dim() == bank.dim() && c.depth() == bank.depth(), "coefficient field and filter bank shapes differ");
  const int dim = c.dim();
  const int depth = c.depth();
  const std::size_t bins = std::size_t{1} << (dim * depth);
  std::vector<Complex> spectrum(bins);
  for (int j = 0; j <= depth; ++j) {
    const auto coarse = forward_fft(c.level(j), dim, j);
    const auto& psi = bank.dual(j);
    for (std::size_t m = 0; m < bins; ++m) {
      if (psi[m] == 0.0) continue;
      spectrum[m] += psi[m] * coarse[alias_bin(m, dim, depth, j)];
    }
  }
  return SampledSignal(dim, depth, inverse_fft(spectrum, dim, depth));
}

SampledSignal restrict_signal(const SampledSignal& f, int depth) {
  require(depth >= 1 && depth <= f.depth(), "restriction depth must lie in [1, current depth]");
  const int dim = f.dim();
  const auto spectrum = forward_fft(f.values(), dim, f.depth());
  const std::size_t n_fine = std::size_t{1} << f.depth();
  const std::size_t n_coarse = std::size_t{1} << depth;
  const long long half = static_cast<long long>(n_coarse / 2);
  std::vector<Complex> coarse(std::size_t{1} << (dim * depth));
  const auto to_coarse = [&](long long xi) { return static_cast<std::size_t>((xi + static_cast<long long>(n_coarse)) % static_cast<long long>(n_coarse)); };
  for (std::size_t m = 0; m < spectrum.size(); ++m) {
    if (dim == 1) {
      const long long xi = bin_frequency(m, n_fine);
      if (std::llabs(xi) >= half) continue;
      coarse[to_coarse(xi)] = spectrum[m];
    } else {
      const long long x0 = bin_frequency(m / n_fine, n_fine);
      const long long x1 = bin_frequency(m % n_fine, n_fine);
      if (std::llabs(x0) >= half || std::llabs(x1) >= half) continue;
      coarse[to_coarse(x0) * n_coarse + to_coarse(x1)] = spectrum[m];
    }
  }
  return SampledSignal(dim, depth, inverse_fft(coarse, dim, depth));
}

SampledSignal prolong_signal(const SampledSignal& f, int depth) {
  require(depth >= f.depth() && depth <= 30 / f.dim(), "prolongation depth must not be below the current depth");
  const int dim = f.dim();
  const auto spectrum = forward_fft(f.values(), dim, f.depth());
  const std::size_t n_coarse = std::size_t{1} << f.depth();
  const std::size_t n_fine = std::size_t{1} << depth;
  const auto to_fine = [&](long long xi) { return static_cast<std::size_t>((xi + static_cast<long long>(n_fine)) % static_cast<long long>(n_fine)); };
  std::vector<Complex> fine(std::size_t{1} << (dim * depth));
  for (std::size_t m = 0; m < spectrum.size(); ++m) {
    if (dim == 1) {
      fine[to_fine(bin_frequency(m, n_coarse))] = spectrum[m];
    } else {
      fine[to_fine(bin_frequency(m / n_coarse, n_coarse)) * n_fine + to_fine(bin_frequency(m % n_coarse, n_coarse))] =
          spectrum[m];
    }
  }
  return SampledSignal(dim, depth, inverse_fft(fine, dim, depth));
}

}  // namespace microlocal
