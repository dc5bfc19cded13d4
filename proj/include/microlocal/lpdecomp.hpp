#pragma once

#include <vector>

#include "microlocal/signal.hpp"

namespace microlocal {

// Radial bump: h(r) = 1 for r <= 1, 0 for r >= 2, with a C-infinity glue in between built from
// g(t) = exp(-steepness / t).
struct ProfileSpec {
  double base_frequency = 0.25;  // cycles per unit length at which h starts to drop
  double steepness = 1.0;
};

double bump_profile(double r, double steepness = 1.0);

// phi_hat_j evaluated at a (continuous) radial frequency. Level `top` absorbs the tail.
double band_profile(int j, int top, double radius, const ProfileSpec& spec);

class FilterBank {
 public:
  FilterBank() = default;

  int dim() const { return dim_; }
  int depth() const { return depth_; }
  const ProfileSpec& spec() const { return spec_; }

  // Level-j profile on the flat frequency grid (FFT bin order).
  const std::vector<double>& profile(int j) const { return profiles_.at(static_cast<std::size_t>(j)); }
  const std::vector<double>& dual(int j) const { return duals_.at(static_cast<std::size_t>(j)); }
  bool has_dual() const { return !duals_.empty(); }

  // max over bins of |sum_j phi_hat_j - 1|.
  double partition_deviation() const;

 private:
  friend FilterBank build_filter_bank(int, int, const ProfileSpec&);
  friend FilterBank build_dual_bank(const FilterBank&);

  int dim_ = 1;
  int depth_ = 0;
  ProfileSpec spec_;
  std::vector<std::vector<double>> profiles_;
  std::vector<std::vector<double>> duals_;
};

FilterBank build_filter_bank(int dim, int depth, const ProfileSpec& spec = {});
// Adds psi_hat_j = phi_hat_j / sum_k phi_hat_k^2.
FilterBank build_dual_bank(const FilterBank& bank);

// pieces[j] = f * phi_j (circular convolution).
struct BandStack {
  std::vector<SampledSignal> pieces;

  int top() const { return static_cast<int>(pieces.size()) - 1; }
  SampledSignal sum() const;
};

BandStack lp_pieces(const SampledSignal& f, const FilterBank& bank);

// c(P) = (f * phi_j)(x_P), l(P) = 2^-j.
CoefField phi_analysis(const SampledSignal& f, const FilterBank& bank);
// f = sum_P c(P) psi_P with psi_P = l(P)^n psi_j(. - x_P); needs a dual bank.
SampledSignal phi_synthesis(const CoefField& c, const FilterBank& bank);

// Keeps the Fourier coefficients representable on the coarser grid (|xi| < 2^(depth-1) per axis)
// and resamples there.
SampledSignal restrict_signal(const SampledSignal& f, int depth);
// Zero-pads the spectrum onto a finer grid.
SampledSignal prolong_signal(const SampledSignal& f, int depth);

}  // namespace microlocal
