#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "microlocal/dyadic.hpp"

namespace microlocal {

using Complex = std::complex<double>;

// Samples of a function on the uniform grid of the torus: 2^(n depth) values, row-major for n = 2.
class SampledSignal {
 public:
  SampledSignal() = default;
  SampledSignal(int dim, int depth);
  SampledSignal(int dim, int depth, std::vector<Complex> values);

  static SampledSignal from_real(int dim, int depth, std::span<const double> values);

  int dim() const { return dim_; }
  int depth() const { return depth_; }
  std::size_t size() const { return values_.size(); }
  std::size_t points_per_axis() const { return std::size_t{1} << depth_; }

  const std::vector<Complex>& values() const { return values_; }
  std::vector<Complex>& values() { return values_; }
  Complex operator[](std::size_t m) const { return values_[m]; }
  Complex& operator[](std::size_t m) { return values_[m]; }

  std::vector<double> real_part() const;
  std::vector<double> magnitudes() const;
  bool is_real() const;
  // Relative L2 distance ||a - b|| / ||b|| (absolute when b = 0).
  static double relative_l2_error(const SampledSignal& a, const SampledSignal& b);
  double l2_norm() const;  // Riemann-sum L2 norm on the torus

  SampledSignal& operator+=(const SampledSignal& other);
  SampledSignal& operator*=(Complex scale);

 private:
  int dim_ = 1;
  int depth_ = 0;
  std::vector<Complex> values_;
};

// Cube-indexed coefficients c(R) for 2^-depth <= l(R) <= 1: level j holds 2^(n j) values.
class CoefField {
 public:
  CoefField() = default;
  CoefField(int dim, int depth);

  int dim() const { return dim_; }
  int depth() const { return depth_; }
  std::vector<Complex>& level(int j) { return levels_.at(static_cast<std::size_t>(j)); }
  const std::vector<Complex>& level(int j) const { return levels_.at(static_cast<std::size_t>(j)); }
  const std::vector<std::vector<Complex>>& levels() const { return levels_; }

  Complex& at(const DyadicCube& q);
  Complex at(const DyadicCube& q) const;

  bool all_finite() const;
  double max_abs() const;
  CoefField& operator*=(Complex scale);
  CoefField& operator+=(const CoefField& other);

  // Wraps user-supplied levels after shape validation.
  static CoefField from_levels(int dim, std::vector<std::vector<Complex>> levels);

 private:
  std::size_t flat(const DyadicCube& q) const;

  int dim_ = 1;
  int depth_ = 0;
  std::vector<std::vector<Complex>> levels_;
};

// Frequency (cycles per unit length) of FFT bin `m` along an axis of length `n`; the Nyquist
// bin n/2 maps to -n/2.
inline long long bin_frequency(std::size_t m, std::size_t n) {
  return m < n / 2 ? static_cast<long long>(m) : static_cast<long long>(m) - static_cast<long long>(n);
}

// Radial frequency |xi| of flat bin index `m` on an n-dimensional grid with 2^depth points per axis.
double radial_frequency(std::size_t m, int dim, int depth);

// Discrete Fourier transforms on 2^(n depth) samples (FFTW backed). `forward` returns Fourier
// coefficients normalized by the sample count, so that f(x_m) = sum_xi fhat(xi) e^{2 pi i xi x_m}
// and `inverse` is the plain synthesis sum.
std::vector<Complex> forward_fft(std::span<const Complex> samples, int dim, int depth);
std::vector<Complex> inverse_fft(std::span<const Complex> coefficients, int dim, int depth);

}  // namespace microlocal
