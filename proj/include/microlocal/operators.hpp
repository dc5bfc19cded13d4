#pragma once

#include <functional>
#include <string>
#include <vector>

#include "microlocal/lpdecomp.hpp"
#include "microlocal/seqspace.hpp"

namespace microlocal {

// ---- Fourier multipliers -------------------------------------------------------------------

// Multiplier values on the flat FFT bin grid. When f is real and m(-xi) = conj(m(xi)) the
// result is returned real.
SampledSignal apply_multiplier(const SampledSignal& f, const std::vector<Complex>& m);

// (1 + |2 pi xi|^2)^{mu/2}
std::vector<Complex> bessel_multiplier(int dim, int depth, double mu);
SampledSignal bessel_potential(const SampledSignal& f, double mu);

// -i sign(xi) (1 - h(2|xi|)) h(|xi| / (N/4)), h the radial bump profile. Maps cos to sin on the
// passband 1 <= |xi| <= N/4.
std::vector<Complex> hilbert_multiplier(int depth);

// Convolution kernel k with (T f)(x) = int k(x - y) f(y) dy, sampled at the grid points.
std::vector<double> multiplier_kernel(const std::vector<Complex>& m, int depth);

// ---- Pseudo-differential operators (n = 1) ---------------------------------------------------

// a(x_m, xi) with rows m = 0..N-1 and columns xi = col - N/2.
struct SymbolGrid {
  int depth = 0;
  double mu = 0.0;
  std::vector<Complex> values;  // row-major N x N

  std::size_t points() const { return std::size_t{1} << depth; }
  Complex at(std::size_t m, long long xi) const {
    return values[m * points() + static_cast<std::size_t>(xi + static_cast<long long>(points() / 2))];
  }

  static SymbolGrid from_function(int depth, double mu, const std::function<Complex(double x, double xi)>& a);
  // One row per grid point; each row holds N values, either real or "re,im" pairs.
  static SymbolGrid load_csv(const std::string& path, double mu);
  void save_csv(const std::string& path) const;
};

SampledSignal apply_pseudo_diff(const SampledSignal& f, const SymbolGrid& a);

struct SymbolSeminorm {
  int alpha = 0;
  int beta = 0;
  double value = 0.0;
};

// sup (1 + |xi|)^{-mu - alpha + beta} |d^alpha_x d^beta_xi a| by centred differences
// (x step 1/N, xi step 1), interior nodes only.
std::vector<SymbolSeminorm> validate_symbol_class(const SymbolGrid& a, double mu, int max_order);

// ---- Calderon-Zygmund kernel bounds (n = 1) -------------------------------------------------

struct CZKernelSample {
  int depth = 0;
  int r1 = 0;
  int r2 = 0;
  double epsilon = 0.5;
  std::function<double(std::size_t i, std::size_t j)> kernel;  // K(x_i, y_j), off-diagonal

  static CZKernelSample convolution(int depth, std::vector<double> k, int r1, int r2, double epsilon);
};

struct CZReport {
  std::vector<double> size_constants;       // size bound, gamma = 0..r1
  double y_smoothness_constant = 0.0;        // y-smoothness
  std::vector<double> mixed_constants;       // mixed, y-variation, gamma = 1..r1
  std::vector<double> x_smoothness_constants;  // mixed, x-variation, gamma = 0..r1
  std::vector<double> decay_exponents;       // fitted envelope decay of d^gamma_x K, gamma = 0..r1
  bool finite = false;
  bool passed = false;
};

CZReport validate_cz_kernel(const CZKernelSample& k);

// ---- Differences and oscillations (n = 1) ---------------------------------------------------

struct DifferenceSpec {
  int k = 2;
  double p = 2.0;
  double sprime = 0.5;

  void validate() const;
};

// Delta^k_u f with u = shift grid cells.
SampledSignal kth_difference(const SampledSignal& f, long long shift, int k);
// Same with u in domain units; u must be a multiple of the grid spacing.
SampledSignal kth_difference(const SampledSignal& f, double u, int k);

// Deepest level with a nonempty window k|u| <= 2^-i: D - ceil(log2 k).
int difference_level_cap(int depth, int k);

// d^k_i f(y) = |B_i(y)|^-1 sum_{k|u| <= 2^-i} |Delta^k_u f(y)| h
std::vector<double> local_mean_difference(const SampledSignal& f, int i, int k);
// sup_{k|u| <= 2^-i} |Delta^k_u f(y)|
std::vector<double> sup_difference(const SampledSignal& f, int i, int k);

enum class OscillationKind {
  Projection,  // Omega: residual of the L2(B) moment projection
  Infimum,     // osc: inf over polynomials (exact for p = 2; Lawson iteration for p = inf)
};

// Ball B_i(x) as grid offsets: |o| h <= 2^-i, the whole torus once the radius reaches 1/2.
std::vector<long long> ball_offsets(int depth, int i);

double oscillation(const SampledSignal& f, std::size_t x, int i, int degree, double p,
                   OscillationKind kind = OscillationKind::Projection);
std::vector<double> oscillation_field(const SampledSignal& f, int i, int degree, double p,
                                      OscillationKind kind = OscillationKind::Projection);
// One ball sweep for several p.
std::vector<std::vector<double>> oscillation_fields(const SampledSignal& f, int i, int degree,
                                                    const std::vector<double>& ps,
                                                    OscillationKind kind = OscillationKind::Projection);

// Per-level difference data shared by every (s, s', sigma, q) evaluation; levels 0..cap.
struct DifferenceLevels {
  int k = 0;
  int depth = 0;
  int cap = 0;
  std::vector<double> ps;
  std::vector<std::vector<double>> sup;   // sup_u |Delta^k_u f|
  std::vector<std::vector<double>> mean;  // d^k_i f
  // [p][i][j][cube]: sup_u ||Delta^k_u f||_{L^p(P)} for level-j cubes P, j <= i.
  std::vector<std::vector<std::vector<std::vector<double>>>> sup_lp;
  std::vector<std::vector<std::vector<double>>> osc;  // [p][i]: Omega^{k-1}_p
};

DifferenceLevels difference_levels(const SampledSignal& f, int k, const std::vector<double>& ps);

struct DifferenceNorms {
  double lhs = 0.0;            // ||f||_{A^s(E)} + sup sup l(P)^-s ||f||_{L^p(P)}
  double sup_difference = 0.0;
  double oscillation = 0.0;    // with osc^{k-1}_p realized as Omega
  double mean_difference = 0.0;
  int level_cap = 0;
};

// spec.p and spec.sprime override params.p and params.sprime.
DifferenceNorms difference_norms(const SampledSignal& f, const SpaceParams& params, const DifferenceSpec& spec,
                                 const FilterBank& bank, int virtual_levels = 4);
DifferenceNorms difference_norms(const SampledSignal& f, const DifferenceLevels& levels, const SpaceParams& params,
                                 const DifferenceSpec& spec, const FilterBank& bank, int virtual_levels = 4);

}  // namespace microlocal
