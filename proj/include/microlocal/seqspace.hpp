#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "microlocal/dyadic.hpp"
#include "microlocal/signal.hpp"

namespace microlocal {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Family { B, F };

struct SpaceParams {
  Family family = Family::B;
  bool tilde = false;
  double s = 0.0;
  double sprime = 0.0;
  double sigma = 0.0;
  double p = 2.0;  // may be kInf
  double q = 2.0;  // may be kInf
  Point x0{};

  // n / min(1, p, q) for F, n / min(1, p) for B.
  double j_exponent(int dim) const;
  void validate(int dim) const;
};

// (2^-i + |x0 - x|)^-sigma on the torus.
double weight(int i, const Point& x, double sigma, const Point& x0, int dim);

// Nonnegative per-level magnitudes on the finest grid, levels 0..top. For coefficients this is
// sum_{l(R)=2^-i} |c(R)| chi_R; for functions |f * phi_i|.
struct LevelField {
  int dim = 1;
  int depth = 0;
  std::vector<std::vector<double>> g;
};

LevelField level_field(const CoefField& c);

// Sums (or maxima) of a grid array over every cube, result[j] indexed by Lattice::flat_index.
std::vector<std::vector<double>> cube_aggregates(std::vector<double> grid, int dim, int depth, bool use_max);

// Local norms for every coefficient-carrying cube, indexed by Lattice::global_index.
struct CubeTable {
  Lattice lattice{1, 0, 0};
  std::vector<double> values;

  double at(const DyadicCube& q) const { return values[lattice.global_index(q)]; }
};

// ||f||_{L^p(P)} (Riemann sum, max for p = inf) for every cube P at levels 0..depth.
CubeTable lp_norm_table(const SampledSignal& f, double p, int virtual_levels = 4);

// Fast evaluation of the local norm c(e)(P) (or c(E)(P)) for all P at levels 0..depth.
CubeTable local_norm_table(const LevelField& field, const SpaceParams& params, int virtual_levels = 4);
// Direct evaluation for one cube; virtual cubes (level < 0) sum from i = 0 over the whole torus.
double local_norm_direct(const LevelField& field, const DyadicCube& p, const SpaceParams& params,
                         int virtual_levels = 4);

struct NormReport {
  double value = 0.0;
  DyadicCube witness_Q;
  DyadicCube witness_P;
  SpaceParams params;
  int depth = 0;
  int virtual_levels = 0;
  std::optional<double> truncation_delta;
  std::optional<CubeTable> per_cube;
};

// Non-tilde: sup over Q ∋ x0 (levels -M..D+1) of l(Q)^-sigma sup_{P ⊂ 3Q} l(P)^-s local(P).
// Tilde: sup over P of l(P)^-s local(P), witness_Q = witness_P. First strictly greater wins.
NormReport outer_sup(const CubeTable& table, const SpaceParams& params);

double local_seq_norm(const CoefField& c, const DyadicCube& p, const SpaceParams& params, int virtual_levels = 4);
NormReport outer_norm(const CoefField& c, const SpaceParams& params, int virtual_levels = 4, bool keep_table = false);

// c*(P) = sum_{l(R)=l(P)} |c(R)| (1 + l(P)^-1 |x_P - x_R|)^-L.
CoefField star_smoothing(const CoefField& c, double L);

// (M_t g)(x) = sup over dyadic Q ∋ x, levels 0..D, of (mean_Q |g|^t)^(1/t).
SampledSignal maximal_mt(const SampledSignal& g, double t);

struct AlmostDiagonalParams {
  double r1 = 0.0;
  double r2 = 0.0;
  double L = 1.0;
  double C = 1.0;
};

// Right-hand side of the almost-diagonal bound with C = 1.
double almost_diagonal_bound(const Lattice& lattice, const DyadicCube& q, const DyadicCube& p,
                             const AlmostDiagonalParams& params);

// Matrix indexed by coefficient-carrying cubes, stored densely or as a kernel a(Q, P).
class CubeMatrix {
 public:
  using Kernel = std::function<double(const DyadicCube& q, const DyadicCube& p)>;

  static CubeMatrix dense(const Lattice& lattice, std::vector<double> entries);
  static CubeMatrix from_kernel(const Lattice& lattice, Kernel kernel);
  static CubeMatrix identity(const Lattice& lattice);

  const Lattice& lattice() const { return lattice_; }
  std::size_t size() const { return lattice_.total_cube_count(); }
  bool is_dense() const { return !kernel_; }
  double entry(std::size_t row, std::size_t col) const;
  // Materializes a kernel-backed matrix (only sensible at small depth).
  CubeMatrix densified() const;

 private:
  CubeMatrix(const Lattice& lattice) : lattice_(lattice) {}

  Lattice lattice_;
  std::vector<double> entries_;
  Kernel kernel_;
};

struct AlmostDiagonalReport {
  bool passed = false;
  double max_violation_ratio = 0.0;  // max |a| / (C * bound)
  double smallest_C = 0.0;
  DyadicCube worst_Q;
  DyadicCube worst_P;
};

AlmostDiagonalReport is_almost_diagonal(const CubeMatrix& a, const AlmostDiagonalParams& params);

CoefField apply_matrix(const CubeMatrix& a, const CoefField& c);
// Each matrix entry is evaluated once for all inputs.
std::vector<CoefField> apply_matrix(const CubeMatrix& a, const std::vector<CoefField>& cs);

// Family of functions evaluable on the grid, one per cube.
using CubeFamily = std::function<SampledSignal(const DyadicCube&)>;

// Entries l(P ∧ R)^-n <phi_P, varphi_R> by grid quadrature (normalized by the smaller cube).
CubeMatrix gram_matrix(const Lattice& lattice, const CubeFamily& fam1, const CubeFamily& fam2);

}  // namespace microlocal
