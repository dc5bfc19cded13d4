#pragma once

#include <string>
#include <vector>

#include "microlocal/lpdecomp.hpp"
#include "microlocal/seqspace.hpp"

namespace microlocal {

// Periodized compactly supported orthonormal wavelets on the 1-D torus, given by a lowpass
// filter h; the highpass filter is g[m] = (-1)^m h[L-1-m].
struct WaveletSystem {
  std::string name;
  int r = 1;  // vanishing moments
  std::vector<double> lowpass;
  std::vector<double> highpass;

  // psi_Q is supported in x_Q + [0, support_radius * l(Q)].
  double support_radius() const { return static_cast<double>(lowpass.size()) - 1.0; }
};

// Daubechies family with r vanishing moments, r in 1..10.
WaveletSystem build_wavelet_system(int r);
// One coefficient per line; blank lines and '#' comments are skipped.
WaveletSystem load_wavelet_filter(const std::string& path, int vanishing_moments);
WaveletSystem wavelet_from_lowpass(std::string name, std::vector<double> lowpass, int vanishing_moments);

// c0 = <f, psi_{0,0}> and c(Q) = l(Q)^-n <f, psi_Q> with psi_Q(x) = psi(l(Q)^-1 (x - x_Q)).
// Detail levels run 0..D-1; level D of the field stays zero.
struct WaveletCoefficients {
  Complex c0{};
  CoefField c;
};

// Finest scaling coefficients from grid data. Projection: <f, phi_{D,k}> for the trigonometric
// interpolant of f, so coefficients of a band-limited f do not depend on D. Samples: the
// discrete cascade started from 2^{-D/2} f(k 2^-D).
enum class WaveletInit { Projection, Samples };

WaveletCoefficients wavelet_analysis(const SampledSignal& f, const WaveletSystem& w,
                                     WaveletInit init = WaveletInit::Projection);
SampledSignal wavelet_synthesis(const WaveletCoefficients& coefs, const WaveletSystem& w,
                                WaveletInit init = WaveletInit::Projection);

// psi_Q in the l(Q)^-n normalization and the scaling function psi_{0,0}, sampled by the discrete
// cascade (WaveletInit::Samples) at `depth`.
SampledSignal wavelet_function(const WaveletSystem& w, int depth, const DyadicCube& q);
SampledSignal scaling_function(const WaveletSystem& w, int depth);

// L2-normalized coefficient <f, 2^{j/2} psi(2^j x - k)> equals l(Q)^{n/2} c(Q).
CoefField to_l2_normalized(const CoefField& c);
CoefField from_l2_normalized(const CoefField& c);

// Smooth atoms a_Q = b(t) P(t), t = (x - c_Q) / (1.5 l(Q)) wrapped on the torus, b the standard
// bump exp(-1/(1-t^2)); P has degree r2 and is orthogonal to lower degrees in the b-weighted grid
// inner product, so the first r2 discrete moments vanish. Level-0 atoms are the bump alone.
struct AtomFamily {
  int dim = 1;
  int depth = 0;
  int r2 = 0;

  SampledSignal atom(const DyadicCube& q) const;
};

SampledSignal atom_synthesis(const CoefField& c, const AtomFamily& family);

// Molecule conditions checked level by level on the grid.
struct MoleculeCheckOptions {
  int min_level = 1;   // levels with l(Q) < 1 that are checked
  int max_level = -1;  // -1: depth - 1
  int cubes_per_level = 8;
  double moment_tolerance = 1e-8;
  double slope_threshold = 0.25;  // log2 growth of per-level constants tolerated
};

struct LevelConstants {
  std::vector<int> levels;
  std::vector<double> constants;
  double log2_slope = 0.0;
  bool bounded = true;
};

struct MoleculeReport {
  LevelConstants decay;                     // |m_Q| (1 + |x - x_Q| / l)^{max(L, L2)}
  std::vector<LevelConstants> derivatives;  // order 1..r1, scaled by l(Q)^{|gamma|}
  double moment_residual = 0.0;             // max |l(Q)^-n int m_Q ((x - x_Q)/l)^gamma| over |gamma| < r2
  bool decay_ok = false;
  bool derivatives_ok = false;
  bool moments_ok = false;
  bool passed = false;
};

MoleculeReport validate_molecule_family(const CubeFamily& family, int depth, int r1, int r2, double L,
                                        const MoleculeCheckOptions& options = {});

CubeFamily wavelet_family(const WaveletSystem& w, int depth);
CubeFamily atom_cube_family(const AtomFamily& family);

// Function-space norm, phi-transform sequence norm, wavelet sequence norm (c0 term plus c term),
// and pairwise natural-log ratios (NaN when undefined).
struct EquivalenceReport {
  double function_norm = 0.0;
  double phi_norm = 0.0;
  double wavelet_norm = 0.0;
  double log_phi_over_function = 0.0;
  double log_wavelet_over_function = 0.0;
  double log_wavelet_over_phi = 0.0;
};

EquivalenceReport equivalence_report(const SampledSignal& f, const SpaceParams& params, const FilterBank& bank,
                                     const WaveletSystem& w, int virtual_levels = 4);

double wavelet_sequence_norm(const WaveletCoefficients& coefs, const SpaceParams& params, int virtual_levels = 4);

}  // namespace microlocal
