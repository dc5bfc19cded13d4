#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "microlocal/corpus.hpp"
#include "microlocal/seqspace.hpp"

namespace microlocal {

struct SuiteConfig {
  int depth = 10;                 // single-depth checks
  std::vector<int> depths{8, 9, 10, 11};  // trend checks
  int virtual_levels = 4;
  int random_count = 20;
  std::vector<std::string> fixtures{"cusp", "chirp", "weierstrass", "wavelet_series", "bl_noise"};
  std::uint64_t seed = 20240601;
  int random_fields = 200;        // embeddings suite
  // almost-diagonal suite
  std::vector<int> ad_depths{6, 8, 10};
  int ad_kernels = 20;
  int ad_inputs = 20;
  double ad_r1 = 1.5;
  double ad_r2 = 1.5;
  double ad_L = 2.5;
  double ad_negative_L = 0.5;
  std::string calibration_path;   // equivalence suite band file
};

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct SuiteReport {
  std::string name;
  bool passed = true;
  std::vector<Check> checks;

  void add(Check c);
  nlohmann::json to_json() const;
};

// Fixtures named in the config plus random_count seeded random signals; empty selection is an error.
std::vector<CorpusEntry> suite_corpus(const SuiteConfig& cfg, int depth);

SuiteReport filter_bank_suite(const SuiteConfig& cfg);
SuiteReport round_trip_suite(const SuiteConfig& cfg);
SuiteReport embeddings_suite(const SuiteConfig& cfg);
SuiteReport degeneracy_suite(const SuiteConfig& cfg);
// with_negative_control adds the L = ad_negative_L run, which must show growth.
SuiteReport almost_diagonal_suite(const SuiteConfig& cfg, bool with_negative_control);
// Reads the band from cfg.calibration_path; when the file is missing or `calibrate` is set, the
// band is recorded there first.
SuiteReport equivalence_suite(const SuiteConfig& cfg, bool calibrate = false);
SuiteReport operators_suite(const SuiteConfig& cfg);
SuiteReport differences_suite(const SuiteConfig& cfg);
SuiteReport frontier_suite(const SuiteConfig& cfg);

// ---- 2-microlocal frontier -------------------------------------------------------------------

struct FrontierCell {
  double s = 0.0;
  double sprime = 0.0;
  bool finite = true;
  double value = 0.0;        // at depth D
  double log2_growth = 0.0;  // log2(value(D) / value(D-1))
};

// tilde B^{s+s'}_{inf,inf} with sigma = -s' and outer s = 0; divergent when the value grows by
// more than `threshold` (log2) from D-1 to D.
std::vector<FrontierCell> frontier_scan(const SampledSignal& f, double x0, const std::vector<double>& s_grid,
                                        const std::vector<double>& sprime_grid, double threshold = 0.05);

// Independent oracle: |f * phi_i| by direct spatial quadrature, per-level weighted sups, and the
// fitted log2 slope over levels [lo, hi]; divergent when the slope exceeds `threshold`.
std::vector<FrontierCell> frontier_oracle(const SampledSignal& f, double x0, const std::vector<double>& s_grid,
                                          const std::vector<double>& sprime_grid, int lo, int hi,
                                          double threshold = 0.05);

}  // namespace microlocal
