#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "microlocal/errors.hpp"
#include "microlocal/lpdecomp.hpp"

using namespace microlocal;

namespace {

SampledSignal band_limited(int depth, int max_freq, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const std::size_t n = std::size_t{1} << depth;
  std::vector<Complex> spec(n);
  for (int k = 1; k <= max_freq; ++k) {
    const Complex a{gauss(rng), gauss(rng)};
    spec[static_cast<std::size_t>(k)] = a;
    spec[n - static_cast<std::size_t>(k)] = std::conj(a);
  }
  spec[0] = gauss(rng);
  return SampledSignal(1, depth, inverse_fft(spec, 1, depth));
}

SampledSignal cosine(int depth, int freq) {
  const std::size_t n = std::size_t{1} << depth;
  std::vector<double> v(n);
  for (std::size_t m = 0; m < n; ++m) v[m] = std::cos(2 * std::numbers::pi * freq * static_cast<double>(m) / n);
  return SampledSignal::from_real(1, depth, v);
}

}  // namespace

TEST_CASE("profile values") {
  CHECK(bump_profile(0.5) == 1.0);
  CHECK(bump_profile(2.5) == 0.0);
  const double mid = bump_profile(1.5);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
  CHECK(mid == doctest::Approx(0.5));
}

TEST_CASE("partition of unity") {
  for (int dim = 1; dim <= 2; ++dim) {
    const FilterBank bank = build_filter_bank(dim, dim == 1 ? 8 : 6);
    CHECK(bank.partition_deviation() < 1e-12);
    CHECK(bank.profile(1)[0] == 0.0);
    CHECK(bank.profile(0)[0] == 1.0);
  }
  CHECK_THROWS_AS(build_filter_bank(1, 1), InvalidInput);
  CHECK_THROWS_AS(build_filter_bank(1, 8, ProfileSpec{2.0, 1.0}), InvalidInput);
}

TEST_CASE("band supports") {
  const ProfileSpec spec;
  const int D = 9;
  const FilterBank bank = build_filter_bank(1, D, spec);
  for (int j = 1; j < D; ++j) {
    for (std::size_t m = 0; m < (1u << D); ++m) {
      const double r = radial_frequency(m, 1, D);
      if (r < std::ldexp(spec.base_frequency, j - 1) || r > std::ldexp(spec.base_frequency, j + 1))
        CHECK(bank.profile(j)[m] == 0.0);
    }
  }
}

TEST_CASE("dual bank") {
  const FilterBank bank = build_dual_bank(build_filter_bank(1, 8));
  for (std::size_t m = 0; m < 256; ++m) {
    double sum = 0.0, sq = 0.0;
    for (int j = 0; j <= 8; ++j) {
      sum += bank.dual(j)[m] * bank.profile(j)[m];
      sq += bank.profile(j)[m] * bank.profile(j)[m];
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
    for (int j = 0; j <= 8; ++j) CHECK(bank.dual(j)[m] == doctest::Approx(bank.profile(j)[m] / sq));
  }
}

TEST_CASE("lp pieces") {
  const int D = 10;
  const FilterBank bank = build_filter_bank(1, D);
  const auto zero = lp_pieces(SampledSignal(1, D), bank);
  for (const auto& p : zero.pieces) CHECK(p.l2_norm() == 0.0);

  std::vector<double> ones(1u << D, 1.0);
  const auto flat = lp_pieces(SampledSignal::from_real(1, D, ones), bank);
  CHECK(std::abs(flat.pieces[0][17] - 1.0) < 1e-12);
  for (int j = 1; j <= D; ++j) CHECK(flat.pieces[static_cast<std::size_t>(j)].l2_norm() < 1e-14);

  // cos(2 pi 2^5 x): |xi| = 32 = 2^7 f_base sits where phi_7 = 1 exactly
  const auto pure = lp_pieces(cosine(D, 32), bank);
  for (int j = 0; j <= D; ++j) {
    const double e = pure.pieces[static_cast<std::size_t>(j)].l2_norm();
    if (j == 7) {
      CHECK(e == doctest::Approx(std::sqrt(0.5)));
    } else {
      CHECK(e < 1e-12);
    }
  }

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto f = band_limited(D, 300, seed);
    CHECK(SampledSignal::relative_l2_error(lp_pieces(f, bank).sum(), f) < 1e-10);
  }
}

TEST_CASE("phi transform") {
  for (int D : {8, 10}) {
    const FilterBank bank = build_dual_bank(build_filter_bank(1, D));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto f = band_limited(D, (1 << (D - 1)) - 1, seed);
      const auto c = phi_analysis(f, bank);
      CHECK(SampledSignal::relative_l2_error(phi_synthesis(c, bank), f) < 1e-8);
    }
  }
  const FilterBank bank = build_dual_bank(build_filter_bank(1, 8));
  std::vector<double> ones(256, 1.0);
  const auto c = phi_analysis(SampledSignal::from_real(1, 8, ones), bank);
  CHECK(std::abs(c.level(0)[0] - 1.0) < 1e-12);
  for (int j = 1; j <= 8; ++j) CHECK(c.level(j).size() == (1u << j));
  CHECK(phi_synthesis(CoefField(1, 8), bank).l2_norm() == 0.0);
}

TEST_CASE("phi transform in two dimensions") {
  const int D = 5;
  const FilterBank bank = build_dual_bank(build_filter_bank(2, D));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  std::vector<double> v(1u << (2 * D));
  for (auto& x : v) x = gauss(rng);
  const auto f = SampledSignal::from_real(2, D, v);
  CHECK(SampledSignal::relative_l2_error(phi_synthesis(phi_analysis(f, bank), bank), f) < 1e-8);
  CHECK(SampledSignal::relative_l2_error(lp_pieces(f, bank).sum(), f) < 1e-10);
}

TEST_CASE("single coefficient synthesizes a localized function") {
  const int D = 9;
  const FilterBank bank = build_dual_bank(build_filter_bank(1, D));
  CoefField c(1, D);
  c.level(6)[20] = 1.0;  // x_Q = 20/64
  const auto g = phi_synthesis(c, bank);
  std::size_t arg = 0;
  for (std::size_t m = 0; m < g.size(); ++m)
    if (std::abs(g[m]) > std::abs(g[arg])) arg = m;
  CHECK(arg == 20 * 8);
}

TEST_CASE("restriction and prolongation") {
  const auto f = band_limited(10, 100, 4);
  const auto r = restrict_signal(f, 8);
  CHECK(r.size() == 256);
  CHECK(SampledSignal::relative_l2_error(prolong_signal(r, 10), f) < 1e-12);
}
