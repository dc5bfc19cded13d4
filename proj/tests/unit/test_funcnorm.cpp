#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "microlocal/funcnorm.hpp"

using namespace microlocal;

namespace {

SampledSignal noise(int depth, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<double> v(std::size_t{1} << depth);
  for (auto& x : v) x = gauss(rng);
  return SampledSignal::from_real(1, depth, v);
}

}  // namespace

TEST_CASE("zero signal") {
  const FilterBank bank = build_filter_bank(1, 7);
  SpaceParams sp;
  const auto r = full_norm(SampledSignal(1, 7), sp, bank);
  CHECK(r.value == 0.0);
}

TEST_CASE("pure band piece") {
  // cos at |xi| = 32 lives only in band 7; |f*phi_7| = |cos|
  const int D = 9;
  const FilterBank bank = build_filter_bank(1, D);
  std::vector<double> v(512);
  for (std::size_t m = 0; m < 512; ++m) v[m] = std::cos(2 * std::numbers::pi * 32 * m / 512.0);
  const auto pieces = lp_pieces(SampledSignal::from_real(1, D, v), bank);
  SpaceParams sp;
  sp.sprime = 0.3;
  sp.p = 2.0;
  // L^2 norm of cos over the cube [0, 1/4): sqrt(1/8)
  CHECK(local_func_norm(pieces, {2, {0, 0}}, sp) == doctest::Approx(std::exp2(7 * 0.3) * std::sqrt(0.125)).epsilon(1e-10));
}

TEST_CASE("tilde with sigma zero equals plain") {
  const auto f = noise(7, 1);
  const FilterBank bank = build_filter_bank(1, 7);
  const auto pieces = lp_pieces(f, bank);
  SpaceParams a, b;
  b.tilde = true;
  for (int j = 0; j <= 7; ++j) CHECK(local_func_norm(pieces, {j, {0, 0}}, a) == local_func_norm(pieces, {j, {0, 0}}, b));
}

TEST_CASE("classical Besov sup") {
  const int D = 8;
  const auto f = noise(D, 2);
  const FilterBank bank = build_filter_bank(1, D);
  SpaceParams sp;
  sp.p = sp.q = kInf;
  sp.sprime = 0.5;
  const auto pieces = lp_pieces(f, bank);
  double expect = 0.0;
  for (int i = 0; i <= D; ++i)
    for (std::size_t m = 0; m < f.size(); ++m) expect = std::max(expect, std::exp2(0.5 * i) * std::abs(pieces.pieces[static_cast<std::size_t>(i)][m]));
  CHECK(full_norm(f, sp, bank).value == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("monotone in sigma without virtual levels") {
  const auto f = noise(7, 3);
  const FilterBank bank = build_filter_bank(1, 7);
  SpaceParams sp;
  sp.x0 = {0.35, 0};
  FullNormOptions opt;
  opt.virtual_levels = 0;
  double prev = 0.0;
  for (double sigma : {0.0, 0.25, 0.5, 1.0}) {
    sp.sigma = sigma;
    const double v = full_norm(f, sp, bank, opt).value;
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("truncation delta") {
  const auto f = noise(8, 4);
  const FilterBank bank = build_filter_bank(1, 8);
  FullNormOptions opt;
  opt.truncation_delta = true;
  const auto r = full_norm(f, SpaceParams{}, bank, opt);
  REQUIRE(r.truncation_delta.has_value());
  CHECK(std::isfinite(*r.truncation_delta));
}
