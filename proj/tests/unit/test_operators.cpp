#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "doctest.h"
#include "microlocal/errors.hpp"
#include "microlocal/operators.hpp"

using namespace microlocal;

namespace {

constexpr double kPi = std::numbers::pi;

SampledSignal sampled(int depth, const std::function<double(double)>& fn) {
  const std::size_t n = std::size_t{1} << depth;
  std::vector<double> v(n);
  for (std::size_t m = 0; m < n; ++m) v[m] = fn(static_cast<double>(m) / static_cast<double>(n));
  return SampledSignal::from_real(1, depth, v);
}

SampledSignal band_limited(int depth, int max_freq, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<double> a(static_cast<std::size_t>(max_freq) + 1), b(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] = gauss(rng);
    b[k] = gauss(rng);
  }
  return sampled(depth, [&](double x) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * std::cos(2 * kPi * k * x) + b[k] * std::sin(2 * kPi * k * x);
    return s;
  });
}

double max_abs_diff(const SampledSignal& a, const SampledSignal& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("multiplier identity and eigenfunctions") {
  const int D = 8;
  const auto f = band_limited(D, 40, 1);
  std::vector<Complex> one(f.size(), 1.0);
  CHECK(max_abs_diff(apply_multiplier(f, one), f) < 1e-12);

  const int m = 5;
  const auto c = sampled(D, [&](double x) { return std::cos(2 * kPi * m * x); });
  const auto mult = bessel_multiplier(1, D, 1.3);
  const double lambda = std::pow(1.0 + 4 * kPi * kPi * m * m, 1.3 / 2);
  CHECK(std::abs(mult[m].real() - lambda) < 1e-9 * lambda);
  const auto out = bessel_potential(c, 1.3);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(out[i] - lambda * c[i]) < 1e-9 * lambda);
  CHECK(out.is_real());
  CHECK(max_abs_diff(bessel_potential(f, 0.0), f) < 1e-12);
}

TEST_CASE("bessel round trip") {
  for (int D : {8, 10}) {
    const auto f = band_limited(D, 100, static_cast<std::uint64_t>(D));
    for (double mu : {-1.0, 0.5, 1.0, 2.0}) {
      const auto back = bessel_potential(bessel_potential(f, mu), -mu);
      CHECK(SampledSignal::relative_l2_error(back, f) < 1e-10);
    }
  }
}

TEST_CASE("hilbert multiplier maps cos to sin on the passband") {
  const int D = 9;
  const std::size_t n = std::size_t{1} << D;
  const auto m = hilbert_multiplier(D);
  for (int freq : {1, 3, 17, static_cast<int>(n / 4)}) {
    const auto c = sampled(D, [&](double x) { return std::cos(2 * kPi * freq * x); });
    const auto s = sampled(D, [&](double x) { return std::sin(2 * kPi * freq * x); });
    CHECK(max_abs_diff(apply_multiplier(c, m), s) < 1e-10);
  }
  const auto top = sampled(D, [&](double x) { return std::cos(2 * kPi * static_cast<double>(n / 2 - 1) * x); });
  CHECK(apply_multiplier(top, m).l2_norm() < 0.5);
  // Constants are annihilated.
  std::vector<double> ones(n, 1.0);
  CHECK(apply_multiplier(SampledSignal::from_real(1, D, ones), m).l2_norm() < 1e-14);
  // Kernel realizes the multiplier as a Riemann-sum convolution.
  const auto k = multiplier_kernel(m, D);
  const auto f = band_limited(D, 30, 7);
  const auto tf = apply_multiplier(f, m);
  for (std::size_t x : {std::size_t{0}, std::size_t{77}, n - 1}) {
    double acc = 0.0;
    for (std::size_t y = 0; y < n; ++y) acc += k[(x + n - y) % n] * f[y].real();
    CHECK(std::abs(acc / static_cast<double>(n) - tf[x].real()) < 1e-10);
  }
}

TEST_CASE("pseudo-differential operators") {
  const int D = 7;
  const std::size_t n = std::size_t{1} << D;
  const auto f = band_limited(D, 50, 3);
  const auto g = band_limited(D, 60, 4);
  const auto one = SymbolGrid::from_function(D, 0.0, [](double, double) { return Complex(1.0); });
  CHECK(max_abs_diff(apply_pseudo_diff(f, one), f) < 1e-12);

  // x-independent symbol agrees with the multiplier path.
  const auto bessel = SymbolGrid::from_function(D, 1.0, [](double, double xi) {
    return Complex(std::sqrt(1.0 + 4 * kPi * kPi * xi * xi));
  });
  const auto a = apply_pseudo_diff(f, bessel);
  const auto b = bessel_potential(f, 1.0);
  CHECK(SampledSignal::relative_l2_error(a, b) < 1e-10);

  // Modulated cutoff shifts frequency by one.
  const auto mod = SymbolGrid::from_function(D, 0.0, [&](double x, double xi) {
    return std::polar(1.0, 2 * kPi * x) * bump_profile(std::abs(xi) / (static_cast<double>(n) / 8));
  });
  for (int freq : {2, 9}) {
    std::vector<Complex> e(n);
    for (std::size_t m = 0; m < n; ++m) e[m] = std::polar(1.0, 2 * kPi * freq * static_cast<double>(m) / n);
    const auto out = apply_pseudo_diff(SampledSignal(1, D, e), mod);
    for (std::size_t m = 0; m < n; ++m)
      CHECK(std::abs(out[m] - std::polar(1.0, 2 * kPi * (freq + 1) * static_cast<double>(m) / n)) < 1e-10);
  }

  // Linearity.
  const Complex alpha(0.3, -1.2), beta(2.0, 0.5);
  SampledSignal lhs_in = f;
  lhs_in *= alpha;
  SampledSignal gb = g;
  gb *= beta;
  lhs_in += gb;
  auto rhs = apply_pseudo_diff(f, mod);
  rhs *= alpha;
  auto rg = apply_pseudo_diff(g, mod);
  rg *= beta;
  rhs += rg;
  CHECK(max_abs_diff(apply_pseudo_diff(lhs_in, mod), rhs) < 1e-12 * std::max(1.0, rhs.l2_norm() * std::sqrt(n)));

  // CSV round trip.
  const std::string path = "symbol_roundtrip.csv";
  mod.save_csv(path);
  const auto loaded = SymbolGrid::load_csv(path, 0.0);
  CHECK(loaded.depth == D);
  for (std::size_t i = 0; i < mod.values.size(); ++i) CHECK(loaded.values[i] == mod.values[i]);
  std::remove(path.c_str());
}

TEST_CASE("symbol seminorms") {
  const int D = 10;
  for (double mu : {1.0, 2.0}) {
    const auto a = SymbolGrid::from_function(D, mu, [mu](double, double xi) {
      return Complex(std::pow(1.0 + 4 * kPi * kPi * xi * xi, mu / 2));
    });
    const auto table = validate_symbol_class(a, mu, 1);
    const std::size_t n = a.points();
    for (const auto& s : table) {
      if (s.alpha > 0) {
        CHECK(s.value < 1e-6);
        continue;
      }
      // Analytic oracle at the same interior nodes.
      double oracle = 0.0;
      for (std::size_t c = static_cast<std::size_t>(s.beta); c + static_cast<std::size_t>(s.beta) < n; ++c) {
        const double xi = static_cast<double>(c) - static_cast<double>(n / 2);
        const double base = 1.0 + 4 * kPi * kPi * xi * xi;
        const double v = s.beta == 0 ? std::pow(base, mu / 2)
                                     : mu * 4 * kPi * kPi * std::abs(xi) * std::pow(base, mu / 2 - 1);
        oracle = std::max(oracle, std::pow(1.0 + std::abs(xi), -mu + s.beta) * v);
      }
      CHECK(std::abs(s.value - oracle) <= 0.1 * oracle);
    }
  }
  const auto zero = SymbolGrid::from_function(8, 0.0, [](double, double) { return Complex(0.0); });
  for (const auto& s : validate_symbol_class(zero, 0.0, 2)) CHECK(s.value == 0.0);

  double prev = 0.0;
  for (int D = 5; D <= 8; ++D) {
    const auto e = SymbolGrid::from_function(D, 0.0, [](double, double xi) { return Complex(std::exp(std::abs(xi))); });
    const double v = validate_symbol_class(e, 0.0, 0)[0].value;
    CHECK(v > 2.0 * prev);
    prev = v;
  }
}

TEST_CASE("calderon-zygmund kernel validation") {
  const int D = 10;
  const std::size_t n = std::size_t{1} << D;
  const auto k = multiplier_kernel(hilbert_multiplier(D), D);
  const auto rep = validate_cz_kernel(CZKernelSample::convolution(D, k, 1, 0, 0.5));
  CHECK(rep.finite);
  CHECK(rep.passed);
  CHECK(rep.decay_exponents[0] == doctest::Approx(1.0).epsilon(0.15));
  CHECK(rep.decay_exponents[1] == doctest::Approx(2.0).epsilon(0.15));

  const auto flat = validate_cz_kernel(CZKernelSample::convolution(D, std::vector<double>(n, 1.0), 1, 0, 0.5));
  CHECK(flat.finite);
  CHECK_FALSE(flat.passed);

  std::vector<double> root(n, 0.0);
  for (std::size_t m = 1; m < n; ++m) {
    const double d = std::min(m, n - m) / static_cast<double>(n);
    root[m] = std::pow(d, -0.5);
  }
  const auto r = validate_cz_kernel(CZKernelSample::convolution(D, root, 0, 0, 0.5));
  CHECK_FALSE(r.passed);
  CHECK(r.decay_exponents[0] == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("kth differences") {
  const int D = 8;
  const std::size_t n = std::size_t{1} << D;
  const double h = 1.0 / n;
  std::vector<double> ones(n, 3.0);
  const auto c = SampledSignal::from_real(1, D, ones);
  CHECK(kth_difference(c, 5LL, 1).l2_norm() == 0.0);

  const auto lin = sampled(D, [](double x) { return 2.0 * x - 1.0; });
  const auto d2 = kth_difference(lin, 1LL, 2);
  for (std::size_t m = 0; m + 2 < n; ++m) CHECK(std::abs(d2[m]) < 1e-13);

  const auto sq = sampled(D, [](double x) { return x * x; });
  const auto dsq = kth_difference(sq, h, 2);
  for (std::size_t m = 0; m + 2 < n; ++m) CHECK(std::abs(dsq[m].real() - 2 * h * h) < 1e-15);

  CHECK_THROWS_AS(kth_difference(sq, 0.3 * h, 2), InvalidInput);
  CHECK(difference_level_cap(10, 1) == 10);
  CHECK(difference_level_cap(10, 2) == 9);
  CHECK(difference_level_cap(10, 3) == 8);
  CHECK_THROWS_AS(local_mean_difference(sq, D, 2), InvalidInput);
}

TEST_CASE("local mean difference") {
  const int D = 8;
  const std::size_t n = std::size_t{1} << D;
  const double h = 1.0 / n;
  const auto f = band_limited(D, 20, 11);
  for (int i : {0, 3, 7}) {
    const auto d = local_mean_difference(f, i, 2);
    const auto s = sup_difference(f, i, 2);
    for (std::size_t m = 0; m < n; ++m) CHECK(d[m] <= s[m]);
  }
  std::vector<double> ones(n, 1.0);
  const auto c = SampledSignal::from_real(1, D, ones);
  for (double v : local_mean_difference(c, 2, 1)) CHECK(v == 0.0);

  // Binomial evaluation agrees with iterated shifts.
  for (int k : {1, 2, 3}) {
    const int i = 4;
    const auto s = sup_difference(f, i, k);
    std::vector<double> ref(n, 0.0);
    const long long t_max = (1LL << (D - i)) / k;
    for (long long t = -t_max; t <= t_max; ++t) {
      const auto d = kth_difference(f, t, k);
      for (std::size_t m = 0; m < n; ++m) ref[m] = std::max(ref[m], std::abs(d[m]));
    }
    for (std::size_t m = 0; m < n; ++m) CHECK(std::abs(s[m] - ref[m]) < 1e-11);
  }

  // x^2 away from the wrap: mean of 2 u^2 over |u| <= 2^-i / 2, normalized by the ball.
  const auto sq = sampled(D, [](double x) { return x * x; });
  const int i = 4;
  const long long t_max = (1LL << (D - i)) / 2;
  double sum = 0.0;
  for (long long t = 1; t <= t_max; ++t) sum += (t == t_max ? 0.5 : 1.0) * 2.0 * 2 * (t * h) * (t * h);
  const double ball = static_cast<double>(2 * (1LL << (D - i)));
  const auto d = local_mean_difference(sq, i, 2);
  CHECK(d[n / 2] == doctest::Approx(sum / ball).epsilon(1e-12));
}

TEST_CASE("oscillation") {
  const int D = 8;
  const std::size_t n = std::size_t{1} << D;
  const std::size_t x = n / 2;
  const int i = 3;
  const auto quad = sampled(D, [](double t) { return 1.0 - 3 * t + 2 * t * t; });
  for (double p : {1.0, 2.0, kInf}) {
    CHECK(oscillation(quad, x, i, 2, p) < 1e-12);
    CHECK(oscillation(quad, x, i, 2, p, OscillationKind::Infimum) < 1e-12);
  }

  const auto f = band_limited(D, 30, 5);
  const auto offs = ball_offsets(D, i);
  CHECK(offs.size() == static_cast<std::size_t>(2 * (1 << (D - i)) + 1));
  CHECK(ball_offsets(D, 0).size() == n);

  // Oracle: least-squares line through the ball samples, normal equations in long double.
  {
    const std::size_t cnt = offs.size();
    long double s0 = 0, s1 = 0, s2 = 0, y0 = 0, y1 = 0;
    std::vector<long double> t(cnt), y(cnt);
    for (std::size_t a = 0; a < cnt; ++a) {
      t[a] = static_cast<long double>(offs[a]) / (1 << (D - i));
      y[a] = f[(x + n + static_cast<std::size_t>(offs[a] + static_cast<long long>(n))) % n].real();
      s0 += 1;
      s1 += t[a];
      s2 += t[a] * t[a];
      y0 += y[a];
      y1 += t[a] * y[a];
    }
    const long double det = s0 * s2 - s1 * s1;
    const long double c0 = (y0 * s2 - y1 * s1) / det;
    const long double c1 = (s0 * y1 - s1 * y0) / det;
    long double res = 0;
    for (std::size_t a = 0; a < cnt; ++a) res += (y[a] - c0 - c1 * t[a]) * (y[a] - c0 - c1 * t[a]);
    const double oracle = static_cast<double>(std::sqrt(res / cnt));
    CHECK(std::abs(oscillation(f, x, i, 1, 2.0) - oracle) < 1e-10);
  }

  for (double p : {1.0, 2.0, kInf}) {
    const auto omega = oscillation_field(f, i, 1, p);
    const auto osc = oscillation_field(f, i, 1, p, OscillationKind::Infimum);
    double ratio = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      CHECK(osc[m] <= omega[m] * (1 + 1e-12));
      if (osc[m] > 0) ratio = std::max(ratio, omega[m] / osc[m]);
    }
    CHECK(ratio < 10.0);
  }
  CHECK_THROWS_AS(oscillation(f, x, D, 3, 2.0), InvalidInput);
}

TEST_CASE("difference norms") {
  const int D = 8;
  const auto bank = build_filter_bank(1, D);
  SpaceParams params;
  params.s = 0.2;
  params.sigma = 0.1;
  params.q = 2.0;
  params.x0 = {0.3, 0.0};
  DifferenceSpec spec;
  spec.k = 2;
  spec.sprime = 0.3;
  spec.p = 2.0;
  const SampledSignal zero(1, D);
  const auto z = difference_norms(zero, params, spec, bank);
  CHECK(z.lhs == 0.0);
  CHECK(z.sup_difference == 0.0);
  CHECK(z.oscillation == 0.0);
  CHECK(z.mean_difference == 0.0);
  CHECK(z.level_cap == D - 1);

  // Constants: only the L^p(P) terms survive, so all three functionals coincide.
  std::vector<double> ones(std::size_t{1} << D, 2.0);
  const auto c = difference_norms(SampledSignal::from_real(1, D, ones), params, spec, bank);
  CHECK(c.sup_difference == doctest::Approx(c.oscillation).epsilon(1e-12));
  CHECK(c.sup_difference == doctest::Approx(c.mean_difference).epsilon(1e-12));

  const auto cusp = sampled(D, [](double x) { return std::sqrt(std::abs(x - 0.3)); });
  for (Family fam : {Family::B, Family::F}) {
    params.family = fam;
    const auto r = difference_norms(cusp, params, spec, bank);
    CHECK(std::isfinite(r.lhs));
    CHECK(r.mean_difference <= r.sup_difference * (1 + 1e-12));
    CHECK(r.mean_difference > 0.0);
    CHECK(r.oscillation > 0.0);
  }
  // Shared level data reproduces the one-shot evaluation.
  params.family = Family::B;
  const auto shared = difference_levels(cusp, 2, {1.0, 2.0, kInf});
  for (double p : {1.0, 2.0, kInf}) {
    spec.p = p;
    const auto one = difference_norms(cusp, params, spec, bank);
    const auto two = difference_norms(cusp, shared, params, spec, bank);
    CHECK(one.sup_difference == two.sup_difference);
    CHECK(one.oscillation == two.oscillation);
    CHECK(one.mean_difference == two.mean_difference);
  }
  spec.p = 2.0;
  params.family = Family::F;
  spec.p = kInf;
  CHECK_THROWS_AS(difference_norms(cusp, params, spec, bank), InvalidInput);
  params.family = Family::B;
  spec.sprime = 2.5;
  CHECK_THROWS_AS(difference_norms(cusp, params, spec, bank), InvalidInput);
}
