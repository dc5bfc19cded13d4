#include <cmath>
#include <random>

#include "doctest.h"
#include "microlocal/seqspace.hpp"

using namespace microlocal;

namespace {

CoefField random_field(int dim, int depth, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  CoefField c(dim, depth);
  for (int j = 0; j <= depth; ++j)
    for (auto& v : c.level(j)) v = gauss(rng) * std::exp2(-0.5 * j);
  return c;
}

std::vector<SpaceParams> param_grid() {
  std::vector<SpaceParams> out;
  for (Family fam : {Family::B, Family::F})
    for (bool tilde : {false, true})
      for (double p : {0.5, 1.0, 2.0, kInf})
        for (double q : {0.7, 2.0, kInf}) {
          SpaceParams sp;
          sp.family = fam;
          sp.tilde = tilde;
          sp.p = p;
          sp.q = q;
          sp.s = 0.2;
          sp.sprime = 0.4;
          sp.sigma = tilde ? 0.3 : -0.2;
          sp.x0 = {0.4, 0.7};
          out.push_back(sp);
        }
  return out;
}

}  // namespace

TEST_CASE("weight") {
  CHECK(weight(3, {0.2, 0}, 0.0, {0.7, 0}, 1) == 1.0);
  CHECK(weight(3, {0.3, 0}, 1.0, {0.3, 0}, 1) == doctest::Approx(8.0));
  CHECK(weight(2, {0.0, 0}, 2.0, {0.5, 0}, 1) == doctest::Approx(16.0 / 9.0));
}

TEST_CASE("single coefficient local norm") {
  const int D = 6, i0 = 4;
  CoefField c(1, D);
  c.level(i0)[5] = 1.0;
  SpaceParams sp;
  sp.sprime = 0.7;
  sp.p = 1.5;
  sp.q = 3.0;
  const double expect = std::exp2(i0 * 0.7) * std::exp2(-i0 / 1.5);
  for (Family fam : {Family::B, Family::F}) {
    sp.family = fam;
    CHECK(local_seq_norm(c, {2, {1, 0}}, sp) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(local_seq_norm(c, {4, {5, 0}}, sp) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(local_seq_norm(CoefField(1, D), {0, {0, 0}}, sp) == 0.0);
}

TEST_CASE("table engine matches direct evaluation") {
  for (int dim = 1; dim <= 2; ++dim) {
    const int D = dim == 1 ? 6 : 4;
    const auto c = random_field(dim, D, 11 + dim);
    const auto field = level_field(c);
    for (const auto& sp : param_grid()) {
      const auto table = local_norm_table(field, sp, 2);
      for (std::size_t g = 0; g < table.values.size(); ++g) {
        const DyadicCube p = table.lattice.cube_from_global(g);
        CHECK(table.values[g] == doctest::Approx(local_norm_direct(field, p, sp, 2)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("outer norm") {
  const int D = 6;
  SpaceParams sp;
  auto zero = outer_norm(CoefField(1, D), sp);
  CHECK(zero.value == 0.0);
  CHECK(zero.witness_Q == DyadicCube{-4, {0, 0}});
  CHECK(zero.witness_P == DyadicCube{0, {0, 0}});

  const auto c = random_field(1, D, 5);
  // s = sigma = 0 collapses to the max local norm
  const auto r0 = outer_norm(c, sp, 4, true);
  double mx = 0.0;
  for (double v : r0.per_cube->values) mx = std::max(mx, v);
  CHECK(r0.value == mx);

  // each added virtual level multiplies by 2^0.5 when sigma = -0.5
  sp.sigma = -0.5;
  sp.x0 = {0.3, 0};
  for (int m = 0; m < 4; ++m) {
    const double a = outer_norm(c, sp, m).value;
    const double b = outer_norm(c, sp, m + 1).value;
    CHECK(std::abs(b / a / std::sqrt(2.0) - 1.0) < 1e-12);
  }

  // value reproduces the witness formula
  sp.sigma = 0.4;
  sp.s = -0.3;
  const auto r = outer_norm(c, sp, 4, true);
  const double rebuilt = std::exp2(r.witness_Q.level * sp.sigma) * std::exp2(r.witness_P.level * sp.s) *
                         r.per_cube->at(r.witness_P);
  CHECK(r.value == doctest::Approx(rebuilt).epsilon(1e-14));
}

TEST_CASE("lq monotonicity and Minkowski") {
  const auto c = random_field(1, 7, 8);
  const auto field = level_field(c);
  for (Family fam : {Family::B, Family::F}) {
    SpaceParams a, b;
    a.family = b.family = fam;
    a.q = 1.0;
    b.q = 3.0;
    const auto ta = local_norm_table(field, a), tb = local_norm_table(field, b);
    for (std::size_t g = 0; g < ta.values.size(); ++g) CHECK(tb.values[g] <= ta.values[g] * (1 + 1e-12));
  }
  SpaceParams bt, ft;
  bt.p = ft.p = 3.0;
  bt.q = ft.q = 1.5;
  ft.family = Family::F;
  const auto tb = local_norm_table(field, bt), tf = local_norm_table(field, ft);
  for (std::size_t g = 0; g < tb.values.size(); ++g) CHECK(tf.values[g] <= tb.values[g] * (1 + 1e-12));
}

TEST_CASE("star smoothing") {
  const int D = 5;
  CoefField c(1, D);
  c.level(3)[2] = 1.0;
  const auto s = star_smoothing(c, 2.0);
  CHECK(s.level(3)[2].real() == doctest::Approx(1.0));
  for (std::size_t k = 0; k < 8; ++k) {
    const double d = torus_distance({k / 8.0, 0}, {0.25, 0}, 1);
    CHECK(s.level(3)[k].real() == doctest::Approx(std::pow(1 + 8 * d, -2.0)));
  }
  const auto r = random_field(1, D, 2);
  const auto rs = star_smoothing(r, 1.5);
  for (int j = 0; j <= D; ++j)
    for (std::size_t k = 0; k < r.level(j).size(); ++k) CHECK(std::abs(r.level(j)[k]) <= rs.level(j)[k].real() * (1 + 1e-12));
  CoefField flat(1, D);
  for (auto& v : flat.level(4)) v = 1.0;
  const auto fs = star_smoothing(flat, 2.0);
  double lattice_sum = 0.0;
  for (int k = 0; k < 16; ++k) lattice_sum += std::pow(1 + 16 * torus_distance({k / 16.0, 0}, {0, 0}, 1), -2.0);
  for (const auto& v : fs.level(4)) CHECK(v.real() == doctest::Approx(lattice_sum));
}

TEST_CASE("maximal function") {
  const int D = 8;
  std::vector<double> ones(256, 1.0), ind(256, 0.0);
  for (int m = 0; m < 32; ++m) ind[static_cast<std::size_t>(m)] = 1.0;
  const auto m1 = maximal_mt(SampledSignal::from_real(1, D, ones), 0.5);
  CHECK(m1[100].real() == doctest::Approx(1.0));
  const auto m2 = maximal_mt(SampledSignal::from_real(1, D, ind), 1.0);
  CHECK(m2[static_cast<std::size_t>(0.9 * 256)].real() == doctest::Approx(0.125));
  CHECK(m2[3].real() == doctest::Approx(1.0));
}

TEST_CASE("almost diagonal matrices") {
  const Lattice lat(1, 4, 0);
  AlmostDiagonalParams ad{1.0, 2.0, 3.0, 1.0};
  const auto id = CubeMatrix::identity(lat);
  CHECK(is_almost_diagonal(id, ad).passed);
  CHECK(is_almost_diagonal(id, ad).smallest_C == doctest::Approx(1.0));
  const auto ones = CubeMatrix::from_kernel(lat, [](const DyadicCube&, const DyadicCube&) { return 1.0; });
  const auto rep = is_almost_diagonal(ones, ad);
  CHECK_FALSE(rep.passed);
  CHECK(rep.smallest_C > 10.0);

  const auto c = random_field(1, 4, 9);
  const auto same = apply_matrix(id, c);
  for (int j = 0; j <= 4; ++j)
    for (std::size_t k = 0; k < c.level(j).size(); ++k) CHECK(same.level(j)[k] == c.level(j)[k]);

  const auto diag = CubeMatrix::from_kernel(lat, [](const DyadicCube& q, const DyadicCube& p) {
    return q == p ? std::ldexp(1.0, -q.level) : 0.0;
  });
  const auto scaled = apply_matrix(diag, c);
  for (int j = 0; j <= 4; ++j)
    for (std::size_t k = 0; k < c.level(j).size(); ++k) CHECK(std::abs(scaled.level(j)[k] - std::ldexp(1.0, -j) * c.level(j)[k]) < 1e-15);

  // star smoothing as a matrix acting on |c|
  CoefField mags(1, 4);
  for (int j = 0; j <= 4; ++j)
    for (std::size_t k = 0; k < c.level(j).size(); ++k) mags.level(j)[k] = std::abs(c.level(j)[k]);
  const double L = 2.5;
  const auto star = CubeMatrix::from_kernel(lat, [&](const DyadicCube& q, const DyadicCube& p) {
    if (q.level != p.level) return 0.0;
    const double d = torus_distance(lat.geometry(q).corner, lat.geometry(p).corner, 1);
    return std::pow(1 + std::ldexp(d, q.level), -L);
  });
  const auto via_matrix = apply_matrix(star, mags);
  const auto via_fft = star_smoothing(c, L);
  for (int j = 0; j <= 4; ++j)
    for (std::size_t k = 0; k < c.level(j).size(); ++k) CHECK(std::abs(via_matrix.level(j)[k] - via_fft.level(j)[k]) < 1e-12);

  // dense and kernel forms agree, batch apply agrees with single apply
  const auto dense = star.densified();
  const auto batch = apply_matrix(dense, std::vector<CoefField>{mags, c});
  CHECK(std::abs(batch[0].level(3)[5] - via_matrix.level(3)[5]) < 1e-14);
}

TEST_CASE("gram matrix") {
  const Lattice lat(1, 4, 0);
  const auto bump = [&](const DyadicCube&) {
    std::vector<double> v(16, 0.0);
    v[3] = 1.0;
    v[4] = 2.0;
    return SampledSignal::from_real(1, 4, v);
  };
  const auto g = gram_matrix(lat, bump, bump);
  const DyadicCube p{2, {1, 0}};
  const std::size_t i = lat.global_index(p);
  CHECK(g.entry(i, i) == doctest::Approx(4.0 * 5.0 / 16.0));
}

TEST_CASE("outer sup reaches one level below the grid") {
  const int D = 6;
  CoefField c(1, D);
  c.level(D)[19] = 1.0;
  SpaceParams sp;
  sp.sigma = 0.5;
  sp.x0 = {(19 + 0.75) / 64.0, 0};
  const auto r = outer_norm(c, sp, 4, true);
  CHECK(r.witness_Q.level == D + 1);
  CHECK(r.witness_Q.k[0] == 2 * 19 + 1);
  CHECK(r.witness_P == DyadicCube{D, {19, 0}});
  CHECK(r.value == doctest::Approx(std::exp2((D + 1) * 0.5) * r.per_cube->at(r.witness_P)).epsilon(1e-14));
}
