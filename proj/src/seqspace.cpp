#include "microlocal/seqspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "microlocal/errors.hpp"

namespace microlocal {

namespace {

// Level-`level` array (row-major) reduced onto level-1 by summing or taking maxima over children.
std::vector<double> coarsen(const std::vector<double>& fine, int level, int dim, bool use_max) {
  const std::size_t per_axis = std::size_t{1} << (level - 1);
  std::vector<double> out(dim == 1 ? per_axis : per_axis * per_axis, 0.0);
  const auto merge = [use_max](double& acc, double v) { acc = use_max ? std::max(acc, v) : acc + v; };
  if (dim == 1) {
    for (std::size_t k = 0; k < fine.size(); ++k) merge(out[k >> 1], fine[k]);
  } else {
    const std::size_t fine_axis = per_axis * 2;
    for (std::size_t k0 = 0; k0 < fine_axis; ++k0)
      for (std::size_t k1 = 0; k1 < fine_axis; ++k1) merge(out[(k0 >> 1) * per_axis + (k1 >> 1)], fine[k0 * fine_axis + k1]);
  }
  return out;
}

// Aggregates a grid array onto every level 0..depth; result[j] has 2^(n j) entries.
std::vector<std::vector<double>> pyramid(std::vector<double> grid, int depth, int dim, bool use_max) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(depth) + 1);
  out[static_cast<std::size_t>(depth)] = std::move(grid);
  for (int j = depth; j > 0; --j) out[static_cast<std::size_t>(j) - 1] = coarsen(out[static_cast<std::size_t>(j)], j, dim, use_max);
  return out;
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericOverflow(std::string("non-finite value in ") + what);
}

// 2^(i s') g_i(x) w_i(x) for all levels.
std::vector<std::vector<double>> scaled_levels(const LevelField& field, const SpaceParams& params) {
  const Lattice lat(field.dim, field.depth, 0);
  std::vector<std::vector<double>> h(field.g.size());
  for (std::size_t i = 0; i < field.g.size(); ++i) {
    const double scale = std::exp2(static_cast<double>(i) * params.sprime);
    h[i].resize(field.g[i].size());
    for (std::size_t m = 0; m < h[i].size(); ++m) {
      double v = scale * field.g[i][m];
      if (params.tilde && params.sigma != 0.0 && v != 0.0)
        v *= weight(static_cast<int>(i), lat.grid_point(m), params.sigma, params.x0, field.dim);
      check_finite(v, "scaled level magnitudes");
      h[i][m] = v;
    }
  }
  return h;
}

void check_field(const LevelField& field) {
  require(field.dim >= 1 && field.dim <= kMaxDim, "level field dimension must be 1 or 2");
  require(field.g.size() == static_cast<std::size_t>(field.depth) + 1, "level field must hold levels 0..depth");
  const std::size_t n = std::size_t{1} << (field.dim * field.depth);
  for (const auto& lv : field.g) require(lv.size() == n, "level field arrays must cover the grid");
}

}  // namespace

double SpaceParams::j_exponent(int dim) const {
  const double m = family == Family::F ? std::min({1.0, p, q}) : std::min(1.0, p);
  return dim / m;
}

void SpaceParams::validate(int dim) const {
  require(p > 0.0 && q > 0.0, "p and q must be positive");
  require(std::isfinite(s) && std::isfinite(sprime) && std::isfinite(sigma), "s, s', sigma must be finite");
  for (int a = 0; a < dim; ++a) require(x0[a] >= 0.0 && x0[a] < 1.0, "x0 must lie in [0,1)^n");
}

double weight(int i, const Point& x, double sigma, const Point& x0, int dim) {
  if (sigma == 0.0) return 1.0;
  return std::pow(std::ldexp(1.0, -i) + torus_distance(x0, x, dim), -sigma);
}

std::vector<std::vector<double>> cube_aggregates(std::vector<double> grid, int dim, int depth, bool use_max) {
  require(grid.size() == (std::size_t{1} << (dim * depth)), "grid array has wrong length");
  return pyramid(std::move(grid), depth, dim, use_max);
}

CubeTable lp_norm_table(const SampledSignal& f, double p, int virtual_levels) {
  require(p > 0.0, "p must be positive");
  CubeTable table{Lattice(f.dim(), f.depth(), virtual_levels), {}};
  std::vector<double> base = f.magnitudes();
  const bool p_inf = std::isinf(p);
  if (!p_inf)
    for (auto& v : base) v = std::pow(v, p);
  const auto pyr = pyramid(std::move(base), f.depth(), f.dim(), p_inf);
  const double cell = std::ldexp(1.0, -f.dim() * f.depth());
  table.values.reserve(table.lattice.total_cube_count());
  for (const auto& lv : pyr)
    for (double v : lv) table.values.push_back(p_inf ? v : std::pow(v * cell, 1.0 / p));
  return table;
}

LevelField level_field(const CoefField& c) {
  LevelField f;
  f.dim = c.dim();
  f.depth = c.depth();
  const std::size_t n = std::size_t{1} << f.depth;
  const std::size_t total = std::size_t{1} << (f.dim * f.depth);
  f.g.resize(static_cast<std::size_t>(f.depth) + 1);
  for (int i = 0; i <= f.depth; ++i) {
    const auto& lv = c.level(i);
    auto& out = f.g[static_cast<std::size_t>(i)];
    out.resize(total);
    const int shift = f.depth - i;
    const std::size_t per_axis = std::size_t{1} << i;
    for (std::size_t m = 0; m < total; ++m) {
      const std::size_t k = f.dim == 1 ? (m >> shift) : ((m / n) >> shift) * per_axis + ((m % n) >> shift);
      out[m] = std::abs(lv[k]);
    }
  }
  return f;
}

CubeTable local_norm_table(const LevelField& field, const SpaceParams& params, int virtual_levels) {
  check_field(field);
  params.validate(field.dim);
  const int D = field.depth;
  const int dim = field.dim;
  CubeTable table{Lattice(dim, D, virtual_levels), {}};
  table.values.assign(table.lattice.total_cube_count(), 0.0);
  const auto h = scaled_levels(field, params);
  const double cell = std::ldexp(1.0, -dim * D);
  const double p = params.p;
  const double q = params.q;
  const bool p_inf = std::isinf(p);
  const bool q_inf = std::isinf(q);

  if (params.family == Family::B) {
    // acc[j][P] = sum_{i >= j} A_i(P)^q  (or max)
    std::vector<std::vector<double>> acc(static_cast<std::size_t>(D) + 1);
    for (int j = 0; j <= D; ++j) acc[static_cast<std::size_t>(j)].assign(table.lattice.cube_count(j), 0.0);
    for (int i = 0; i <= D; ++i) {
      std::vector<double> base(h[static_cast<std::size_t>(i)]);
      if (!p_inf)
        for (auto& v : base) v = std::pow(v, p);
      const auto pyr = pyramid(std::move(base), D, dim, p_inf);
      for (int j = 0; j <= i; ++j) {
        auto& a = acc[static_cast<std::size_t>(j)];
        const auto& lv = pyr[static_cast<std::size_t>(j)];
        for (std::size_t k = 0; k < a.size(); ++k) {
          const double norm_p = p_inf ? lv[k] : std::pow(lv[k] * cell, 1.0 / p);
          if (q_inf) {
            a[k] = std::max(a[k], norm_p);
          } else {
            a[k] += std::pow(norm_p, q);
          }
        }
      }
    }
    for (int j = 0; j <= D; ++j) {
      const auto& a = acc[static_cast<std::size_t>(j)];
      const std::size_t off = table.lattice.level_offset(j);
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double v = q_inf ? a[k] : std::pow(a[k], 1.0 / q);
        check_finite(v, "B-type local norm");
        table.values[off + k] = v;
      }
    }
    return table;
  }

  // F-type: T_j(x) = sum_{i >= j} h_i(x)^q, swept from the top level down.
  std::vector<double> t(h.front().size(), 0.0);
  for (int j = D; j >= 0; --j) {
    const auto& hj = h[static_cast<std::size_t>(j)];
    for (std::size_t m = 0; m < t.size(); ++m) t[m] = q_inf ? std::max(t[m], hj[m]) : t[m] + std::pow(hj[m], q);
    std::vector<double> base(t.size());
    double exponent_scale = 1.0;  // final power applied to the cube aggregate
    bool use_max = false;
    if (!p_inf) {
      for (std::size_t m = 0; m < t.size(); ++m) base[m] = std::pow(q_inf ? t[m] : std::pow(t[m], 1.0 / q), p);
      exponent_scale = 1.0 / p;
    } else if (!q_inf) {
      base = t;  // l(P)^{-n/q} ||G||_{L^q(P)}
      exponent_scale = 1.0 / q;
    } else {
      base = t;
      use_max = true;
    }
    auto pyr = pyramid(std::move(base), D, dim, use_max);
    const auto& lv = pyr[static_cast<std::size_t>(j)];
    const std::size_t off = table.lattice.level_offset(j);
    const double side_factor = (p_inf && !q_inf) ? std::exp2(static_cast<double>(j) * dim / q) : 1.0;
    for (std::size_t k = 0; k < lv.size(); ++k) {
      const double v = use_max ? lv[k] : side_factor * std::pow(lv[k] * cell, exponent_scale);
      check_finite(v, "F-type local norm");
      table.values[off + k] = v;
    }
  }
  return table;
}

double local_norm_direct(const LevelField& field, const DyadicCube& cube, const SpaceParams& params, int virtual_levels) {
  check_field(field);
  params.validate(field.dim);
  const Lattice lat(field.dim, field.depth, virtual_levels);
  lat.check_cube(cube);
  const int D = field.depth;
  const int jmin = std::max(cube.level, 0);
  const auto points = lat.grid_points_in(cube);
  const double cell = std::ldexp(1.0, -field.dim * D);
  const double p = params.p;
  const double q = params.q;
  const auto h = [&](int i, std::size_t m) {
    double v = std::exp2(i * params.sprime) * field.g[static_cast<std::size_t>(i)][m];
    if (params.tilde) v *= weight(i, lat.grid_point(m), params.sigma, params.x0, field.dim);
    return v;
  };
  double result = 0.0;
  if (params.family == Family::B) {
    double acc = 0.0;
    for (int i = jmin; i <= D; ++i) {
      double a = 0.0;
      for (auto m : points) a = std::isinf(p) ? std::max(a, h(i, m)) : a + std::pow(h(i, m), p) * cell;
      if (!std::isinf(p)) a = std::pow(a, 1.0 / p);
      acc = std::isinf(q) ? std::max(acc, a) : acc + std::pow(a, q);
    }
    result = std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
  } else {
    const auto pointwise = [&](std::size_t m) {
      double t = 0.0;
      for (int i = jmin; i <= D; ++i) t = std::isinf(q) ? std::max(t, h(i, m)) : t + std::pow(h(i, m), q);
      return t;  // sum of q-th powers (or max)
    };
    if (!std::isinf(p)) {
      double acc = 0.0;
      for (auto m : points) {
        const double t = pointwise(m);
        acc += std::pow(std::isinf(q) ? t : std::pow(t, 1.0 / q), p) * cell;
      }
      result = std::pow(acc, 1.0 / p);
    } else if (!std::isinf(q)) {
      double acc = 0.0;
      for (auto m : points) acc += pointwise(m) * cell;
      result = std::exp2(static_cast<double>(cube.level) * field.dim / q) * std::pow(acc, 1.0 / q);
    } else {
      for (auto m : points) result = std::max(result, pointwise(m));
    }
  }
  check_finite(result, "local norm");
  return result;
}

NormReport outer_sup(const CubeTable& table, const SpaceParams& params) {
  const Lattice& lat = table.lattice;
  NormReport r;
  r.params = params;
  r.depth = lat.depth();
  r.virtual_levels = lat.virtual_levels();
  const auto scaled = [&](const DyadicCube& p) { return std::exp2(p.level * params.s) * table.at(p); };

  // Global sup over P in (level, lexicographic k) order.
  double global_best = -1.0;
  DyadicCube global_witness;
  for (std::size_t g = 0; g < table.values.size(); ++g) {
    const DyadicCube p = lat.cube_from_global(g);
    const double v = scaled(p);
    if (v > global_best) {
      global_best = v;
      global_witness = p;
    }
  }
  if (params.tilde) {
    r.value = global_best;
    r.witness_P = global_witness;
    r.witness_Q = global_witness;
    check_finite(r.value, "outer norm");
    return r;
  }

  double best = -1.0;
  for (const DyadicCube& q : lat.cubes_containing(params.x0, lat.min_level(), lat.depth())) {
    const CubeRegion region = lat.triple(q);
    double inner = global_best;
    DyadicCube inner_witness = global_witness;
    if (!region.saturated) {
      inner = -1.0;
      for (int j = 0; j <= lat.depth(); ++j) {
        for (const DyadicCube& p : lat.cubes_in_region(region, j)) {
          const double v = scaled(p);
          if (v > inner) {
            inner = v;
            inner_witness = p;
          }
        }
      }
    }
    const double v = std::exp2(q.level * params.sigma) * inner;
    if (v > best) {
      best = v;
      r.witness_Q = q;
      r.witness_P = inner_witness;
    }
  }
  // Level D+1: 3Q still holds exactly one level-D cube, the parent of Q. Finer Q hold none.
  {
    const int fine = lat.depth() + 1;
    DyadicCube q{fine, {}};
    for (int a = 0; a < lat.dim(); ++a)
      q.k[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(std::floor(wrap_unit(params.x0[static_cast<std::size_t>(a)]) * std::ldexp(1.0, fine))) &
                                         ((std::int64_t{1} << fine) - 1);
    DyadicCube parent{lat.depth(), {}};
    for (int a = 0; a < lat.dim(); ++a) parent.k[static_cast<std::size_t>(a)] = q.k[static_cast<std::size_t>(a)] >> 1;
    const double v = std::exp2(fine * params.sigma) * scaled(parent);
    if (v > best) {
      best = v;
      r.witness_Q = q;
      r.witness_P = parent;
    }
  }
  r.value = best;
  check_finite(r.value, "outer norm");
  return r;
}

double local_seq_norm(const CoefField& c, const DyadicCube& p, const SpaceParams& params, int virtual_levels) {
  return local_norm_direct(level_field(c), p, params, virtual_levels);
}

NormReport outer_norm(const CoefField& c, const SpaceParams& params, int virtual_levels, bool keep_table) {
  require(c.all_finite(), "coefficient field contains non-finite values");
  CubeTable table = local_norm_table(level_field(c), params, virtual_levels);
  NormReport r = outer_sup(table, params);
  if (keep_table) r.per_cube = std::move(table);
  return r;
}

CoefField star_smoothing(const CoefField& c, double L) {
  require(L > 0.0, "star smoothing needs L > 0");
  const int dim = c.dim();
  CoefField out(dim, c.depth());
  for (int j = 0; j <= c.depth(); ++j) {
    const Lattice lat(dim, j, 0);
    const std::size_t count = lat.cube_count(j);
    // The kernel depends only on the torus offset between corners, so each level is a circular
    // convolution.
    std::vector<Complex> kernel(count), mags(count);
    for (std::size_t k = 0; k < count; ++k) {
      const double d = torus_distance(lat.grid_point(k), Point{}, dim);
      kernel[k] = std::pow(1.0 + std::ldexp(d, j), -L);
      mags[k] = std::abs(c.level(j)[k]);
    }
    const auto kh = forward_fft(kernel, dim, j);
    auto mh = forward_fft(mags, dim, j);
    for (std::size_t k = 0; k < count; ++k) mh[k] *= kh[k] * static_cast<double>(count);
    const auto conv = inverse_fft(mh, dim, j);
    auto& lv = out.level(j);
    for (std::size_t k = 0; k < count; ++k) lv[k] = std::max(conv[k].real(), 0.0);
  }
  return out;
}

SampledSignal maximal_mt(const SampledSignal& g, double t) {
  require(t > 0.0 && t <= 1.0, "maximal function exponent must lie in (0, 1]");
  const int dim = g.dim();
  const int D = g.depth();
  std::vector<double> base(g.size());
  for (std::size_t m = 0; m < base.size(); ++m) base[m] = std::pow(std::abs(g[m]), t);
  const auto pyr = pyramid(base, D, dim, false);
  const std::size_t n = std::size_t{1} << D;
  std::vector<Complex> out(g.size());
  for (std::size_t m = 0; m < out.size(); ++m) {
    double best = 0.0;
    for (int j = 0; j <= D; ++j) {
      const int shift = D - j;
      const std::size_t per_axis = std::size_t{1} << j;
      const std::size_t k = dim == 1 ? (m >> shift) : ((m / n) >> shift) * per_axis + ((m % n) >> shift);
      const double mean = pyr[static_cast<std::size_t>(j)][k] * std::ldexp(1.0, -dim * shift);
      best = std::max(best, std::pow(mean, 1.0 / t));
    }
    out[m] = best;
  }
  return SampledSignal(dim, D, std::move(out));
}

double almost_diagonal_bound(const Lattice& lattice, const DyadicCube& q, const DyadicCube& p,
                             const AlmostDiagonalParams& params) {
  const Point xq = lattice.geometry(q).corner;
  const Point xp = lattice.geometry(p).corner;
  const double d = torus_distance(xq, xp, lattice.dim());
  if (q.level >= p.level) {
    return std::exp2(-(q.level - p.level) * params.r1) * std::pow(1.0 + std::ldexp(d, p.level), -params.L);
  }
  return std::exp2(-(p.level - q.level) * params.r2) * std::pow(1.0 + std::ldexp(d, q.level), -params.L);
}

CubeMatrix CubeMatrix::dense(const Lattice& lattice, std::vector<double> entries) {
  CubeMatrix a(lattice);
  const std::size_t n = lattice.total_cube_count();
  require(entries.size() == n * n, "dense cube matrix has wrong size");
  for (double v : entries) require(std::isfinite(v), "cube matrix entries must be finite");
  a.entries_ = std::move(entries);
  return a;
}

CubeMatrix CubeMatrix::from_kernel(const Lattice& lattice, Kernel kernel) {
  require(static_cast<bool>(kernel), "empty kernel");
  CubeMatrix a(lattice);
  a.kernel_ = std::move(kernel);
  return a;
}

CubeMatrix CubeMatrix::identity(const Lattice& lattice) {
  return from_kernel(lattice, [](const DyadicCube& q, const DyadicCube& p) { return q == p ? 1.0 : 0.0; });
}

double CubeMatrix::entry(std::size_t row, std::size_t col) const {
  if (!kernel_) return entries_[row * size() + col];
  return kernel_(lattice_.cube_from_global(row), lattice_.cube_from_global(col));
}

CubeMatrix CubeMatrix::densified() const {
  const std::size_t n = size();
  std::vector<double> e(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) e[r * n + c] = entry(r, c);
  return dense(lattice_, std::move(e));
}

AlmostDiagonalReport is_almost_diagonal(const CubeMatrix& a, const AlmostDiagonalParams& params) {
  require(params.r1 >= 0.0 && params.r2 >= 0.0 && params.L > 0.0 && params.C > 0.0,
          "almost-diagonal parameters out of range");
  const Lattice& lat = a.lattice();
  const std::size_t n = a.size();
  std::vector<DyadicCube> cubes(n);
  for (std::size_t g = 0; g < n; ++g) cubes[g] = lat.cube_from_global(g);
  AlmostDiagonalReport rep;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double v = std::abs(a.entry(r, c));
      if (v == 0.0) continue;
      const double ratio = v / almost_diagonal_bound(lat, cubes[r], cubes[c], params);
      if (ratio > rep.smallest_C) {
        rep.smallest_C = ratio;
        rep.worst_Q = cubes[r];
        rep.worst_P = cubes[c];
      }
    }
  }
  rep.max_violation_ratio = rep.smallest_C / params.C;
  rep.passed = rep.max_violation_ratio <= 1.0 + 1e-12;
  return rep;
}

CoefField apply_matrix(const CubeMatrix& a, const CoefField& c) { return apply_matrix(a, std::vector<CoefField>{c}).front(); }

std::vector<CoefField> apply_matrix(const CubeMatrix& a, const std::vector<CoefField>& cs) {
  const Lattice& lat = a.lattice();
  const std::size_t n = a.size();
  std::vector<std::vector<Complex>> in(cs.size()), out(cs.size(), std::vector<Complex>(n));
  for (std::size_t v = 0; v < cs.size(); ++v) {
    require(cs[v].dim() == lat.dim() && cs[v].depth() == lat.depth(), "matrix and coefficient shapes differ");
    in[v].reserve(n);
    for (const auto& lv : cs[v].levels()) in[v].insert(in[v].end(), lv.begin(), lv.end());
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double e = a.entry(r, c);
      if (e == 0.0) continue;
      for (std::size_t v = 0; v < cs.size(); ++v) out[v][r] += e * in[v][c];
    }
  }
  std::vector<CoefField> result;
  result.reserve(cs.size());
  for (auto& flat : out) {
    CoefField f(lat.dim(), lat.depth());
    for (int j = 0; j <= lat.depth(); ++j) {
      const std::size_t off = lat.level_offset(j);
      std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
                flat.begin() + static_cast<std::ptrdiff_t>(off + lat.cube_count(j)), f.level(j).begin());
    }
    result.push_back(std::move(f));
  }
  return result;
}

CubeMatrix gram_matrix(const Lattice& lattice, const CubeFamily& fam1, const CubeFamily& fam2) {
  const std::size_t n = lattice.total_cube_count();
  std::vector<DyadicCube> cubes(n);
  std::vector<SampledSignal> a(n), b(n);
  for (std::size_t g = 0; g < n; ++g) {
    cubes[g] = lattice.cube_from_global(g);
    a[g] = fam1(cubes[g]);
    b[g] = fam2(cubes[g]);
    require(a[g].size() == lattice.point_count() && b[g].size() == lattice.point_count(),
            "family members must be sampled on the lattice grid");
  }
  const double cell = 1.0 / static_cast<double>(lattice.point_count());
  std::vector<double> e(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      Complex acc{};
      const auto& u = a[r].values();
      const auto& v = b[c].values();
      for (std::size_t m = 0; m < u.size(); ++m) acc += u[m] * std::conj(v[m]);
      const int finer = std::max(cubes[r].level, cubes[c].level);
      e[r * n + c] = std::ldexp(acc.real() * cell, lattice.dim() * finer);
    }
  }
  return CubeMatrix::dense(lattice, std::move(e));
}

}  // namespace microlocal
