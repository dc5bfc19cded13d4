#include "microlocal/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "microlocal/errors.hpp"
#include "microlocal/funcnorm.hpp"

namespace microlocal {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t negative_bin(std::size_t m, int dim, std::size_t n) {
  if (dim == 1) return (n - m) % n;
  const std::size_t a = m / n;
  const std::size_t b = m % n;
  return ((n - a) % n) * n + (n - b) % n;
}

void require_1d(const SampledSignal& f, const char* what) {
  require(f.dim() == 1, std::string(what) + " is implemented for n = 1 only");
}

// Centred finite-difference stencil of order `order` on offsets -order..order (unit step).
std::vector<double> derivative_stencil(int order) {
  std::vector<double> c{1.0};
  const auto convolve = [&c](const std::vector<double>& k) {
    std::vector<double> out(c.size() + k.size() - 1, 0.0);
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = 0; b < k.size(); ++b) out[a + b] += c[a] * k[b];
    c = std::move(out);
  };
  for (int r = order; r >= 2; r -= 2) convolve({1.0, -2.0, 1.0});
  if (order % 2 == 1) convolve({-0.5, 0.0, 0.5});
  // Pad odd orders (radius (order+1)/2 from D1 D2^a) out to radius `order` for a uniform layout.
  const std::size_t want = static_cast<std::size_t>(2 * order + 1);
  if (c.size() < want) {
    const std::size_t pad = (want - c.size()) / 2;
    std::vector<double> out(want, 0.0);
    std::copy(c.begin(), c.end(), out.begin() + static_cast<std::ptrdiff_t>(pad));
    c = std::move(out);
  }
  return c;
}

std::size_t wrap_index(long long m, std::size_t n) {
  const long long nn = static_cast<long long>(n);
  return static_cast<std::size_t>(((m % nn) + nn) % nn);
}

long long cell_distance(long long a, long long b, std::size_t n) {
  const long long d = static_cast<long long>(wrap_index(a - b, n));
  return std::min(d, static_cast<long long>(n) - d);
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    sx += x[a];
    sy += y[a];
    sxx += x[a] * x[a];
    sxy += x[a] * y[a];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Orthonormal polynomial basis (degree 0..degree) on the ball points t = o / R, discrete inner
// product; rows indexed by basis element.
struct BallBasis {
  std::vector<long long> offsets;
  std::vector<std::vector<double>> q;
};

BallBasis ball_basis(int depth, int i, int degree) {
  BallBasis b;
  b.offsets = ball_offsets(depth, i);
  require(b.offsets.size() >= static_cast<std::size_t>(degree) + 1, "ball too small for the polynomial degree");
  const double radius = std::ldexp(1.0, depth - i);
  std::vector<double> t(b.offsets.size());
  for (std::size_t a = 0; a < t.size(); ++a) t[a] = static_cast<double>(b.offsets[a]) / radius;
  for (int d = 0; d <= degree; ++d) {
    std::vector<double> v(t.size());
    for (std::size_t a = 0; a < t.size(); ++a) v[a] = std::pow(t[a], d);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : b.q) {
        double dot = 0.0;
        for (std::size_t a = 0; a < v.size(); ++a) dot += u[a] * v[a];
        for (std::size_t a = 0; a < v.size(); ++a) v[a] -= dot * u[a];
      }
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    require(norm > 1e-10 * std::sqrt(static_cast<double>(v.size())), "degenerate moment system on the ball");
    for (double& x : v) x /= norm;
    b.q.push_back(std::move(v));
  }
  return b;
}

std::vector<Complex> ball_values(const SampledSignal& f, std::size_t x, const std::vector<long long>& offsets) {
  std::vector<Complex> v(offsets.size());
  for (std::size_t a = 0; a < offsets.size(); ++a)
    v[a] = f[wrap_index(static_cast<long long>(x) + offsets[a], f.size())];
  return v;
}

std::vector<Complex> projection_residual(const std::vector<Complex>& v, const std::vector<std::vector<double>>& q) {
  std::vector<Complex> r(v);
  for (const auto& u : q) {
    Complex dot{};
    for (std::size_t a = 0; a < r.size(); ++a) dot += u[a] * r[a];
    for (std::size_t a = 0; a < r.size(); ++a) r[a] -= dot * u[a];
  }
  return r;
}

double residual_norm(const std::vector<Complex>& r, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& z : r) m = std::max(m, std::abs(z));
    return m;
  }
  double acc = 0.0;
  for (const auto& z : r) acc += std::pow(std::abs(z), p);
  return std::pow(acc / static_cast<double>(r.size()), 1.0 / p);
}

// Best uniform polynomial approximation by Lawson's iteratively reweighted least squares.
double lawson_minimax(const std::vector<Complex>& v, const BallBasis& b, int iterations = 200) {
  const std::size_t n = v.size();
  const std::size_t dim = b.q.size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  double best = kInf;
  for (int it = 0; it < iterations; ++it) {
    // Weighted least squares in the orthonormal basis: normal equations G c = r.
    std::vector<double> g(dim * dim, 0.0);
    std::vector<Complex> rhs(dim);
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t c = 0; c <= a; ++c) {
        double s = 0.0;
        for (std::size_t m = 0; m < n; ++m) s += w[m] * b.q[a][m] * b.q[c][m];
        g[a * dim + c] = g[c * dim + a] = s;
      }
      Complex s{};
      for (std::size_t m = 0; m < n; ++m) s += w[m] * b.q[a][m] * v[m];
      rhs[a] = s;
    }
    // Gaussian elimination with partial pivoting (dim is tiny).
    std::vector<Complex> coef(rhs);
    std::vector<double> mat(g);
    bool singular = false;
    for (std::size_t col = 0; col < dim; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < dim; ++r)
        if (std::abs(mat[r * dim + col]) > std::abs(mat[piv * dim + col])) piv = r;
      if (std::abs(mat[piv * dim + col]) < 1e-300) {
        singular = true;
        break;
      }
      if (piv != col) {
        for (std::size_t c = 0; c < dim; ++c) std::swap(mat[piv * dim + c], mat[col * dim + c]);
        std::swap(coef[piv], coef[col]);
      }
      for (std::size_t r = col + 1; r < dim; ++r) {
        const double factor = mat[r * dim + col] / mat[col * dim + col];
        for (std::size_t c = col; c < dim; ++c) mat[r * dim + c] -= factor * mat[col * dim + c];
        coef[r] -= factor * coef[col];
      }
    }
    if (singular) break;
    for (std::size_t col = dim; col-- > 0;) {
      for (std::size_t c = col + 1; c < dim; ++c) coef[col] -= mat[col * dim + c] * coef[c];
      coef[col] /= mat[col * dim + col];
    }
    std::vector<double> err(n);
    double total = 0.0;
    double emax = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      Complex fit{};
      for (std::size_t a = 0; a < dim; ++a) fit += coef[a] * b.q[a][m];
      err[m] = std::abs(v[m] - fit);
      emax = std::max(emax, err[m]);
    }
    best = std::min(best, emax);
    if (emax == 0.0) break;
    for (std::size_t m = 0; m < n; ++m) {
      w[m] *= err[m];
      total += w[m];
    }
    if (!(total > 0.0)) break;
    for (double& x : w) x /= total;
  }
  return best;
}

}  // namespace

// ---- Fourier multipliers ---------------------------------------------------------------------

SampledSignal apply_multiplier(const SampledSignal& f, const std::vector<Complex>& m) {
  require(m.size() == f.size(), "multiplier length must match the signal");
  auto spec = forward_fft(f.values(), f.dim(), f.depth());
  for (std::size_t b = 0; b < spec.size(); ++b) spec[b] *= m[b];
  auto out = inverse_fft(spec, f.dim(), f.depth());
  if (f.is_real()) {
    const std::size_t n = f.points_per_axis();
    double scale = 0.0;
    double asym = 0.0;
    for (std::size_t b = 0; b < m.size(); ++b) {
      scale = std::max(scale, std::abs(m[b]));
      asym = std::max(asym, std::abs(m[negative_bin(b, f.dim(), n)] - std::conj(m[b])));
    }
    if (asym <= 1e-14 * std::max(scale, 1.0))
      for (auto& z : out) z = Complex(z.real(), 0.0);
  }
  return SampledSignal(f.dim(), f.depth(), std::move(out));
}

std::vector<Complex> bessel_multiplier(int dim, int depth, double mu) {
  const std::size_t total = std::size_t{1} << (dim * depth);
  std::vector<Complex> m(total);
  for (std::size_t b = 0; b < total; ++b) {
    const double r = kTwoPi * radial_frequency(b, dim, depth);
    m[b] = std::pow(1.0 + r * r, mu / 2.0);
  }
  return m;
}

SampledSignal bessel_potential(const SampledSignal& f, double mu) {
  require(std::isfinite(mu), "mu must be finite");
  return apply_multiplier(f, bessel_multiplier(f.dim(), f.depth(), mu));
}

std::vector<Complex> hilbert_multiplier(int depth) {
  require(depth >= 3, "Hilbert multiplier needs depth >= 3");
  const std::size_t n = std::size_t{1} << depth;
  std::vector<Complex> m(n);
  const double quarter = static_cast<double>(n) / 4.0;
  for (std::size_t b = 0; b < n; ++b) {
    const double xi = static_cast<double>(bin_frequency(b, n));
    const double a = std::abs(xi);
    const double amp = (1.0 - bump_profile(2.0 * a)) * bump_profile(a / quarter);
    m[b] = Complex(0.0, -(xi > 0 ? 1.0 : (xi < 0 ? -1.0 : 0.0)) * amp);
  }
  return m;
}

std::vector<double> multiplier_kernel(const std::vector<Complex>& m, int depth) {
  require(m.size() == (std::size_t{1} << depth), "multiplier length must be 2^depth");
  const auto k = inverse_fft(m, 1, depth);
  std::vector<double> out(k.size());
  for (std::size_t a = 0; a < k.size(); ++a) out[a] = k[a].real();
  return out;
}

// ---- Pseudo-differential operators -----------------------------------------------------------

SymbolGrid SymbolGrid::from_function(int depth, double mu, const std::function<Complex(double, double)>& a) {
  require(depth >= 1, "symbol grid needs depth >= 1");
  SymbolGrid g;
  g.depth = depth;
  g.mu = mu;
  const std::size_t n = g.points();
  g.values.resize(n * n);
  for (std::size_t m = 0; m < n; ++m) {
    const double x = static_cast<double>(m) / static_cast<double>(n);
    for (std::size_t c = 0; c < n; ++c) {
      const Complex v = a(x, static_cast<double>(c) - static_cast<double>(n / 2));
      require(std::isfinite(v.real()) && std::isfinite(v.imag()), "symbol values must be finite");
      g.values[m * n + c] = v;
    }
  }
  return g;
}

SymbolGrid SymbolGrid::load_csv(const std::string& path, double mu) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open symbol file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw InvalidInput("malformed number in symbol file: '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  require(n >= 2 && (n & (n - 1)) == 0, "symbol file must have 2^D rows");
  SymbolGrid g;
  g.depth = static_cast<int>(std::countr_zero(n));
  g.mu = mu;
  g.values.resize(n * n);
  for (std::size_t m = 0; m < n; ++m) {
    const auto& row = rows[m];
    require(row.size() == n || row.size() == 2 * n, "symbol row must hold N reals or N re,im pairs");
    const bool cplx = row.size() == 2 * n;
    for (std::size_t c = 0; c < n; ++c) {
      const Complex v = cplx ? Complex(row[2 * c], row[2 * c + 1]) : Complex(row[c], 0.0);
      require(std::isfinite(v.real()) && std::isfinite(v.imag()), "symbol values must be finite");
      g.values[m * n + c] = v;
    }
  }
  return g;
}

void SymbolGrid::save_csv(const std::string& path) const {
  std::ofstream out(path);
  require(static_cast<bool>(out), "cannot write symbol file " + path);
  out.precision(17);
  const std::size_t n = points();
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t c = 0; c < n; ++c) {
      if (c) out << ',';
      out << values[m * n + c].real() << ',' << values[m * n + c].imag();
    }
    out << '\n';
  }
}

SampledSignal apply_pseudo_diff(const SampledSignal& f, const SymbolGrid& a) {
  require_1d(f, "apply_pseudo_diff");
  require(a.depth == f.depth(), "symbol grid depth must match the signal");
  const std::size_t n = f.size();
  require(a.values.size() == n * n, "symbol grid has wrong size");
  const auto fhat = forward_fft(f.values(), 1, f.depth());
  std::vector<Complex> twiddle(n);
  for (std::size_t t = 0; t < n; ++t) twiddle[t] = std::polar(1.0, kTwoPi * static_cast<double>(t) / static_cast<double>(n));
  // Column c carries frequency xi = c - N/2, stored in FFT bin (xi mod N).
  std::vector<Complex> spec(n);
  for (std::size_t c = 0; c < n; ++c) spec[c] = fhat[(c + n / 2) % n];
  std::vector<Complex> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    Complex acc{};
    const Complex* row = a.values.data() + m * n;
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t bin = (c + n / 2) % n;
      acc += twiddle[(m * bin) % n] * row[c] * spec[c];
    }
    out[m] = acc;
  }
  return SampledSignal(1, f.depth(), std::move(out));
}

std::vector<SymbolSeminorm> validate_symbol_class(const SymbolGrid& a, double mu, int max_order) {
  require(max_order >= 0, "max_order must be nonnegative");
  const std::size_t n = a.points();
  require(a.values.size() == n * n, "symbol grid has wrong size");
  require(static_cast<std::size_t>(2 * max_order + 1) <= n, "orders exceed the grid");
  const double h = 1.0 / static_cast<double>(n);
  std::vector<SymbolSeminorm> out;
  for (int alpha = 0; alpha <= max_order; ++alpha) {
    const auto sx = derivative_stencil(alpha);
    for (int beta = 0; beta <= max_order; ++beta) {
      const auto sxi = derivative_stencil(beta);
      double sup = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t c = static_cast<std::size_t>(beta); c + static_cast<std::size_t>(beta) < n; ++c) {
          Complex d{};
          for (int ox = -alpha; ox <= alpha; ++ox) {
            const double wx = sx[static_cast<std::size_t>(ox + alpha)];
            if (wx == 0.0) continue;
            const std::size_t row = wrap_index(static_cast<long long>(m) + ox, n);
            for (int oxi = -beta; oxi <= beta; ++oxi) {
              const double wxi = sxi[static_cast<std::size_t>(oxi + beta)];
              if (wxi == 0.0) continue;
              d += wx * wxi * a.values[row * n + c + static_cast<std::size_t>(oxi)];
            }
          }
          d /= std::pow(h, alpha);
          const double xi = std::abs(static_cast<double>(c) - static_cast<double>(n / 2));
          sup = std::max(sup, std::pow(1.0 + xi, -mu - alpha + beta) * std::abs(d));
        }
      }
      out.push_back({alpha, beta, sup});
    }
  }
  return out;
}

// ---- Calderon-Zygmund kernels ----------------------------------------------------------------

CZKernelSample CZKernelSample::convolution(int depth, std::vector<double> k, int r1, int r2, double epsilon) {
  require(k.size() == (std::size_t{1} << depth), "kernel length must be 2^depth");
  CZKernelSample s;
  s.depth = depth;
  s.r1 = r1;
  s.r2 = r2;
  s.epsilon = epsilon;
  const std::size_t n = k.size();
  s.kernel = [k = std::move(k), n](std::size_t i, std::size_t j) { return k[(i + n - j) % n]; };
  return s;
}

CZReport validate_cz_kernel(const CZKernelSample& ks) {
  require(ks.depth >= 4, "kernel validation needs depth >= 4");
  require(ks.r1 >= 0 && ks.r2 >= 0 && ks.epsilon > 0.0, "need r1, r2 >= 0 and epsilon > 0");
  require(static_cast<bool>(ks.kernel), "kernel callback missing");
  const std::size_t n = std::size_t{1} << ks.depth;
  const double h = 1.0 / static_cast<double>(n);
  const int r1 = ks.r1;
  const double e2 = ks.r2 + ks.epsilon;
  const long long min_sep = 2 + r1;
  const std::size_t stride = std::max<std::size_t>(1, n / 64);

  std::vector<std::vector<double>> stencils;
  for (int g = 0; g <= r1; ++g) stencils.push_back(derivative_stencil(g));
  const auto dx = [&](long long i, std::size_t j, int g) {
    const auto& st = stencils[static_cast<std::size_t>(g)];
    double acc = 0.0;
    for (int o = -g; o <= g; ++o) {
      const double w = st[static_cast<std::size_t>(o + g)];
      if (w != 0.0) acc += w * ks.kernel(wrap_index(i + o, n), j);
    }
    return acc / std::pow(h, g);
  };

  CZReport rep;
  rep.size_constants.assign(static_cast<std::size_t>(r1) + 1, 0.0);
  rep.mixed_constants.assign(static_cast<std::size_t>(r1), 0.0);
  rep.x_smoothness_constants.assign(static_cast<std::size_t>(r1) + 1, 0.0);

  // Envelope bins [16h 2^b, 16h 2^(b+1)) up to 1/8.
  std::vector<double> bin_lo;
  for (double d = 16.0 * h; 2.0 * d <= 0.125 + 1e-15; d *= 2.0) bin_lo.push_back(d);
  std::vector<std::vector<double>> envelope(static_cast<std::size_t>(r1) + 1, std::vector<double>(bin_lo.size(), 0.0));

  std::vector<long long> shifts;
  for (long long d = 1; 2 * d <= static_cast<long long>(n / 2); d *= 2) {
    shifts.push_back(d);
    shifts.push_back(-d);
  }

  for (std::size_t i = 0; i < n; i += stride) {
    const long long ii = static_cast<long long>(i);
    for (std::size_t j = 0; j < n; ++j) {
      const long long sep = cell_distance(ii, static_cast<long long>(j), n);
      if (sep < min_sep) continue;
      const double dist = static_cast<double>(sep) * h;
      std::vector<double> dk(static_cast<std::size_t>(r1) + 1);
      for (int g = 0; g <= r1; ++g) {
        dk[static_cast<std::size_t>(g)] = dx(ii, j, g);
        const double v = std::abs(dk[static_cast<std::size_t>(g)]);
        auto& c = rep.size_constants[static_cast<std::size_t>(g)];
        c = std::max(c, v * std::pow(dist, 1.0 + g));
        for (std::size_t b = 0; b < bin_lo.size(); ++b)
          if (dist >= bin_lo[b] && dist < 2.0 * bin_lo[b])
            envelope[static_cast<std::size_t>(g)][b] = std::max(envelope[static_cast<std::size_t>(g)][b], v);
      }
      for (long long d : shifts) {
        if (2 * std::llabs(d) > sep) continue;
        const double du = static_cast<double>(std::llabs(d)) * h;
        // y-variation
        const std::size_t jp = wrap_index(static_cast<long long>(j) + d, n);
        if (cell_distance(ii, static_cast<long long>(jp), n) >= min_sep) {
          const double diff0 = std::abs(ks.kernel(i, j) - ks.kernel(i, jp));
          rep.y_smoothness_constant =
              std::max(rep.y_smoothness_constant, diff0 * std::pow(dist, 1.0 + e2) / std::pow(du, e2));
          for (int g = 1; g <= r1; ++g) {
            const double diff = std::abs(dk[static_cast<std::size_t>(g)] - dx(ii, jp, g));
            auto& c = rep.mixed_constants[static_cast<std::size_t>(g) - 1];
            c = std::max(c, diff * std::pow(dist, 1.0 + g + ks.epsilon) / std::pow(du, ks.epsilon));
          }
        }
        // x-variation
        const long long ip = ii + d;
        if (cell_distance(ip, static_cast<long long>(j), n) >= min_sep) {
          for (int g = 0; g <= r1; ++g) {
            const double diff = std::abs(dk[static_cast<std::size_t>(g)] - dx(ip, j, g));
            auto& c = rep.x_smoothness_constants[static_cast<std::size_t>(g)];
            c = std::max(c, diff * std::pow(dist, 1.0 + g + ks.epsilon) / std::pow(du, ks.epsilon));
          }
        }
      }
    }
  }

  rep.finite = std::isfinite(rep.y_smoothness_constant);
  for (const auto* v : {&rep.size_constants, &rep.mixed_constants, &rep.x_smoothness_constants})
    for (double c : *v) rep.finite = rep.finite && std::isfinite(c);

  bool decay_ok = true;
  for (int g = 0; g <= r1; ++g) {
    std::vector<double> lx, ly;
    for (std::size_t b = 0; b < bin_lo.size(); ++b) {
      const double e = envelope[static_cast<std::size_t>(g)][b];
      if (e > 0.0) {
        lx.push_back(std::log(bin_lo[b]));
        ly.push_back(std::log(e));
      }
    }
    double exponent = std::numeric_limits<double>::quiet_NaN();
    if (lx.size() >= 2) exponent = -least_squares_slope(lx, ly);
    // A derivative that vanishes identically decays at any rate.
    if (lx.empty()) exponent = kInf;
    rep.decay_exponents.push_back(exponent);
    if (!(exponent >= 1.0 + g - 0.25)) decay_ok = false;
  }
  rep.passed = rep.finite && decay_ok;
  return rep;
}

// ---- Differences and oscillations ------------------------------------------------------------

void DifferenceSpec::validate() const {
  require(k >= 1, "k must be >= 1");
  require(p >= 1.0, "p must lie in [1, inf]");
  require(sprime > 0.0 && static_cast<double>(k) > sprime, "need k > s' > 0");
}

namespace {

// (-1)^(k-r) C(k, r)
std::vector<double> difference_weights(int k) {
  std::vector<double> w(static_cast<std::size_t>(k) + 1);
  double c = 1.0;
  for (int r = 0; r <= k; ++r) {
    w[static_cast<std::size_t>(r)] = ((k - r) % 2 ? -1.0 : 1.0) * c;
    c = c * (k - r) / (r + 1);
  }
  return w;
}

// |Delta^k_t f| on the grid.
void difference_magnitudes(const SampledSignal& f, long long t, const std::vector<double>& w, std::vector<double>& out) {
  const std::size_t n = f.size();
  const int k = static_cast<int>(w.size()) - 1;
  out.resize(n);
  std::vector<std::size_t> shift(static_cast<std::size_t>(k) + 1);
  for (int r = 0; r <= k; ++r) shift[static_cast<std::size_t>(r)] = wrap_index(r * t, n);
  const auto& v = f.values();
  for (std::size_t m = 0; m < n; ++m) {
    Complex acc{};
    for (int r = 0; r <= k; ++r) {
      std::size_t idx = m + shift[static_cast<std::size_t>(r)];
      if (idx >= n) idx -= n;
      acc += w[static_cast<std::size_t>(r)] * v[idx];
    }
    out[m] = std::abs(acc);
  }
}

double power(double v, double p) {
  if (p == 1.0) return v;
  if (p == 2.0) return v * v;
  return std::pow(v, p);
}

double root(double v, double p) {
  if (p == 1.0) return v;
  if (p == 2.0) return std::sqrt(v);
  return std::pow(v, 1.0 / p);
}

long long difference_window(int depth, int i, int k) {
  require(i >= 0 && i <= difference_level_cap(depth, k), "level too deep for the k|u| window");
  return (1LL << (depth - i)) / k;
}

// Trapezoid weight of shift t on the window |u| <= 2^-i / k, in cells.
double window_weight(int depth, int i, int k, long long t) {
  const long long t_max = difference_window(depth, i, k);
  if (std::llabs(t) < t_max) return 1.0;
  const double reach = std::ldexp(1.0, depth - i) / k;
  return 0.5 + (reach - static_cast<double>(t_max));
}

// Measure of the ball of radius 2^-i, in cells, capped by the torus.
double ball_measure(int depth, int i) {
  return std::min(std::ldexp(2.0, depth - i), std::ldexp(1.0, depth));
}

}  // namespace

SampledSignal kth_difference(const SampledSignal& f, long long shift, int k) {
  require_1d(f, "kth_difference");
  require(k >= 1, "k must be >= 1");
  const std::size_t n = f.size();
  std::vector<Complex> g(f.values());
  std::vector<Complex> next(n);
  for (int r = 0; r < k; ++r) {
    for (std::size_t m = 0; m < n; ++m) next[m] = g[wrap_index(static_cast<long long>(m) + shift, n)] - g[m];
    std::swap(g, next);
  }
  return SampledSignal(1, f.depth(), std::move(g));
}

SampledSignal kth_difference(const SampledSignal& f, double u, int k) {
  require(std::isfinite(u), "shift must be finite");
  const double cells = u * static_cast<double>(f.points_per_axis());
  const double rounded = std::round(cells);
  require(std::abs(cells - rounded) <= 1e-9 * std::max(1.0, std::abs(cells)), "shift must be a multiple of the grid spacing");
  return kth_difference(f, static_cast<long long>(rounded), k);
}

int difference_level_cap(int depth, int k) {
  require(k >= 1, "k must be >= 1");
  int c = 0;
  while ((1 << c) < k) ++c;
  return depth - c;
}

std::vector<double> local_mean_difference(const SampledSignal& f, int i, int k) {
  require_1d(f, "local_mean_difference");
  require(k >= 1, "k must be >= 1");
  const long long t_max = difference_window(f.depth(), i, k);
  const double ball = ball_measure(f.depth(), i);
  const auto w = difference_weights(k);
  std::vector<double> acc(f.size(), 0.0), d;
  for (long long t = -t_max; t <= t_max; ++t) {
    if (t == 0) continue;
    difference_magnitudes(f, t, w, d);
    const double wt = window_weight(f.depth(), i, k, t);
    for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += wt * d[m];
  }
  for (double& v : acc) v /= ball;
  return acc;
}

std::vector<double> sup_difference(const SampledSignal& f, int i, int k) {
  require_1d(f, "sup_difference");
  require(k >= 1, "k must be >= 1");
  const long long t_max = difference_window(f.depth(), i, k);
  const auto w = difference_weights(k);
  std::vector<double> out(f.size(), 0.0), d;
  for (long long t = -t_max; t <= t_max; ++t) {
    if (t == 0) continue;
    difference_magnitudes(f, t, w, d);
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = std::max(out[m], d[m]);
  }
  return out;
}

std::vector<long long> ball_offsets(int depth, int i) {
  require(depth >= 1 && i >= 0 && i <= depth, "ball level out of range");
  const long long n = 1LL << depth;
  const long long r = 1LL << (depth - i);
  std::vector<long long> out;
  if (2 * r >= n) {
    for (long long o = -n / 2; o < n / 2; ++o) out.push_back(o);
  } else {
    for (long long o = -r; o <= r; ++o) out.push_back(o);
  }
  return out;
}

double oscillation(const SampledSignal& f, std::size_t x, int i, int degree, double p, OscillationKind kind) {
  require_1d(f, "oscillation");
  require(p >= 1.0, "p must lie in [1, inf]");
  require(degree >= 0, "degree must be >= 0");
  require(x < f.size(), "grid point out of range");
  const BallBasis b = ball_basis(f.depth(), i, degree);
  const auto v = ball_values(f, x, b.offsets);
  const double omega = residual_norm(projection_residual(v, b.q), p);
  if (kind == OscillationKind::Infimum && std::isinf(p)) return std::min(omega, lawson_minimax(v, b));
  return omega;
}

std::vector<double> oscillation_field(const SampledSignal& f, int i, int degree, double p, OscillationKind kind) {
  return oscillation_fields(f, i, degree, {p}, kind).front();
}

std::vector<std::vector<double>> oscillation_fields(const SampledSignal& f, int i, int degree,
                                                    const std::vector<double>& ps, OscillationKind kind) {
  require_1d(f, "oscillation_field");
  require(degree >= 0, "degree must be >= 0");
  for (double p : ps) require(p >= 1.0, "p must lie in [1, inf]");
  const BallBasis b = ball_basis(f.depth(), i, degree);
  std::vector<std::vector<double>> out(ps.size(), std::vector<double>(f.size()));
  for (std::size_t x = 0; x < f.size(); ++x) {
    const auto v = ball_values(f, x, b.offsets);
    const auto r = projection_residual(v, b.q);
    for (std::size_t a = 0; a < ps.size(); ++a) {
      double omega = residual_norm(r, ps[a]);
      if (kind == OscillationKind::Infimum && std::isinf(ps[a])) omega = std::min(omega, lawson_minimax(v, b));
      out[a][x] = omega;
    }
  }
  return out;
}

DifferenceLevels difference_levels(const SampledSignal& f, int k, const std::vector<double>& ps) {
  require_1d(f, "difference_levels");
  require(k >= 1, "k must be >= 1");
  require(!ps.empty(), "need at least one p");
  for (double p : ps) require(p >= 1.0, "p must lie in [1, inf]");
  const int D = f.depth();
  DifferenceLevels lv;
  lv.k = k;
  lv.depth = D;
  lv.cap = difference_level_cap(D, k);
  require(lv.cap >= 0, "depth too small for k");
  lv.ps = ps;
  const std::size_t levels = static_cast<std::size_t>(lv.cap) + 1;
  lv.sup.assign(levels, {});
  lv.mean.assign(levels, {});
  lv.sup_lp.assign(ps.size(), std::vector<std::vector<std::vector<double>>>(levels));
  lv.osc.assign(ps.size(), std::vector<std::vector<double>>(levels));
  const auto w = difference_weights(k);
  const double cell = std::ldexp(1.0, -D);
  std::vector<double> d, base;
  for (int i = 0; i <= lv.cap; ++i) {
    const std::size_t ii = static_cast<std::size_t>(i);
    const long long t_max = difference_window(D, i, k);
    const double ball = ball_measure(D, i);
    auto& sup = lv.sup[ii];
    auto& mean = lv.mean[ii];
    sup.assign(f.size(), 0.0);
    mean.assign(f.size(), 0.0);
    for (std::size_t a = 0; a < ps.size(); ++a) {
      auto& best = lv.sup_lp[a][ii];
      best.resize(ii + 1);
      for (int j = 0; j <= i; ++j) best[static_cast<std::size_t>(j)].assign(std::size_t{1} << j, 0.0);
    }
    for (long long t = -t_max; t <= t_max; ++t) {
      if (t == 0) continue;
      difference_magnitudes(f, t, w, d);
      const double wt = window_weight(D, i, k, t);
      for (std::size_t m = 0; m < d.size(); ++m) {
        sup[m] = std::max(sup[m], d[m]);
        mean[m] += wt * d[m];
      }
      for (std::size_t a = 0; a < ps.size(); ++a) {
        const double p = ps[a];
        const bool p_inf = std::isinf(p);
        base.resize(d.size());
        for (std::size_t m = 0; m < d.size(); ++m) base[m] = p_inf ? d[m] : power(d[m], p);
        const auto pyr = cube_aggregates(base, 1, D, p_inf);
        auto& best = lv.sup_lp[a][ii];
        for (int j = 0; j <= i; ++j) {
          auto& bj = best[static_cast<std::size_t>(j)];
          const auto& agg = pyr[static_cast<std::size_t>(j)];
          for (std::size_t c = 0; c < bj.size(); ++c) bj[c] = std::max(bj[c], p_inf ? agg[c] : root(agg[c] * cell, p));
        }
      }
    }
    for (double& v : mean) v /= ball;
    auto osc = oscillation_fields(f, i, k - 1, ps);
    for (std::size_t a = 0; a < ps.size(); ++a) lv.osc[a][ii] = std::move(osc[a]);
  }
  return lv;
}

namespace {

// B-type aggregate with the sup over u outside the L^p(P) norm.
CubeTable sup_difference_table_b(const DifferenceLevels& lv, std::size_t pi, const SpaceParams& params,
                                 int virtual_levels) {
  const int D = lv.depth;
  CubeTable table{Lattice(1, D, virtual_levels), {}};
  table.values.assign(table.lattice.total_cube_count(), 0.0);
  const double q = params.q;
  const bool q_inf = std::isinf(q);
  std::vector<std::vector<double>> acc(static_cast<std::size_t>(D) + 1);
  for (int j = 0; j <= D; ++j) acc[static_cast<std::size_t>(j)].assign(table.lattice.cube_count(j), 0.0);
  for (int i = 0; i <= lv.cap; ++i) {
    const double scale = std::exp2(i * params.sprime);
    const auto& best = lv.sup_lp[pi][static_cast<std::size_t>(i)];
    for (int j = 0; j <= i; ++j) {
      auto& a = acc[static_cast<std::size_t>(j)];
      const auto& bj = best[static_cast<std::size_t>(j)];
      for (std::size_t c = 0; c < a.size(); ++c) {
        const double v = scale * bj[c];
        a[c] = q_inf ? std::max(a[c], v) : a[c] + std::pow(v, q);
      }
    }
  }
  for (int j = 0; j <= D; ++j) {
    const auto& a = acc[static_cast<std::size_t>(j)];
    const std::size_t off = table.lattice.level_offset(j);
    for (std::size_t c = 0; c < a.size(); ++c) {
      const double v = q_inf ? a[c] : std::pow(a[c], 1.0 / q);
      if (!std::isfinite(v)) throw NumericOverflow("non-finite value in sup-difference aggregate");
      table.values[off + c] = v;
    }
  }
  return table;
}

double combined_outer(const CubeTable& lp, const CubeTable& agg, const SpaceParams& params) {
  CubeTable t = lp;
  for (std::size_t g = 0; g < t.values.size(); ++g) t.values[g] += agg.values[g];
  return outer_sup(t, params).value;
}

}  // namespace

DifferenceNorms difference_norms(const SampledSignal& f, const SpaceParams& params, const DifferenceSpec& spec,
                                 const FilterBank& bank, int virtual_levels) {
  spec.validate();
  return difference_norms(f, difference_levels(f, spec.k, {spec.p}), params, spec, bank, virtual_levels);
}

DifferenceNorms difference_norms(const SampledSignal& f, const DifferenceLevels& lv, const SpaceParams& params,
                                 const DifferenceSpec& spec, const FilterBank& bank, int virtual_levels) {
  require_1d(f, "difference_norms");
  spec.validate();
  require(lv.k == spec.k && lv.depth == f.depth(), "difference levels do not match the signal or k");
  const auto pit = std::find(lv.ps.begin(), lv.ps.end(), spec.p);
  require(pit != lv.ps.end(), "difference levels were not prepared for this p");
  const std::size_t pi = static_cast<std::size_t>(pit - lv.ps.begin());
  require(!params.tilde, "difference functionals use the non-tilde spaces");
  SpaceParams sp = params;
  sp.p = spec.p;
  sp.sprime = spec.sprime;
  sp.validate(1);
  if (sp.family == Family::F) {
    require(!std::isinf(sp.p), "F-type difference norms need p < inf");
    require(sp.q >= 1.0, "F-type difference norms need q >= 1");
  }
  const int D = f.depth();
  DifferenceNorms out;
  out.level_cap = lv.cap;

  const CubeTable lp = lp_norm_table(f, sp.p, virtual_levels);
  FullNormOptions opt;
  opt.virtual_levels = virtual_levels;
  out.lhs = full_norm(f, sp, bank, opt).value + outer_sup(lp, sp).value;

  const auto capped_field = [&](const std::vector<std::vector<double>>& levels) {
    LevelField lf;
    lf.dim = 1;
    lf.depth = D;
    lf.g.assign(static_cast<std::size_t>(D) + 1, std::vector<double>(f.size(), 0.0));
    for (std::size_t i = 0; i < levels.size(); ++i) lf.g[i] = levels[i];
    return lf;
  };

  const CubeTable sup_tab = sp.family == Family::B ? sup_difference_table_b(lv, pi, sp, virtual_levels)
                                                   : local_norm_table(capped_field(lv.sup), sp, virtual_levels);
  out.sup_difference = combined_outer(lp, sup_tab, sp);
  out.oscillation = combined_outer(lp, local_norm_table(capped_field(lv.osc[pi]), sp, virtual_levels), sp);
  out.mean_difference = combined_outer(lp, local_norm_table(capped_field(lv.mean), sp, virtual_levels), sp);
  return out;
}

}  // namespace microlocal
