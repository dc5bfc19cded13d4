#include "microlocal/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "microlocal/errors.hpp"
#include "microlocal/funcnorm.hpp"

namespace microlocal {

namespace {

// Daubechies lowpass filters, sum h = sqrt(2).
const std::vector<std::vector<double>>& daubechies_table() {
  static const std::vector<std::vector<double>> table = {
      {0.7071067811865476, 0.7071067811865476},
      {0.48296291314453416, 0.8365163037378079, 0.2241438680420134, -0.12940952255126037},
      {0.33267055295008263, 0.8068915093110925, 0.45987750211849154, -0.13501102001025458, -0.08544127388202666,
       0.03522629188570953},
      {0.2303778133088965, 0.7148465705529157, 0.6308807679298589, -0.027983769416859854, -0.18703481171909309,
       0.030841381835560764, 0.0328830116668852, -0.010597401785069032},
      {0.16010239797419293, 0.6038292697971896, 0.7243085284377729, 0.13842814590132074, -0.24229488706638203,
       -0.032244869584638375, 0.07757149384004572, -0.006241490212798274, -0.012580751999081999,
       0.0033357252854737712},
      {0.11154074335010947, 0.49462389039845306, 0.7511339080210954, 0.31525035170919763, -0.22626469396543983,
       -0.12976686756726194, 0.09750160558732304, 0.027522865530305727, -0.03158203931748603, 0.0005538422011614961,
       0.004777257510945511, -0.0010773010853084796},
      {0.07785205408500918, 0.3965393194819173, 0.7291320908462351, 0.4697822874051931, -0.14390600392856498,
       -0.22403618499387498, 0.07130921926683026, 0.08061260915108308, -0.03802993693501441, -0.01657454163066688,
       0.01255099855609984, 0.0004295779729213665, -0.0018016407040474908, 0.00035371379997452024},
      {0.05441584224310401, 0.31287159091429995, 0.6756307362972898, 0.5853546836542067, -0.015829105256349306,
       -0.2840155429615469, 0.0004724845739132828, 0.12874742662047847, -0.017369301001807547,
       -0.044088253930794755, 0.013981027917398282, 0.008746094047405777, -0.004870352993451574,
       -0.00039174037337694705, 0.0006754494064505693, -0.00011747678412476953},
      {0.038077947363878345, 0.24383467461259034, 0.6048231236901112, 0.6572880780513005, 0.13319738582500756,
       -0.2932737832791749, -0.09684078322297646, 0.14854074933810638, 0.03072568147933338, -0.06763282906132997,
       0.00025094711483145197, 0.022361662123679096, -0.004723204757751397, -0.00428150368246343,
       0.0018476468830562265, 0.00023038576352319597, -0.0002519631889427101, 3.93473203162716e-05},
      {0.026670057900555554, 0.1881768000776915, 0.5272011889317256, 0.6884590394536035, 0.2811723436605775,
       -0.24984642432731538, -0.19594627437737705, 0.12736934033579325, 0.09305736460357235,
       -0.07139414716639708, -0.029457536821875813, 0.033212674059341, 0.0036065535669561697,
       -0.010733175483330575, 0.001395351747052901, 0.001992405295185056, -0.0006858566949597116,
       -0.00011646685512928545, 9.358867032006959e-05, -1.3264202894521244e-05},
  };
  return table;
}

void require_1d(const SampledSignal& f) { require(f.dim() == 1, "wavelet transforms are implemented for n = 1 only"); }

// phi_hat(xi / N) on the FFT bins, phi_hat(omega) = prod_{m >= 1} m0(omega 2^-m) with
// m0(omega) = 2^-1/2 sum_k h_k e^{-2 pi i k omega}. The Nyquist bin is shared by +-N/2 and gets
// the real factor |phi_hat(1/2)| so that real data stay real.
std::vector<Complex> compute_scaling_spectrum(const std::vector<double>& lowpass, int depth) {
  const std::size_t n = std::size_t{1} << depth;
  std::vector<Complex> out(n);
  const double two_pi = 2.0 * std::acos(-1.0);
  for (std::size_t b = 0; b < n; ++b) {
    const double omega = static_cast<double>(bin_frequency(b, n)) / static_cast<double>(n);
    Complex prod{1.0, 0.0};
    for (int m = 1; m <= 60; ++m) {
      const double om = std::ldexp(omega, -m);
      Complex m0{};
      for (std::size_t k = 0; k < lowpass.size(); ++k)
        m0 += lowpass[k] * std::polar(1.0, -two_pi * static_cast<double>(k) * om);
      prod *= m0 / std::sqrt(2.0);
    }
    out[b] = (b == n / 2) ? Complex(std::abs(prod), 0.0) : prod;
  }
  return out;
}

const std::vector<Complex>& scaling_spectrum(const WaveletSystem& w, int depth) {
  static std::mutex mutex;
  static std::map<std::pair<std::vector<double>, int>, std::vector<Complex>> cache;
  const std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(w.lowpass, depth);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, compute_scaling_spectrum(w.lowpass, depth)).first;
  return it->second;
}

// Wrapped displacement of x from c in [-1/2, 1/2).
double displacement(double x, double c) {
  double d = x - c;
  d -= std::floor(d + 0.5);
  return d;
}

double least_squares_slope(const std::vector<int>& xs, const std::vector<double>& ys) {
  if (xs.size() < 2) return 0.0;
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return num / den;
}

void finish_constants(LevelConstants& lc, double threshold) {
  std::vector<double> logs;
  bool finite = true;
  for (double c : lc.constants) {
    finite = finite && std::isfinite(c);
    logs.push_back(std::log2(std::max(c, 1e-300)));
  }
  lc.log2_slope = least_squares_slope(lc.levels, logs);
  lc.bounded = finite && lc.log2_slope <= threshold;
}

}  // namespace

WaveletSystem wavelet_from_lowpass(std::string name, std::vector<double> lowpass, int vanishing_moments) {
  require(lowpass.size() >= 2 && lowpass.size() % 2 == 0, "wavelet filter length must be even and at least 2");
  const double sum = std::accumulate(lowpass.begin(), lowpass.end(), 0.0);
  const double energy = std::inner_product(lowpass.begin(), lowpass.end(), lowpass.begin(), 0.0);
  require(std::abs(sum - std::sqrt(2.0)) < 1e-8 && std::abs(energy - 1.0) < 1e-8,
          "wavelet lowpass filter must satisfy sum h = sqrt 2 and sum h^2 = 1");
  for (std::size_t shift = 2; shift < lowpass.size(); shift += 2) {
    double acc = 0.0;
    for (std::size_t m = 0; m + shift < lowpass.size(); ++m) acc += lowpass[m] * lowpass[m + shift];
    require(std::abs(acc) < 1e-8, "wavelet lowpass filter is not orthogonal to its even shifts");
  }
  require(vanishing_moments >= 1, "vanishing moment count must be at least 1");
  WaveletSystem w;
  w.name = std::move(name);
  w.r = vanishing_moments;
  w.lowpass = std::move(lowpass);
  const std::size_t L = w.lowpass.size();
  w.highpass.resize(L);
  for (std::size_t m = 0; m < L; ++m) w.highpass[m] = (m % 2 == 0 ? 1.0 : -1.0) * w.lowpass[L - 1 - m];
  return w;
}

WaveletSystem build_wavelet_system(int r) {
  require(r >= 1 && r <= 10, "wavelet vanishing moments must lie in 1..10");
  return wavelet_from_lowpass("db" + std::to_string(r), daubechies_table()[static_cast<std::size_t>(r) - 1], r);
}

WaveletSystem load_wavelet_filter(const std::string& path, int vanishing_moments) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open wavelet filter file " + path);
  std::vector<double> h;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double v;
    if (!(ss >> v)) {
      std::string rest;
      if (std::istringstream(line) >> rest) throw InvalidInput("bad filter coefficient on line " + std::to_string(lineno));
      continue;
    }
    h.push_back(v);
  }
  return wavelet_from_lowpass(path, std::move(h), vanishing_moments);
}

WaveletCoefficients wavelet_analysis(const SampledSignal& f, const WaveletSystem& w, WaveletInit init) {
  require_1d(f);
  const int D = f.depth();
  require(D >= 1, "wavelet analysis needs depth >= 1");
  std::vector<Complex> a = f.values();
  if (init == WaveletInit::Projection) {
    auto spec = forward_fft(a, 1, D);
    const auto& phi = scaling_spectrum(w, D);
    for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= std::conj(phi[m]);
    a = inverse_fft(spec, 1, D);
    if (f.is_real())
      for (auto& v : a) v = v.real();
  }
  WaveletCoefficients out{Complex{}, CoefField(1, D)};
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(f.size()));
  for (int j = D; j >= 1; --j) {
    const std::size_t len = std::size_t{1} << j;
    const std::size_t half = len / 2;
    std::vector<Complex> next(half), detail(half);
    for (std::size_t k = 0; k < half; ++k) {
      Complex s{}, d{};
      for (std::size_t m = 0; m < w.lowpass.size(); ++m) {
        const Complex v = a[(2 * k + m) % len];
        s += w.lowpass[m] * v;
        d += w.highpass[m] * v;
      }
      next[k] = s;
      detail[k] = d;
    }
    auto& lv = out.c.level(j - 1);
    const double scale = std::sqrt(static_cast<double>(half)) * inv_sqrt_n;
    for (std::size_t k = 0; k < half; ++k) lv[k] = detail[k] * scale;
    a = std::move(next);
  }
  out.c0 = a[0] * inv_sqrt_n;
  return out;
}

SampledSignal wavelet_synthesis(const WaveletCoefficients& coefs, const WaveletSystem& w, WaveletInit init) {
  const int D = coefs.c.depth();
  require(coefs.c.dim() == 1, "wavelet transforms are implemented for n = 1 only");
  require(D >= 1, "wavelet synthesis needs depth >= 1");
  const double sqrt_n = std::sqrt(std::ldexp(1.0, D));
  std::vector<Complex> a{coefs.c0 * sqrt_n};
  bool real = coefs.c0.imag() == 0.0;
  for (int j = 1; j <= D; ++j) {
    const std::size_t len = std::size_t{1} << j;
    const std::size_t half = len / 2;
    const auto& lv = coefs.c.level(j - 1);
    const double scale = sqrt_n / std::sqrt(static_cast<double>(half));
    std::vector<Complex> next(len);
    for (std::size_t k = 0; k < half; ++k) {
      const Complex d = lv[k] * scale;
      real = real && d.imag() == 0.0;
      for (std::size_t m = 0; m < w.lowpass.size(); ++m) next[(2 * k + m) % len] += w.lowpass[m] * a[k] + w.highpass[m] * d;
    }
    a = std::move(next);
  }
  if (init == WaveletInit::Projection) {
    auto spec = forward_fft(a, 1, D);
    const auto& phi = scaling_spectrum(w, D);
    for (std::size_t m = 0; m < spec.size(); ++m) spec[m] /= std::conj(phi[m]);
    a = inverse_fft(spec, 1, D);
    if (real)
      for (auto& v : a) v = v.real();
  }
  return SampledSignal(1, D, std::move(a));
}

SampledSignal wavelet_function(const WaveletSystem& w, int depth, const DyadicCube& q) {
  require(q.level >= 0 && q.level < depth, "wavelet cubes lie on levels 0..depth-1");
  WaveletCoefficients c{Complex{}, CoefField(1, depth)};
  c.c.at(q) = 1.0;
  return wavelet_synthesis(c, w, WaveletInit::Samples);
}

SampledSignal scaling_function(const WaveletSystem& w, int depth) {
  WaveletCoefficients c{Complex{1.0, 0.0}, CoefField(1, depth)};
  return wavelet_synthesis(c, w, WaveletInit::Samples);
}

CoefField to_l2_normalized(const CoefField& c) {
  CoefField out = c;
  for (int j = 0; j <= c.depth(); ++j)
    for (auto& v : out.level(j)) v *= std::exp2(-0.5 * c.dim() * j);
  return out;
}

CoefField from_l2_normalized(const CoefField& c) {
  CoefField out = c;
  for (int j = 0; j <= c.depth(); ++j)
    for (auto& v : out.level(j)) v *= std::exp2(0.5 * c.dim() * j);
  return out;
}

SampledSignal AtomFamily::atom(const DyadicCube& q) const {
  const Lattice lat(dim, depth, 0);
  const CubeGeometry geo = lat.geometry(q);
  const std::int64_t n = lat.points_per_axis();
  // 1-D factor per axis
  std::array<std::vector<double>, kMaxDim> factors;
  for (int a = 0; a < dim; ++a) {
    const double center = geo.corner[a] + 0.5 * geo.side;
    std::vector<double> t(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t m = 0; m < n; ++m) {
      const double x = static_cast<double>(m) / static_cast<double>(n);
      t[static_cast<std::size_t>(m)] = displacement(x, center) / (1.5 * geo.side);
      const double tt = t[static_cast<std::size_t>(m)];
      if (std::abs(tt) < 1.0) b[static_cast<std::size_t>(m)] = std::exp(-1.0 / (1.0 - tt * tt));
    }
    // Gram-Schmidt of t^r2 against 1..t^(r2-1) in the b-weighted inner product.
    std::vector<double> poly(static_cast<std::size_t>(n), 1.0);
    if (q.level > 0 && r2 > 0) {
      std::vector<std::vector<double>> basis;
      for (int d = 0; d <= r2; ++d) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (std::size_t m = 0; m < v.size(); ++m) v[m] = std::pow(t[m], d);
        for (const auto& e : basis) {
          double dot = 0.0;
          for (std::size_t m = 0; m < v.size(); ++m) dot += b[m] * v[m] * e[m];
          for (std::size_t m = 0; m < v.size(); ++m) v[m] -= dot * e[m];
        }
        double norm = 0.0;
        for (std::size_t m = 0; m < v.size(); ++m) norm += b[m] * v[m] * v[m];
        norm = std::sqrt(norm);
        if (norm < 1e-14) {
          // too few grid points under the bump to support the moment conditions
          std::fill(v.begin(), v.end(), 0.0);
        } else {
          for (auto& x : v) x /= norm;
        }
        if (d < r2) {
          basis.push_back(std::move(v));
        } else {
          poly = std::move(v);
        }
      }
    }
    std::vector<double> f(static_cast<std::size_t>(n));
    double peak = 0.0;
    for (std::size_t m = 0; m < f.size(); ++m) {
      f[m] = b[m] * poly[m];
      peak = std::max(peak, std::abs(f[m]));
    }
    if (peak > 0.0)
      for (auto& x : f) x /= peak;
    factors[static_cast<std::size_t>(a)] = std::move(f);
  }
  std::vector<Complex> v(lat.point_count());
  if (dim == 1) {
    for (std::size_t m = 0; m < v.size(); ++m) v[m] = factors[0][m];
  } else {
    for (std::int64_t m0 = 0; m0 < n; ++m0)
      for (std::int64_t m1 = 0; m1 < n; ++m1)
        v[static_cast<std::size_t>(m0 * n + m1)] = factors[0][static_cast<std::size_t>(m0)] * factors[1][static_cast<std::size_t>(m1)];
  }
  return SampledSignal(dim, depth, std::move(v));
}

SampledSignal atom_synthesis(const CoefField& c, const AtomFamily& family) {
  require(c.dim() == family.dim && c.depth() == family.depth, "coefficient field and atom family shapes differ");
  const Lattice lat(c.dim(), c.depth(), 0);
  SampledSignal out(c.dim(), c.depth());
  for (int j = 0; j <= c.depth(); ++j) {
    const auto& lv = c.level(j);
    for (std::size_t k = 0; k < lv.size(); ++k) {
      if (lv[k] == Complex{}) continue;
      const SampledSignal a = family.atom(lat.cube_at(j, k));
      for (std::size_t m = 0; m < a.size(); ++m) out[m] += lv[k] * a[m];
    }
  }
  return out;
}

CubeFamily wavelet_family(const WaveletSystem& w, int depth) {
  return [w, depth](const DyadicCube& q) {
    if (q.level >= depth) return SampledSignal(1, depth);
    return wavelet_function(w, depth, q);
  };
}

CubeFamily atom_cube_family(const AtomFamily& family) {
  return [family](const DyadicCube& q) { return family.atom(q); };
}

MoleculeReport validate_molecule_family(const CubeFamily& family, int depth, int r1, int r2, double L,
                                        const MoleculeCheckOptions& options) {
  require(r1 >= 0 && r2 >= 0 && L > 0.0, "molecule parameters out of range");
  const int n = 1;
  const int hi = options.max_level < 0 ? depth - 1 : options.max_level;
  require(options.min_level >= 0 && hi <= depth && options.min_level <= hi, "molecule check level range is empty");
  const Lattice lat(n, depth, 0);
  const double h = std::ldexp(1.0, -depth);
  const double cell = h;
  const double decay_exp = std::max(L, n + r2 + 0.5);
  MoleculeReport rep;
  rep.derivatives.resize(static_cast<std::size_t>(r1));
  for (int j = options.min_level; j <= hi; ++j) {
    const std::size_t count = lat.cube_count(j);
    const std::size_t step = std::max<std::size_t>(1, count / static_cast<std::size_t>(options.cubes_per_level));
    double c_decay = 0.0;
    std::vector<double> c_deriv(static_cast<std::size_t>(r1), 0.0);
    for (std::size_t k = 0; k < count; k += step) {
      const DyadicCube q = lat.cube_at(j, k);
      const double side = std::ldexp(1.0, -j);
      const double xq = lat.geometry(q).corner[0];
      const SampledSignal f = family(q);
      require(f.dim() == 1 && f.depth() == depth, "family member has wrong shape");
      std::vector<double> v = f.real_part();
      const auto env = [&](std::size_t m, double e) {
        const double d = torus_distance({static_cast<double>(m) * h, 0}, {xq, 0}, 1);
        return std::pow(1.0 + d / side, e);
      };
      for (std::size_t m = 0; m < v.size(); ++m) c_decay = std::max(c_decay, std::abs(f[m]) * env(m, decay_exp));
      // iterated centered differences: order g uses the g-th central difference at spacing h
      std::vector<double> d = v;
      for (int g = 1; g <= r1; ++g) {
        std::vector<double> nd(d.size());
        const std::size_t N = d.size();
        for (std::size_t m = 0; m < N; ++m) nd[m] = (d[(m + 1) % N] - d[(m + N - 1) % N]) / (2.0 * h);
        d = std::move(nd);
        double c = 0.0;
        for (std::size_t m = 0; m < N; ++m) c = std::max(c, std::abs(d[m]) * std::pow(side, g) * env(m, L));
        c_deriv[static_cast<std::size_t>(g) - 1] = std::max(c_deriv[static_cast<std::size_t>(g) - 1], c);
      }
      for (int g = 0; g < r2; ++g) {
        Complex acc{};
        for (std::size_t m = 0; m < v.size(); ++m) {
          const double t = displacement(static_cast<double>(m) * h, xq) / side;
          acc += f[m] * std::pow(t, g);
        }
        rep.moment_residual = std::max(rep.moment_residual, std::abs(acc) * cell / side);
      }
    }
    rep.decay.levels.push_back(j);
    rep.decay.constants.push_back(c_decay);
    for (int g = 0; g < r1; ++g) {
      rep.derivatives[static_cast<std::size_t>(g)].levels.push_back(j);
      rep.derivatives[static_cast<std::size_t>(g)].constants.push_back(c_deriv[static_cast<std::size_t>(g)]);
    }
  }
  finish_constants(rep.decay, options.slope_threshold);
  rep.derivatives_ok = true;
  for (auto& lc : rep.derivatives) {
    finish_constants(lc, options.slope_threshold);
    rep.derivatives_ok = rep.derivatives_ok && lc.bounded;
  }
  rep.decay_ok = rep.decay.bounded;
  rep.moments_ok = rep.moment_residual <= options.moment_tolerance;
  rep.passed = rep.decay_ok && rep.derivatives_ok && rep.moments_ok;
  return rep;
}

double wavelet_sequence_norm(const WaveletCoefficients& coefs, const SpaceParams& params, int virtual_levels) {
  CoefField base(coefs.c.dim(), coefs.c.depth());
  base.level(0)[0] = coefs.c0;
  return outer_norm(base, params, virtual_levels).value + outer_norm(coefs.c, params, virtual_levels).value;
}

EquivalenceReport equivalence_report(const SampledSignal& f, const SpaceParams& params, const FilterBank& bank,
                                     const WaveletSystem& w, int virtual_levels) {
  EquivalenceReport r;
  FullNormOptions opt;
  opt.virtual_levels = virtual_levels;
  r.function_norm = full_norm(f, params, bank, opt).value;
  r.phi_norm = outer_norm(phi_analysis(f, bank), params, virtual_levels).value;
  r.wavelet_norm = wavelet_sequence_norm(wavelet_analysis(f, w), params, virtual_levels);
  const auto ratio = [](double a, double b) {
    return (a > 0.0 && b > 0.0) ? std::log(a / b) : std::numeric_limits<double>::quiet_NaN();
  };
  r.log_phi_over_function = ratio(r.phi_norm, r.function_norm);
  r.log_wavelet_over_function = ratio(r.wavelet_norm, r.function_norm);
  r.log_wavelet_over_phi = ratio(r.wavelet_norm, r.phi_norm);
  return r;
}

}  // namespace microlocal
