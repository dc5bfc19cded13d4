#include "microlocal/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <array>
#include <filesystem>
#include <functional>
#include <fstream>
#include <limits>

#include "microlocal/errors.hpp"
#include "microlocal/funcnorm.hpp"
#include "microlocal/io.hpp"
#include "microlocal/lpdecomp.hpp"
#include "microlocal/operators.hpp"
#include "microlocal/synthesis.hpp"

namespace microlocal {

namespace {

constexpr double kSlack = 1e-12;
// log2 growth from D-1 to D above which a truncated norm is treated as divergent.
constexpr double kDivergenceThreshold = 0.05;

double slope(const std::vector<double>& x, const std::vector<double>& y) {
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

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double hash_unit(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t h = splitmix(splitmix(splitmix(seed) ^ a) ^ (b * 0x2545f4914f6cdd1dULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::string fmt(double v) { return format_number(v); }

Check make_check(std::string name, bool ok, double value, double threshold, std::string detail = {}) {
  return Check{std::move(name), ok, value, threshold, std::move(detail)};
}

// Relative excess of `lhs` over `rhs`; <= slack means lhs <= rhs up to rounding.
double excess(double lhs, double rhs) {
  if (lhs <= rhs) return 0.0;
  return (lhs - rhs) / std::max(std::abs(rhs), 1e-300);
}

CoefField random_field(int depth, std::uint64_t seed) {
  GaussianStream g(seed);
  CoefField c(1, depth);
  const double a = -0.5 + 2.0 * g.uniform();
  const double sparsity = g.uniform();
  for (int j = 0; j <= depth; ++j)
    for (auto& z : c.level(j)) {
      const double keep = g.uniform();
      const double v = g.next() * std::exp2(-j * a);
      z = keep < 0.2 + 0.8 * sparsity ? v : 0.0;
    }
  return c;
}

SpaceParams make_params(Family fam, bool tilde, double s, double sp, double sigma, double p, double q, double x0) {
  SpaceParams P;
  P.family = fam;
  P.tilde = tilde;
  P.s = s;
  P.sprime = sp;
  P.sigma = sigma;
  P.p = p;
  P.q = q;
  P.x0 = {x0, 0.0};
  return P;
}

std::string params_key(const SpaceParams& p) {
  std::string k = p.family == Family::B ? "B" : "F";
  if (p.tilde) k += "~";
  k += "(s=" + fmt(p.s) + ",s'=" + fmt(p.sprime) + ",sigma=" + fmt(p.sigma) + ",p=" + fmt(p.p) + ",q=" + fmt(p.q) + ")";
  return k;
}

}  // namespace

void SuiteReport::add(Check c) {
  passed = passed && c.passed;
  checks.push_back(std::move(c));
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json j = {{"name", c.name},
                        {"passed", c.passed},
                        {"value", std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(fmt(c.value))},
                        {"threshold", std::isfinite(c.threshold) ? nlohmann::json(c.threshold)
                                                                 : nlohmann::json(fmt(c.threshold))}};
    if (!c.detail.empty()) j["detail"] = c.detail;
    arr.push_back(std::move(j));
  }
  return {{"schema", "v1"}, {"suite", name}, {"passed", passed}, {"checks", std::move(arr)}};
}

std::vector<CorpusEntry> suite_corpus(const SuiteConfig& cfg, int depth) {
  require(!cfg.fixtures.empty() || cfg.random_count > 0, "empty corpus");
  require(cfg.random_count >= 0, "random_count must be nonnegative");
  const auto all = standard_corpus(depth, cfg.random_count, cfg.seed);
  std::vector<CorpusEntry> out;
  for (const auto& name : cfg.fixtures) {
    const auto it = std::find_if(all.begin(), all.begin() + 5, [&](const CorpusEntry& e) { return e.name == name; });
    require(it != all.begin() + 5, "unknown fixture '" + name + "'");
    out.push_back(*it);
  }
  for (std::size_t r = 5; r < all.size(); ++r) out.push_back(all[r]);
  return out;
}

// ---- 1: filter bank ---------------------------------------------------------------------------

SuiteReport filter_bank_suite(const SuiteConfig& cfg) {
  SuiteReport rep{"filter-bank", true, {}};
  const int D = cfg.depth;
  const FilterBank bank = build_filter_bank(1, D);
  const double dev1 = bank.partition_deviation();
  rep.add(make_check("partition of unity n=1", dev1 < 1e-12, dev1, 1e-12));
  const double dev2 = build_filter_bank(2, 6).partition_deviation();
  rep.add(make_check("partition of unity n=2", dev2 < 1e-12, dev2, 1e-12));
  const std::size_t n = std::size_t{1} << D;
  double worst = 0.0;
  for (int r = 0; r < 100; ++r) {
    const auto f = band_limited_noise(D, cfg.seed + 1000 + static_cast<std::uint64_t>(r), static_cast<int>(n / 4), 0.5);
    worst = std::max(worst, SampledSignal::relative_l2_error(lp_pieces(f, bank).sum(), f));
  }
  rep.add(make_check("LP reconstruction, 100 band-limited signals", worst < 1e-10, worst, 1e-10));
  return rep;
}

// ---- 2: round trips ---------------------------------------------------------------------------

SuiteReport round_trip_suite(const SuiteConfig& cfg) {
  SuiteReport rep{"round-trips", true, {}};
  for (int D : {8, 10}) {
    const auto corpus = suite_corpus(cfg, D);
    const FilterBank dual = build_dual_bank(build_filter_bank(1, D));
    double phi_err = 0.0;
    for (const auto& e : corpus)
      phi_err = std::max(phi_err, SampledSignal::relative_l2_error(phi_synthesis(phi_analysis(e.signal, dual), dual), e.signal));
    rep.add(make_check("phi-transform round trip D=" + std::to_string(D), phi_err < 1e-8, phi_err, 1e-8));
    for (int r : {2, 4, 8}) {
      const WaveletSystem w = build_wavelet_system(r);
      double err = 0.0;
      for (const auto& e : corpus)
        err = std::max(err, SampledSignal::relative_l2_error(wavelet_synthesis(wavelet_analysis(e.signal, w), w), e.signal));
      rep.add(make_check("wavelet round trip " + w.name + " D=" + std::to_string(D), err < 1e-8, err, 1e-8));
    }
  }
  return rep;
}

// ---- 3: exact embeddings ----------------------------------------------------------------------

SuiteReport embeddings_suite(const SuiteConfig& cfg) {
  SuiteReport rep{"embeddings", true, {}};
  std::vector<std::pair<std::string, CoefField>> fields;
  {
    const FilterBank bank = build_filter_bank(1, cfg.depth);
    for (const auto& e : suite_corpus(cfg, cfg.depth)) fields.emplace_back(e.name, phi_analysis(e.signal, bank));
  }
  for (int r = 0; r < cfg.random_fields; ++r)
    fields.emplace_back("random_field_" + std::to_string(r), random_field(8, cfg.seed + 5000 + static_cast<std::uint64_t>(r)));
  require(!fields.empty(), "empty corpus");

  const int M = cfg.virtual_levels;
  const double x0 = 0.3;
  double mono = 0.0, mink = 0.0, lower = 0.0, weight = 0.0, star = 0.0;
  std::string mono_at, mink_at, lower_at, weight_at, star_at;
  const auto note = [](double& worst, std::string& where, double v, const std::string& what) {
    if (v > worst) {
      worst = v;
      where = what;
    }
  };
  const auto per_cube = [](const CubeTable& small, const CubeTable& large) {
    double w = 0.0;
    for (std::size_t g = 0; g < small.values.size(); ++g) w = std::max(w, excess(small.values[g], large.values[g]));
    return w;
  };

  for (const auto& [name, c] : fields) {
    const LevelField lf = level_field(c);
    // l^q monotonicity.
    for (Family fam : {Family::B, Family::F})
      for (bool tilde : {false, true}) {
        std::vector<CubeTable> tabs;
        const std::vector<double> qs{0.5, 1.0, 2.0, kInf};
        for (double q : qs) tabs.push_back(local_norm_table(lf, make_params(fam, tilde, 0.2, 0.4, 0.3, 2.0, q, x0), M));
        for (std::size_t a = 0; a + 1 < tabs.size(); ++a)
          note(mono, mono_at, per_cube(tabs[a + 1], tabs[a]), name + " q=" + fmt(qs[a]) + "->" + fmt(qs[a + 1]));
      }
    // Minkowski.
    for (double p : {1.0, 2.0, 3.0})
      for (double q : {0.5, 1.0, 2.0, 4.0}) {
        if (p == q) continue;
        const auto tb = local_norm_table(lf, make_params(Family::B, false, 0.2, 0.4, 0.3, p, q, x0), M);
        const auto tf = local_norm_table(lf, make_params(Family::F, false, 0.2, 0.4, 0.3, p, q, x0), M);
        const double v = q < p ? per_cube(tf, tb) : per_cube(tb, tf);
        note(mink, mink_at, v, name + " p=" + fmt(p) + " q=" + fmt(q));
      }
    // s <= 0 lower bound through P = Q.
    for (double sigma : {0.3, -0.4})
      for (Family fam : {Family::B, Family::F}) {
        const SpaceParams P = make_params(fam, false, -0.2, 0.4, sigma, 2.0, 2.0, x0);
        const CubeTable t = local_norm_table(lf, P, M);
        const double outer = outer_sup(t, P).value;
        for (const auto& q : t.lattice.cubes_containing(P.x0, 0, t.lattice.depth())) {
          const double rhs = std::exp2(q.level * (sigma + P.s)) * t.at(q);
          note(lower, lower_at, excess(rhs, outer), name + " sigma=" + fmt(sigma));
        }
      }
    // Weight bound per cube.
    for (Family fam : {Family::B, Family::F})
      for (double sigma : {0.0, 0.3, 0.8}) {
        const auto tilde = local_norm_table(lf, make_params(fam, true, 0.2, 0.4, sigma, 2.0, 2.0, x0), M);
        const auto plain = local_norm_table(lf, make_params(fam, false, 0.2, 0.4 + sigma, sigma, 2.0, 2.0, x0), M);
        note(weight, weight_at, per_cube(tilde, plain), name + " sigma=" + fmt(sigma));
      }
    // |c(P)| <= c*(P).
    for (double L : {1.5, 2.5, 4.0}) {
      const CoefField s = star_smoothing(c, L);
      double w = 0.0;
      for (int j = 0; j <= c.depth(); ++j)
        for (std::size_t k = 0; k < c.level(j).size(); ++k)
          w = std::max(w, excess(std::abs(c.level(j)[k]), std::abs(s.level(j)[k])));
      note(star, star_at, w, name + " L=" + fmt(L));
    }
  }
  rep.add(make_check("l^q monotonicity", mono <= kSlack, mono, kSlack, mono_at));
  rep.add(make_check("B/F Minkowski", mink <= kSlack, mink, kSlack, mink_at));
  rep.add(make_check("s <= 0 lower bound", lower <= kSlack, lower, kSlack, lower_at));
  rep.add(make_check("tilde weight bound", weight <= kSlack, weight, kSlack, weight_at));
  rep.add(make_check("|c| <= c*", star <= kSlack, star, kSlack, star_at));
  return rep;
}

// ---- 4: degeneracy for sigma < 0 --------------------------------------------------------------

SuiteReport degeneracy_suite(const SuiteConfig& cfg) {
  SuiteReport rep{"degeneracy", true, {}};
  double worst = 0.0;
  const double factor = std::sqrt(2.0);
  for (int r = 0; r < 20; ++r) {
    const CoefField c = random_field(8, cfg.seed + 9000 + static_cast<std::uint64_t>(r));
    for (Family fam : {Family::B, Family::F}) {
      const SpaceParams P = make_params(fam, false, 0.1, 0.3, -0.5, 2.0, 2.0, 0.3);
      double prev = outer_norm(c, P, 0).value;
      for (int m = 1; m <= 4; ++m) {
        const double v = outer_norm(c, P, m).value;
        worst = std::max(worst, std::abs(v / prev / factor - 1.0));
        prev = v;
      }
    }
  }
  rep.add(make_check("2^0.5 growth per virtual level", worst < 1e-9, worst, 1e-9));
  return rep;
}

// ---- 5: almost-diagonal boundedness -----------------------------------------------------------

namespace {

// Per kernel: least-squares slope of ln(max_c ||Ac|| / ||c||) against D.
std::vector<double> ad_slopes(const SuiteConfig& cfg, const AlmostDiagonalParams& ad, const SpaceParams& P,
                              std::uint64_t salt) {
  std::vector<std::vector<double>> logs(static_cast<std::size_t>(cfg.ad_kernels));
  std::vector<double> ds;
  for (int D : cfg.ad_depths) {
    ds.push_back(D);
    const Lattice lat(1, D, cfg.virtual_levels);
    std::vector<CoefField> cs;
    std::vector<double> norms;
    for (int r = 0; r < cfg.ad_inputs; ++r) {
      GaussianStream g(cfg.seed + salt + 7919ULL * static_cast<std::uint64_t>(r));
      CoefField c(1, D);
      for (int j = 0; j <= D; ++j)
        for (auto& z : c.level(j)) z = g.uniform() * std::exp2(-j * P.sprime);
      norms.push_back(outer_norm(c, P, cfg.virtual_levels).value);
      cs.push_back(std::move(c));
    }
    // The bound is shared by every kernel; each kernel rescales it by hashed factors in [0.5, 1].
    const std::size_t S = lat.total_cube_count();
    std::vector<double> bound(S * S);
    for (std::size_t a = 0; a < S; ++a) {
      const DyadicCube q = lat.cube_from_global(a);
      for (std::size_t b = 0; b < S; ++b) bound[a * S + b] = almost_diagonal_bound(lat, q, lat.cube_from_global(b), ad);
    }
    for (int k = 0; k < cfg.ad_kernels; ++k) {
      const std::uint64_t kseed = cfg.seed + salt + 104729ULL * static_cast<std::uint64_t>(k + 1);
      std::vector<double> entries(S * S);
      for (std::size_t a = 0; a < S; ++a)
        for (std::size_t b = 0; b < S; ++b) entries[a * S + b] = (0.5 + 0.5 * hash_unit(kseed, a, b)) * bound[a * S + b];
      const auto out = apply_matrix(CubeMatrix::dense(lat, std::move(entries)), cs);
      double best = 0.0;
      for (std::size_t r = 0; r < cs.size(); ++r) best = std::max(best, outer_norm(out[r], P, cfg.virtual_levels).value / norms[r]);
      logs[static_cast<std::size_t>(k)].push_back(std::log(best));
    }
  }
  std::vector<double> out;
  for (const auto& l : logs) out.push_back(slope(ds, l));
  return out;
}

}  // namespace

SuiteReport almost_diagonal_suite(const SuiteConfig& cfg, bool with_negative_control) {
  SuiteReport rep{"almost-diagonal", true, {}};
  require(cfg.ad_kernels > 0 && cfg.ad_inputs > 0 && cfg.ad_depths.size() >= 2, "almost-diagonal suite needs kernels, inputs and two depths");
  const SpaceParams P = make_params(Family::B, false, 0.3, 0.5, 0.2, 2.0, 2.0, 0.3);
  AlmostDiagonalParams ad{cfg.ad_r1, cfg.ad_r2, cfg.ad_L, 1.0};
  {
    const Lattice lat(1, cfg.ad_depths.front(), cfg.virtual_levels);
    const auto kernel = [&lat, &ad, &cfg](const DyadicCube& q, const DyadicCube& p) {
      return (0.5 + 0.5 * hash_unit(cfg.seed, lat.global_index(q), lat.global_index(p))) * almost_diagonal_bound(lat, q, p, ad);
    };
    const auto check = is_almost_diagonal(CubeMatrix::from_kernel(lat, kernel), ad);
    rep.add(make_check("random kernel is almost diagonal", check.passed, check.max_violation_ratio, 1.0));
  }
  const auto slopes = ad_slopes(cfg, ad, P, 0);
  double worst = 0.0;
  for (double s : slopes) worst = std::max(worst, std::abs(s));
  rep.add(make_check("bounded ratio, |log-slope| (L=" + fmt(ad.L) + ")", worst <= 0.15, worst, 0.15));
  if (with_negative_control) {
    AlmostDiagonalParams neg = ad;
    neg.L = cfg.ad_negative_L;
    const auto ns = ad_slopes(cfg, neg, P, 31337);
    double mean = 0.0;
    for (double s : ns) mean += s / static_cast<double>(ns.size());
    double least = *std::min_element(ns.begin(), ns.end());
    rep.add(make_check("negative control growth (L=" + fmt(neg.L) + "), mean slope", mean > 0.3, mean, 0.3,
                       "smallest kernel slope " + fmt(least)));
  }
  return rep;
}

// ---- 6: norm equivalence ----------------------------------------------------------------------

namespace {

std::vector<SpaceParams> equivalence_grid() {
  std::vector<SpaceParams> grid;
  struct Row {
    double s, sp, sigma, p, q;
  };
  const Row rows[] = {{0.2, 0.5, 0.2, 2.0, 2.0}, {0.0, 0.3, 0.0, 1.0, 1.0}, {-0.1, 0.8, -0.3, 2.0, kInf}, {0.3, 0.2, 0.5, kInf, kInf}};
  for (const auto& r : rows)
    for (Family fam : {Family::B, Family::F}) {
      if (fam == Family::F && std::isinf(r.p)) continue;
      for (bool tilde : {false, true}) {
        if (tilde && r.sigma < 0) continue;
        grid.push_back(make_params(fam, tilde, r.s, r.sp, r.sigma, r.p, r.q, 0.5));
      }
    }
  return grid;
}

const char* kPairNames[3] = {"phi/function", "wavelet/function", "wavelet/phi"};

}  // namespace

SuiteReport equivalence_suite(const SuiteConfig& cfg, bool calibrate) {
  SuiteReport rep{"equivalence", true, {}};
  require(cfg.depths.size() >= 2, "equivalence suite needs at least two depths");
  const WaveletSystem w = build_wavelet_system(8);
  const auto grid = equivalence_grid();
  std::vector<std::vector<CorpusEntry>> corpora;
  std::vector<FilterBank> banks;
  for (int D : cfg.depths) {
    corpora.push_back(suite_corpus(cfg, D));
    banks.push_back(build_filter_bank(1, D));
  }
  double lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    lo[a] = kInf;
    hi[a] = -kInf;
  }
  double drift = 0.0;
  std::string drift_at;
  std::size_t undefined = 0;
  std::size_t members = 0;
  std::string outside;
  for (std::size_t e = 0; e < corpora.front().size(); ++e)
    for (const auto& P : grid) {
      std::vector<EquivalenceReport> reps;
      for (std::size_t d = 0; d < cfg.depths.size(); ++d)
        reps.push_back(equivalence_report(corpora[d][e].signal, P, banks[d], w, cfg.virtual_levels));
      // Same divergence rule as the frontier scan, applied to the function-space norm alone.
      const double growth = std::log2(reps.back().function_norm / reps[reps.size() - 2].function_norm);
      if (growth > kDivergenceThreshold) {
        outside += corpora.front()[e].name + " " + params_key(P) + " (log2 growth " + fmt(growth) + "); ";
        continue;
      }
      ++members;
      double prev[3] = {0, 0, 0};
      for (std::size_t d = 0; d < reps.size(); ++d) {
        const auto& r = reps[d];
        const double v[3] = {r.log_phi_over_function, r.log_wavelet_over_function, r.log_wavelet_over_phi};
        for (int a = 0; a < 3; ++a) {
          if (!std::isfinite(v[a])) {
            ++undefined;
            continue;
          }
          lo[a] = std::min(lo[a], v[a]);
          hi[a] = std::max(hi[a], v[a]);
          if (d > 0 && std::abs(v[a] - prev[a]) > drift) {
            drift = std::abs(v[a] - prev[a]);
            drift_at = corpora[d][e].name + " " + params_key(P) + " " + kPairNames[a] + " D=" + std::to_string(cfg.depths[d]);
          }
          prev[a] = v[a];
        }
      }
    }
  const std::size_t total = corpora.front().size() * grid.size();
  rep.add(make_check("signal/parameter pairs inside the space", members > 0, static_cast<double>(members),
                     static_cast<double>(total), outside.empty() ? "all pairs" : "outside: " + outside));
  rep.add(make_check("log-ratio drift per level", drift < 0.2, drift, 0.2, drift_at));
  rep.add(make_check("all ratios defined", undefined == 0, static_cast<double>(undefined), 0.0));

  const double margin = 0.1;
  const std::string path = cfg.calibration_path;
  require(!path.empty(), "equivalence suite needs a calibration path");
  if (calibrate || !std::filesystem::exists(path)) {
    nlohmann::json bands = nlohmann::json::object();
    for (int a = 0; a < 3; ++a) bands[kPairNames[a]] = {lo[a] - margin, hi[a] + margin};
    nlohmann::json j = {{"schema", "v1"},
                        {"margin", margin},
                        {"depths", cfg.depths},
                        {"seed", cfg.seed},
                        {"random_count", cfg.random_count},
                        {"bands", bands}};
    std::ofstream out(path);
    require(static_cast<bool>(out), "cannot write calibration file " + path);
    out << j.dump(2) << '\n';
    rep.checks.push_back(make_check("calibration recorded", true, 0.0, 0.0, path));
  }
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot read calibration file " + path);
  nlohmann::json cal;
  try {
    cal = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidInput(std::string("malformed calibration file: ") + ex.what());
  }
  for (int a = 0; a < 3; ++a) {
    const auto band = cal.at("bands").at(kPairNames[a]);
    const double blo = band.at(0).get<double>();
    const double bhi = band.at(1).get<double>();
    const double out_of_band = std::max({0.0, blo - lo[a], hi[a] - bhi});
    rep.add(make_check(std::string("within calibrated band ") + kPairNames[a], out_of_band == 0.0, out_of_band, 0.0,
                       "observed [" + fmt(lo[a]) + ", " + fmt(hi[a]) + "], band [" + fmt(blo) + ", " + fmt(bhi) + "]"));
  }
  return rep;
}

// ---- 7: operators -----------------------------------------------------------------------------

SuiteReport operators_suite(const SuiteConfig& cfg) {
  SuiteReport rep{"operators", true, {}};
  require(cfg.depths.size() >= 2, "operators suite needs at least two depths");
  {
    double worst = 0.0;
    for (const auto& e : suite_corpus(cfg, cfg.depth))
      for (double mu : {-1.0, 0.5, 1.0})
        worst = std::max(worst, SampledSignal::relative_l2_error(bessel_potential(bessel_potential(e.signal, mu), -mu), e.signal));
    rep.add(make_check("Bessel round trip", worst < 1e-10, worst, 1e-10));
  }
  const std::vector<SpaceParams> grid{make_params(Family::B, false, 0.2, 0.5, 0.2, 2.0, 2.0, 0.5),
                                      make_params(Family::F, false, 0.2, 0.5, 0.2, 2.0, 2.0, 0.5),
                                      make_params(Family::B, true, 0.2, 0.5, 0.2, 2.0, 2.0, 0.5),
                                      make_params(Family::F, true, 0.2, 0.5, 0.2, 2.0, 2.0, 0.5)};
  std::vector<std::vector<CorpusEntry>> corpora;
  std::vector<FilterBank> banks;
  std::vector<double> ds;
  for (int D : cfg.depths) {
    corpora.push_back(suite_corpus(cfg, D));
    banks.push_back(build_filter_bank(1, D));
    ds.push_back(D);
  }
  const auto ratio_slopes = [&](const std::function<SampledSignal(const SampledSignal&)>& op, double shift,
                                std::string& where) {
    double worst = 0.0;
    for (std::size_t e = 0; e < corpora.front().size(); ++e)
      for (const auto& P : grid) {
        SpaceParams Q = P;
        Q.sprime = P.sprime - shift;
        std::vector<double> logs;
        for (std::size_t d = 0; d < ds.size(); ++d) {
          const auto& f = corpora[d][e].signal;
          logs.push_back(std::log(full_norm(op(f), Q, banks[d]).value / full_norm(f, P, banks[d]).value));
        }
        const double s = std::abs(slope(ds, logs));
        if (!(s <= worst)) {
          worst = s;
          where = corpora.front()[e].name + " " + params_key(P);
        }
      }
    return worst;
  };
  for (double mu : {-1.0, 0.5, 1.0}) {
    std::string where;
    const double s = ratio_slopes([mu](const SampledSignal& f) { return bessel_potential(f, mu); }, mu, where);
    rep.add(make_check("Bessel mu=" + fmt(mu) + " norm ratio |log-slope|", s < 0.15, s, 0.15, where));
  }
  {
    std::string where;
    const double s = ratio_slopes([](const SampledSignal& f) { return apply_multiplier(f, hilbert_multiplier(f.depth())); }, 0.0, where);
    rep.add(make_check("Hilbert-type multiplier norm ratio |log-slope|", s < 0.15, s, 0.15, where));
  }
  {
    const int D = cfg.depth;
    const auto cz = validate_cz_kernel(CZKernelSample::convolution(D, multiplier_kernel(hilbert_multiplier(D), D), 1, 0, 0.5));
    std::string detail = "decay exponents";
    for (double e : cz.decay_exponents) detail += " " + fmt(e);
    detail += "; size constants";
    for (double c : cz.size_constants) detail += " " + fmt(c);
    rep.add(make_check("Hilbert kernel satisfies the kernel bounds", cz.passed, cz.y_smoothness_constant, kInf, detail));
  }
  return rep;
}

// ---- 8: differences and oscillations ----------------------------------------------------------

SuiteReport differences_suite(const SuiteConfig& cfg) {
  SuiteReport rep{"differences", true, {}};
  require(cfg.depths.size() >= 2, "differences suite needs at least two depths");
  const int k = 2;
  // Exact annihilation of degree < k on integer data.
  {
    const int D = cfg.depth;
    const std::size_t n = std::size_t{1} << D;
    double worst = 0.0;
    for (int deg = 0; deg < k; ++deg) {
      std::vector<double> v(n);
      for (std::size_t m = 0; m < n; ++m) v[m] = deg == 0 ? 7.0 : 3.0 + 5.0 * static_cast<double>(m);
      const auto f = SampledSignal::from_real(1, D, v);
      for (long long t : {1LL, 3LL, 16LL}) {
        const auto d = kth_difference(f, t, k);
        for (std::size_t m = 0; m + static_cast<std::size_t>(k * t) < n; ++m) worst = std::max(worst, std::abs(d[m]));
      }
    }
    rep.add(make_check("Delta^k annihilates polynomials of degree < k", worst == 0.0, worst, 0.0));
  }
  struct Case {
    Family fam;
    double p;
  };
  const Case cases[] = {{Family::B, 1.0}, {Family::B, 2.0}, {Family::B, kInf}, {Family::F, 1.0}, {Family::F, 2.0}};
  const std::vector<double> sprimes{0.3, 0.6};
  std::vector<std::vector<CorpusEntry>> corpora;
  std::vector<FilterBank> banks;
  for (int D : cfg.depths) {
    corpora.push_back(suite_corpus(cfg, D));
    banks.push_back(build_filter_bank(1, D));
  }
  const std::size_t E = corpora.front().size();
  const std::size_t C = std::size(cases) * sprimes.size();
  // values[d][e][case] = {lhs, sup, osc, mean}
  std::vector<std::vector<std::vector<std::array<double, 4>>>> values(
      cfg.depths.size(), std::vector<std::vector<std::array<double, 4>>>(E, std::vector<std::array<double, 4>>(C)));
  double pointwise = 0.0;
  for (std::size_t d = 0; d < cfg.depths.size(); ++d)
    for (std::size_t e = 0; e < E; ++e) {
      const auto& f = corpora[d][e].signal;
      const auto lv = difference_levels(f, k, {1.0, 2.0, kInf});
      for (std::size_t i = 0; i < lv.sup.size(); ++i)
        for (std::size_t m = 0; m < f.size(); ++m) pointwise = std::max(pointwise, excess(lv.mean[i][m], lv.sup[i][m]));
      std::size_t c = 0;
      for (double sp : sprimes)
        for (const auto& cs : cases) {
          SpaceParams P = make_params(cs.fam, false, 0.1, sp, 0.1, cs.p, 2.0, 0.5);
          DifferenceSpec spec{k, cs.p, sp};
          const auto r = difference_norms(f, lv, P, spec, banks[d], cfg.virtual_levels);
          values[d][e][c++] = {r.lhs, r.sup_difference, r.oscillation, r.mean_difference};
        }
    }
  rep.add(make_check("d^k <= sup-difference pointwise", pointwise == 0.0, pointwise, 0.0));

  const char* names[4] = {"lhs", "sup-difference", "oscillation", "mean-difference"};
  double drift = 0.0;
  std::string drift_at;
  double c_drift = 0.0;
  std::string c_at;
  std::size_t c = 0;
  for (double sp : sprimes)
    for (const auto& cs : cases) {
      const std::string key = std::string(cs.fam == Family::B ? "B" : "F") + " p=" + fmt(cs.p) + " s'=" + fmt(sp);
      for (std::size_t e = 0; e < E; ++e)
        for (int a = 0; a < 4; ++a)
          for (int b = a + 1; b < 4; ++b)
            for (std::size_t d = 1; d < cfg.depths.size(); ++d) {
              const auto& v0 = values[d - 1][e][c];
              const auto& v1 = values[d][e][c];
              const double x = std::abs(std::log(v1[a] / v1[b]) - std::log(v0[a] / v0[b]));
              if (!(x <= drift)) {
                drift = x;
                drift_at = corpora.front()[e].name + " " + key + " " + names[a] + "/" + names[b] + " D=" + std::to_string(cfg.depths[d]);
              }
            }
      // Chain: sup-difference <= C1 oscillation, oscillation <= C2 (||f|| + d^k).
      std::vector<double> c1, c2;
      for (std::size_t d = 0; d < cfg.depths.size(); ++d) {
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t e = 0; e < E; ++e) {
          m1 = std::max(m1, values[d][e][c][1] / values[d][e][c][2]);
          m2 = std::max(m2, values[d][e][c][2] / values[d][e][c][3]);
        }
        c1.push_back(m1);
        c2.push_back(m2);
      }
      std::string consts = key + ": C1";
      for (double v : c1) consts += " " + fmt(v);
      consts += "; C2";
      for (double v : c2) consts += " " + fmt(v);
      for (std::size_t d = 1; d < c1.size(); ++d) {
        const double x = std::max(std::abs(std::log(c1[d] / c1[d - 1])), std::abs(std::log(c2[d] / c2[d - 1])));
        if (!(x <= c_drift)) {
          c_drift = x;
          c_at = consts;
        }
      }
      ++c;
    }
  rep.add(make_check("functional log-ratio drift per level", drift < 0.2, drift, 0.2, drift_at));
  rep.add(make_check("difference chain constants stable in D (log drift)", c_drift < 0.2, c_drift, 0.2, c_at));
  return rep;
}

// ---- 9: frontier ------------------------------------------------------------------------------

std::vector<FrontierCell> frontier_scan(const SampledSignal& f, double x0, const std::vector<double>& s_grid,
                                        const std::vector<double>& sprime_grid, double threshold) {
  require(f.dim() == 1, "frontier scan is implemented for n = 1");
  require(f.depth() >= 3, "frontier scan needs depth >= 3");
  const int D = f.depth();
  const FilterBank bank = build_filter_bank(1, D);
  const FilterBank coarse_bank = build_filter_bank(1, D - 1);
  const SampledSignal coarse = restrict_signal(f, D - 1);
  std::vector<FrontierCell> out;
  for (double s : s_grid)
    for (double sp : sprime_grid) {
      const SpaceParams P = make_params(Family::B, true, 0.0, s + sp, -sp, kInf, kInf, x0);
      FrontierCell cell;
      cell.s = s;
      cell.sprime = sp;
      cell.value = full_norm(f, P, bank).value;
      const double prev = full_norm(coarse, P, coarse_bank).value;
      cell.log2_growth = (cell.value > 0.0 && prev > 0.0) ? std::log2(cell.value / prev) : 0.0;
      cell.finite = cell.log2_growth <= threshold;
      out.push_back(cell);
    }
  return out;
}

std::vector<FrontierCell> frontier_oracle(const SampledSignal& f, double x0, const std::vector<double>& s_grid,
                                          const std::vector<double>& sprime_grid, int lo, int hi, double threshold) {
  require(f.dim() == 1, "frontier oracle is implemented for n = 1");
  const int D = f.depth();
  require(0 <= lo && lo < hi && hi <= D, "oracle level range invalid");
  const std::size_t n = f.size();
  const FilterBank bank = build_filter_bank(1, D);
  const Lattice lat(1, D, 0);
  // g[i][m] = |f * phi_i|(x_m) by direct quadrature against the sampled spatial kernel.
  std::vector<std::vector<double>> g;
  for (int i = lo; i <= hi; ++i) {
    std::vector<Complex> prof(bank.profile(i).begin(), bank.profile(i).end());
    const auto spatial = inverse_fft(prof, 1, D);
    std::vector<double> k(n);
    for (std::size_t m = 0; m < n; ++m) k[m] = spatial[m].real();
    std::vector<double> level(n);
    for (std::size_t x = 0; x < n; ++x) {
      Complex acc{};
      for (std::size_t y = 0; y < n; ++y) acc += k[(x + n - y) % n] * f[y];
      level[x] = std::abs(acc) / static_cast<double>(n);
    }
    g.push_back(std::move(level));
  }
  std::vector<double> dist(n);
  for (std::size_t m = 0; m < n; ++m) dist[m] = torus_distance(lat.grid_point(m), Point{x0, 0.0}, 1);
  std::vector<FrontierCell> out;
  for (double s : s_grid)
    for (double sp : sprime_grid) {
      std::vector<double> xs, ys;
      double top = 0.0;
      for (int i = lo; i <= hi; ++i) {
        const double side = std::ldexp(1.0, -i);
        double a = 0.0;
        for (std::size_t m = 0; m < n; ++m)
          a = std::max(a, g[static_cast<std::size_t>(i - lo)][m] * std::pow(side + dist[m], sp));
        a *= std::exp2(i * (s + sp));
        top = a;
        if (a > 0.0) {
          xs.push_back(i);
          ys.push_back(std::log2(a));
        }
      }
      FrontierCell cell;
      cell.s = s;
      cell.sprime = sp;
      cell.value = top;
      cell.log2_growth = xs.size() >= 2 ? slope(xs, ys) : 0.0;
      cell.finite = cell.log2_growth <= threshold;
      out.push_back(cell);
    }
  return out;
}

SuiteReport frontier_suite(const SuiteConfig& cfg) {
  SuiteReport rep{"frontier", true, {}};
  const std::vector<double> s_grid{0.1, 0.25, 0.4, 0.6, 0.8};
  const std::vector<double> sp_grid{-0.4, -0.2, 0.0, 0.2, 0.4};
  const auto scan = frontier_scan(cusp(cfg.depth, 0.5, 0.5), 0.5, s_grid, sp_grid);
  const auto oracle = frontier_oracle(cusp(12, 0.5, 0.5), 0.5, s_grid, sp_grid, 6, 11);
  int agree = 0;
  std::string mismatches;
  for (std::size_t a = 0; a < scan.size(); ++a) {
    if (scan[a].finite == oracle[a].finite) {
      ++agree;
    } else {
      mismatches += "(" + fmt(scan[a].s) + "," + fmt(scan[a].sprime) + ") ";
    }
  }
  rep.add(make_check("cusp frontier agrees with the quadrature oracle (cells)", agree >= 24, agree, 24,
                     mismatches.empty() ? "all cells agree" : "mismatch at " + mismatches));
  return rep;
}

}  // namespace microlocal
