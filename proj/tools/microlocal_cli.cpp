// microlocal: norm reports, suites, frontier scans and operator experiments.
//
// Exit codes: 0 success, 2 input or parameter error, 3 numeric overflow, 4 suite failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "microlocal/corpus.hpp"
#include "microlocal/errors.hpp"
#include "microlocal/funcnorm.hpp"
#include "microlocal/io.hpp"
#include "microlocal/lpdecomp.hpp"
#include "microlocal/operators.hpp"
#include "microlocal/suites.hpp"
#include "microlocal/synthesis.hpp"

#ifndef MICROLOCAL_DEFAULT_CALIBRATION
#define MICROLOCAL_DEFAULT_CALIBRATION "equivalence_calibration.json"
#endif

namespace ml = microlocal;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitOverflow = 3;
constexpr int kExitSuite = 4;

// Shared run configuration; config-file values apply wherever the flag was not given.
struct RunConfig {
  int depth = 10;
  int mvirtual = 4;
  int dim = 1;
  std::string family = "B";
  bool tilde = false;
  std::string s = "0", sprime = "0", sigma = "0", p = "2", q = "2";
  std::string x0 = "0.5";
  std::uint64_t seed = 20240601;
  std::string input;
  std::string fixture;
  std::string out;
  std::string config;
};

void add_common(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--depth", rc.depth, "grid depth D (N = 2^D per axis)");
  cmd->add_option("--mvirtual", rc.mvirtual, "virtual coarse levels");
  cmd->add_option("--dim", rc.dim, "dimension n");
  cmd->add_option("--family", rc.family, "B or F");
  cmd->add_flag("--tilde", rc.tilde, "tilde variant");
  cmd->add_option("--s", rc.s);
  cmd->add_option("--sprime", rc.sprime);
  cmd->add_option("--sigma", rc.sigma);
  cmd->add_option("--p", rc.p, "p, may be inf");
  cmd->add_option("--q", rc.q, "q, may be inf");
  cmd->add_option("--x0", rc.x0, "point x0, comma separated for n = 2");
  cmd->add_option("--seed", rc.seed, "corpus seed");
  cmd->add_option("--input", rc.input, "signal CSV");
  cmd->add_option("--fixture", rc.fixture, "corpus signal name instead of --input");
  cmd->add_option("--out", rc.out, "output file (stdout when omitted)");
  cmd->add_option("--config", rc.config, "key=value config file");
}

void apply_config(CLI::App* cmd, RunConfig& rc) {
  if (rc.config.empty()) return;
  const auto kv = ml::read_config_file(rc.config);
  for (const auto& [key, value] : kv) {
    const std::string flag = "--" + key;
    CLI::Option* opt = nullptr;
    try {
      opt = cmd->get_option(flag);
    } catch (const CLI::OptionNotFound&) {
      throw ml::InvalidInput("unknown config key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    if (key == "tilde") {
      rc.tilde = value == "1" || value == "true" || value == "yes";
      continue;
    }
    opt->add_result(value);
    opt->run_callback();
  }
}

ml::Point parse_point(const std::string& text, int dim) {
  ml::Point x{};
  std::stringstream ss(text);
  std::string part;
  int a = 0;
  while (std::getline(ss, part, ',')) {
    ml::require(a < dim, "x0 has more than n coordinates");
    x[static_cast<std::size_t>(a++)] = ml::parse_number(part, "x0");
  }
  ml::require(a == dim || a == 1, "x0 needs n coordinates");
  if (a == 1) x[1] = x[0];
  if (dim == 1) x[1] = 0.0;
  return x;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(ml::parse_number(part, what));
  ml::require(!out.empty(), what + " is empty");
  return out;
}

ml::SpaceParams make_params(const RunConfig& rc) {
  ml::require(rc.dim == 1 || rc.dim == 2, "--dim must be 1 or 2");
  ml::require(rc.depth >= 4 && rc.depth <= 14, "--depth must lie in [4, 14]");
  ml::require(rc.mvirtual >= 0, "--mvirtual must be nonnegative");
  ml::SpaceParams P;
  ml::require(rc.family == "B" || rc.family == "F", "--family must be B or F");
  P.family = rc.family == "B" ? ml::Family::B : ml::Family::F;
  P.tilde = rc.tilde;
  P.s = ml::parse_number(rc.s, "s");
  P.sprime = ml::parse_number(rc.sprime, "sprime");
  P.sigma = ml::parse_number(rc.sigma, "sigma");
  P.p = ml::parse_number(rc.p, "p");
  P.q = ml::parse_number(rc.q, "q");
  P.x0 = parse_point(rc.x0, rc.dim);
  P.validate(rc.dim);
  return P;
}

ml::SampledSignal load_signal(const RunConfig& rc) {
  ml::require(rc.input.empty() != rc.fixture.empty(), "give exactly one of --input and --fixture");
  if (!rc.input.empty()) {
    auto f = ml::read_signal_csv(rc.input, rc.dim);
    ml::require(f.depth() >= 4 && f.depth() <= 14, "signal depth must lie in [4, 14]");
    return f;
  }
  ml::require(rc.dim == 1, "fixtures are one-dimensional");
  ml::require(rc.depth >= 4 && rc.depth <= 14, "--depth must lie in [4, 14]");
  for (auto& e : ml::standard_corpus(rc.depth, 20, rc.seed))
    if (e.name == rc.fixture) return e.signal;
  throw ml::InvalidInput("unknown fixture '" + rc.fixture + "'");
}

void emit(const RunConfig& rc, const std::string& text) {
  if (rc.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(rc.out, std::ios::binary);
  ml::require(static_cast<bool>(out), "cannot write " + rc.out);
  out << text;
}

std::string signal_text(const ml::SampledSignal& f) {
  std::ostringstream os;
  ml::write_signal_csv(os, f);
  return os.str();
}

double log_ratio(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) return std::nan("");
  return std::log(a / b);
}

// ---- commands ---------------------------------------------------------------------------------

struct AnalyzeOpts {
  std::string levels;
  bool per_cube = false;
  bool truncation = false;
};

int cmd_analyze(const RunConfig& rc, const AnalyzeOpts& o) {
  const auto f = load_signal(rc);
  const auto P = make_params(rc);
  const auto bank = ml::build_filter_bank(f.dim(), f.depth());
  ml::FullNormOptions opts;
  opts.virtual_levels = rc.mvirtual;
  opts.keep_table = o.per_cube || !o.levels.empty();
  opts.truncation_delta = o.truncation;
  auto rep = ml::full_norm(f, P, bank, opts);
  if (!o.levels.empty()) {
    // Plot data: per level, the largest local norm and its l(P)^-s weighted value.
    const auto& t = *rep.per_cube;
    std::ostringstream os;
    os << "level,max_local_norm,max_weighted_local_norm\n";
    for (int j = 0; j <= t.lattice.depth(); ++j) {
      double m = 0.0;
      const std::size_t off = t.lattice.level_offset(j);
      for (std::size_t a = 0; a < t.lattice.cube_count(j); ++a) m = std::max(m, t.values[off + a]);
      os << j << ',' << ml::format_number(m) << ',' << ml::format_number(std::exp2(j * P.s) * m) << '\n';
    }
    std::ofstream out(o.levels, std::ios::binary);
    ml::require(static_cast<bool>(out), "cannot write " + o.levels);
    out << os.str();
  }
  if (!o.per_cube) rep.per_cube.reset();
  emit(rc, ml::norm_report_to_json(rep).dump(2) + "\n");
  return 0;
}

struct EquivalenceOpts {
  std::string methods = "lp,phi,wavelet";
  int wavelet = 8;
  int k = 2;
};

int cmd_equivalence(const RunConfig& rc, const EquivalenceOpts& o) {
  const auto f = load_signal(rc);
  const auto P = make_params(rc);
  const auto bank = ml::build_filter_bank(f.dim(), f.depth());
  std::vector<std::string> methods;
  {
    std::stringstream ss(o.methods);
    std::string m;
    while (std::getline(ss, m, ',')) methods.push_back(m);
  }
  ml::require(!methods.empty(), "--methods is empty");
  std::map<std::string, double> values;
  std::optional<ml::DifferenceNorms> diff;
  for (const auto& m : methods) {
    if (values.count(m)) continue;
    if (m == "lp") {
      values[m] = ml::full_norm(f, P, bank, {rc.mvirtual, false, false}).value;
    } else if (m == "phi") {
      values[m] = ml::outer_norm(ml::phi_analysis(f, bank), P, rc.mvirtual).value;
    } else if (m == "wavelet") {
      ml::require(f.dim() == 1, "wavelet norms are implemented for n = 1");
      const auto w = ml::build_wavelet_system(o.wavelet);
      values[m] = ml::wavelet_sequence_norm(ml::wavelet_analysis(f, w), P, rc.mvirtual);
    } else if (m == "difference_lhs" || m == "sup_difference" || m == "oscillation" || m == "mean_difference") {
      if (!diff) {
        ml::DifferenceSpec spec{o.k, P.p, P.sprime};
        diff = ml::difference_norms(f, P, spec, bank, rc.mvirtual);
      }
      values[m] = m == "difference_lhs"   ? diff->lhs
                  : m == "sup_difference" ? diff->sup_difference
                  : m == "oscillation"    ? diff->oscillation
                                          : diff->mean_difference;
    } else {
      throw ml::InvalidInput("unknown method '" + m + "'");
    }
  }
  std::ostringstream os;
  os << "method,value,log_ratio_to_" << methods.front() << '\n';
  for (const auto& m : methods)
    os << m << ',' << ml::format_number(values[m]) << ',' << ml::format_number(log_ratio(values[m], values[methods.front()]))
       << '\n';
  emit(rc, os.str());
  return 0;
}

struct SuiteOpts {
  std::string name;
  std::string calibration = MICROLOCAL_DEFAULT_CALIBRATION;
  bool calibrate = false;
  bool negative_control = false;
  std::optional<double> ad_L;
  std::optional<int> random_count;
  std::optional<std::string> fixtures;
};

int cmd_suite(const RunConfig& rc, const SuiteOpts& o) {
  ml::SuiteConfig cfg;
  cfg.depth = rc.depth;
  cfg.virtual_levels = rc.mvirtual;
  cfg.seed = rc.seed;
  cfg.calibration_path = o.calibration;
  if (o.ad_L) cfg.ad_L = *o.ad_L;
  if (o.random_count) cfg.random_count = *o.random_count;
  if (o.fixtures) {
    cfg.fixtures.clear();
    std::stringstream ss(*o.fixtures);
    std::string name;
    while (std::getline(ss, name, ','))
      if (!name.empty() && name != "none") cfg.fixtures.push_back(name);
  }
  // Validates the corpus selection before any suite work.
  ml::suite_corpus(cfg, 4);

  std::vector<ml::SuiteReport> reports;
  const auto run = [&](const std::string& name) {
    if (name == "filter-bank") reports.push_back(ml::filter_bank_suite(cfg));
    else if (name == "round-trips") reports.push_back(ml::round_trip_suite(cfg));
    else if (name == "embeddings") reports.push_back(ml::embeddings_suite(cfg));
    else if (name == "degeneracy") reports.push_back(ml::degeneracy_suite(cfg));
    else if (name == "almost-diagonal") reports.push_back(ml::almost_diagonal_suite(cfg, o.negative_control));
    else if (name == "equivalence") reports.push_back(ml::equivalence_suite(cfg, o.calibrate));
    else if (name == "operators") reports.push_back(ml::operators_suite(cfg));
    else if (name == "differences") reports.push_back(ml::differences_suite(cfg));
    else if (name == "frontier") reports.push_back(ml::frontier_suite(cfg));
    else throw ml::InvalidInput("unknown suite '" + name + "'");
  };
  if (o.name == "all") {
    for (const char* n : {"filter-bank", "round-trips", "embeddings", "degeneracy", "almost-diagonal", "equivalence",
                          "operators", "differences", "frontier"})
      run(n);
  } else {
    run(o.name);
  }
  bool passed = true;
  nlohmann::json j;
  if (reports.size() == 1) {
    j = reports.front().to_json();
    passed = reports.front().passed;
  } else {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
      arr.push_back(r.to_json());
      passed = passed && r.passed;
    }
    j = {{"schema", "v1"}, {"suite", "all"}, {"passed", passed}, {"suites", arr}};
  }
  emit(rc, j.dump(2) + "\n");
  return passed ? 0 : kExitSuite;
}

struct FrontierOpts {
  std::string s_grid = "0.1,0.25,0.4,0.6,0.8";
  std::string sprime_grid = "-0.4,-0.2,0,0.2,0.4";
  double threshold = 0.05;
  bool oracle = false;
};

int cmd_frontier(const RunConfig& rc, const FrontierOpts& o) {
  const auto f = load_signal(rc);
  ml::require(f.dim() == 1, "frontier scans are implemented for n = 1");
  const double x0 = parse_point(rc.x0, 1)[0];
  const auto sg = parse_list(o.s_grid, "s grid");
  const auto spg = parse_list(o.sprime_grid, "sprime grid");
  const auto cells = o.oracle ? ml::frontier_oracle(f, x0, sg, spg, std::max(0, f.depth() - 6), f.depth() - 1, o.threshold)
                              : ml::frontier_scan(f, x0, sg, spg, o.threshold);
  std::ostringstream os;
  os << "s,sprime,finite,value," << (o.oracle ? "log2_slope" : "log2_growth") << '\n';
  for (const auto& c : cells)
    os << ml::format_number(c.s) << ',' << ml::format_number(c.sprime) << ',' << (c.finite ? 1 : 0) << ','
       << ml::format_number(c.value) << ',' << ml::format_number(c.log2_growth) << '\n';
  emit(rc, os.str());
  return 0;
}

struct SynthesizeOpts {
  std::string coefs;
  std::string method = "wavelet";
  int wavelet = 8;
  int r2 = 2;
};

int cmd_synthesize(const RunConfig& rc, const SynthesizeOpts& o) {
  ml::require(!o.coefs.empty(), "--coefs is required");
  std::ifstream in(o.coefs);
  ml::require(static_cast<bool>(in), "cannot read " + o.coefs);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw ml::InvalidInput(std::string("malformed coefficient JSON: ") + ex.what());
  }
  const auto c = ml::coef_field_from_json(j);
  ml::SampledSignal f;
  if (o.method == "wavelet") {
    ml::require(c.dim() == 1, "wavelet synthesis is implemented for n = 1");
    ml::WaveletCoefficients wc{{}, c};
    if (j.contains("c0")) {
      const auto& z = j.at("c0");
      wc.c0 = z.is_array() ? ml::Complex(z.at(0).get<double>(), z.at(1).get<double>()) : ml::Complex(z.get<double>(), 0.0);
    }
    f = ml::wavelet_synthesis(wc, ml::build_wavelet_system(o.wavelet));
  } else if (o.method == "atom") {
    f = ml::atom_synthesis(c, ml::AtomFamily{c.dim(), c.depth(), o.r2});
  } else if (o.method == "phi") {
    f = ml::phi_synthesis(c, ml::build_dual_bank(ml::build_filter_bank(c.dim(), c.depth())));
  } else {
    throw ml::InvalidInput("unknown synthesis method '" + o.method + "'");
  }
  emit(rc, signal_text(f));
  return 0;
}

struct OperatorOpts {
  std::string op = "bessel";
  double mu = 1.0;
  std::string symbol;
};

int cmd_operator(const RunConfig& rc, const OperatorOpts& o) {
  const auto f = load_signal(rc);
  ml::SampledSignal g;
  if (o.op == "bessel") {
    g = ml::bessel_potential(f, o.mu);
  } else if (o.op == "hilbert") {
    ml::require(f.dim() == 1, "the Hilbert-type multiplier is implemented for n = 1");
    g = ml::apply_multiplier(f, ml::hilbert_multiplier(f.depth()));
  } else if (o.op == "symbol") {
    ml::require(!o.symbol.empty(), "--symbol is required for --op symbol");
    g = ml::apply_pseudo_diff(f, ml::SymbolGrid::load_csv(o.symbol, o.mu));
  } else if (o.op == "identity") {
    g = f;
  } else {
    throw ml::InvalidInput("unknown operator '" + o.op + "'");
  }
  emit(rc, signal_text(g));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2-microlocal Besov / Triebel-Lizorkin norms on the periodic grid"};
  app.require_subcommand(1);
  RunConfig rc;

  auto* analyze = app.add_subcommand("analyze", "norm report (JSON)");
  add_common(analyze, rc);
  AnalyzeOpts ao;
  analyze->add_option("--levels", ao.levels, "write level vs local norm CSV here");
  analyze->add_flag("--per-cube", ao.per_cube, "include the per-cube table");
  analyze->add_flag("--truncation", ao.truncation, "report value(D) - value(D-1)");

  auto* equivalence = app.add_subcommand("equivalence", "norms by several methods (CSV)");
  add_common(equivalence, rc);
  EquivalenceOpts eo;
  equivalence->add_option("--methods", eo.methods,
                          "comma list of lp, phi, wavelet, difference_lhs, sup_difference, oscillation, mean_difference");
  equivalence->add_option("--wavelet", eo.wavelet, "Daubechies vanishing moments");
  equivalence->add_option("--k", eo.k, "difference order");

  auto* suite = app.add_subcommand("suite", "property suite (JSON), exit 4 on failure");
  add_common(suite, rc);
  SuiteOpts so;
  suite->add_option("name", so.name,
                    "filter-bank, round-trips, embeddings, degeneracy, almost-diagonal, equivalence, operators, "
                    "differences, frontier or all")
      ->required();
  suite->add_option("--calibration", so.calibration, "equivalence band file");
  suite->add_flag("--calibrate", so.calibrate, "re-record the equivalence band");
  suite->add_flag("--negative-control", so.negative_control, "almost-diagonal: add the L < n run");
  suite->add_option("--ad-L", so.ad_L, "almost-diagonal decay exponent L");
  suite->add_option("--random-count", so.random_count, "seeded random corpus signals");
  suite->add_option("--fixtures", so.fixtures, "comma list of fixture names, or none");

  auto* frontier = app.add_subcommand("frontier", "2-microlocal frontier scan (CSV)");
  add_common(frontier, rc);
  FrontierOpts fo;
  frontier->add_option("--s-grid", fo.s_grid);
  frontier->add_option("--sprime-grid", fo.sprime_grid);
  frontier->add_option("--threshold", fo.threshold, "log2 growth treated as divergence");
  frontier->add_flag("--oracle", fo.oracle, "direct-quadrature level-slope classification");

  auto* synthesize = app.add_subcommand("synthesize", "coefficient JSON to signal CSV");
  add_common(synthesize, rc);
  SynthesizeOpts yo;
  synthesize->add_option("--coefs", yo.coefs, "coefficient field JSON");
  synthesize->add_option("--method", yo.method, "wavelet, atom or phi");
  synthesize->add_option("--wavelet", yo.wavelet, "Daubechies vanishing moments");
  synthesize->add_option("--r2", yo.r2, "atom vanishing moments");

  auto* op = app.add_subcommand("operator", "apply an operator, emit signal CSV");
  add_common(op, rc);
  OperatorOpts oo;
  op->add_option("--op", oo.op, "bessel, hilbert, symbol or identity");
  op->add_option("--mu", oo.mu, "Bessel order or symbol order");
  op->add_option("--symbol", oo.symbol, "symbol grid CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    apply_config(cmd, rc);
    if (cmd == analyze) return cmd_analyze(rc, ao);
    if (cmd == equivalence) return cmd_equivalence(rc, eo);
    if (cmd == suite) return cmd_suite(rc, so);
    if (cmd == frontier) return cmd_frontier(rc, fo);
    if (cmd == synthesize) return cmd_synthesize(rc, yo);
    return cmd_operator(rc, oo);
  } catch (const ml::NumericOverflow& e) {
    std::cerr << "error: numeric overflow: " << e.what() << '\n';
    return kExitOverflow;
  } catch (const ml::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}
