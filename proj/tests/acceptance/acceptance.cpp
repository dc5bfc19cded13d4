// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [--only N]... [--calibrate] [--json FILE] [--verbose]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <set>
#include <unistd.h>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "microlocal/errors.hpp"
#include "microlocal/io.hpp"
#include "microlocal/suites.hpp"

#ifndef MICROLOCAL_CLI_PATH
#error "MICROLOCAL_CLI_PATH must be defined"
#endif
#ifndef MICROLOCAL_CALIBRATION_PATH
#error "MICROLOCAL_CALIBRATION_PATH must be defined"
#endif

namespace ml = microlocal;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return rc;
}

// Runs each CLI invocation twice into separate directories and compares the produced files.
ml::SuiteReport determinism_check() {
  ml::SuiteReport rep{"determinism", true, {}};
  const fs::path root = fs::temp_directory_path() / ("microlocal_determinism_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const std::string cli = MICROLOCAL_CLI_PATH;
  struct Invocation {
    std::string label;
    std::string args;
    std::string file;
  };
  const std::vector<Invocation> runs{
      {"analyze", "analyze --fixture cusp --depth 10 --family B --tilde --s 0 --sprime 0.5 --sigma -0.25 --p inf --q inf --levels {dir}/levels.csv --out {dir}/analyze.json", "analyze.json"},
      {"analyze levels", "", "levels.csv"},
      {"equivalence", "equivalence --fixture random_03 --depth 9 --family F --s 0.2 --sprime 0.5 --sigma 0.2 --p 2 --q 2 --out {dir}/equivalence.csv", "equivalence.csv"},
      {"frontier", "frontier --fixture cusp --depth 9 --x0 0.5 --out {dir}/frontier.csv", "frontier.csv"},
      {"operator", "operator --fixture weierstrass --depth 9 --op hilbert --out {dir}/hilbert.csv", "hilbert.csv"},
      {"suite", "suite degeneracy --out {dir}/suite.json", "suite.json"},
  };
  for (int pass = 0; pass < 2; ++pass) {
    const fs::path dir = root / std::to_string(pass);
    fs::create_directories(dir);
    for (const auto& r : runs) {
      if (r.args.empty()) continue;
      std::string args = r.args;
      for (std::size_t at; (at = args.find("{dir}")) != std::string::npos;) args.replace(at, 5, dir.string());
      const int rc = run("\"" + cli + "\" " + args + " > /dev/null");
      if (rc != 0) rep.add({r.label + " exit status", false, static_cast<double>(rc), 0.0, args});
    }
  }
  for (const auto& r : runs) {
    const auto a = slurp(root / "0" / r.file);
    const auto b = slurp(root / "1" / r.file);
    rep.add({r.label + " byte-identical (" + std::to_string(a.size()) + " bytes)", !a.empty() && a == b,
             static_cast<double>(a.size()), 0.0, r.file});
  }
  fs::remove_all(root);
  return rep;
}

std::string summary(const ml::SuiteReport& r) {
  // The first failing check, or the first check when everything passes.
  const ml::Check* pick = r.checks.empty() ? nullptr : &r.checks.front();
  for (const auto& c : r.checks)
    if (!c.passed) {
      pick = &c;
      break;
    }
  if (!pick) return "";
  return pick->name + ": " + ml::format_number(pick->value) + " (threshold " + ml::format_number(pick->threshold) + ")";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"microlocal acceptance criteria"};
  std::vector<int> only;
  bool calibrate = false;
  bool verbose = false;
  std::string json_path;
  app.add_option("--only", only, "criteria to run (1-10)")->check(CLI::Range(1, 10));
  app.add_flag("--calibrate", calibrate, "re-record the equivalence calibration band");
  app.add_flag("--verbose", verbose, "print every check");
  app.add_option("--json", json_path, "write the full report here");
  CLI11_PARSE(app, argc, argv);

  ml::SuiteConfig cfg;
  cfg.calibration_path = MICROLOCAL_CALIBRATION_PATH;

  struct Criterion {
    int id;
    std::string title;
    std::function<ml::SuiteReport()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "filter-bank exactness", [&] { return ml::filter_bank_suite(cfg); }},
      {2, "phi-transform and wavelet round trips", [&] { return ml::round_trip_suite(cfg); }},
      {3, "exact-inequality embeddings", [&] { return ml::embeddings_suite(cfg); }},
      {4, "virtual-level degeneracy for sigma < 0", [&] { return ml::degeneracy_suite(cfg); }},
      {5, "almost-diagonal boundedness and negative control", [&] { return ml::almost_diagonal_suite(cfg, true); }},
      {6, "norm-equivalence stability", [&] { return ml::equivalence_suite(cfg, calibrate); }},
      {7, "operator mapping", [&] { return ml::operators_suite(cfg); }},
      {8, "difference and oscillation equivalence", [&] { return ml::differences_suite(cfg); }},
      {9, "frontier oracle agreement", [&] { return ml::frontier_suite(cfg); }},
      {10, "determinism", [] { return determinism_check(); }},
  };

  const std::set<int> selected(only.begin(), only.end());
  nlohmann::json all = nlohmann::json::array();
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    ml::SuiteReport rep;
    try {
      rep = c.run();
    } catch (const std::exception& ex) {
      rep = ml::SuiteReport{c.title, false, {}};
      rep.add({"exception", false, 0.0, 0.0, ex.what()});
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += rep.passed ? 0 : 1;
    std::printf("%s  C%-2d %-48s %s [%.1fs]\n", rep.passed ? "PASS" : "FAIL", c.id, c.title.c_str(),
                summary(rep).c_str(), secs);
    if (verbose || !rep.passed)
      for (const auto& k : rep.checks)
        std::printf("        %s %s = %s (threshold %s)%s%s\n", k.passed ? "ok  " : "FAIL", k.name.c_str(),
                    ml::format_number(k.value).c_str(), ml::format_number(k.threshold).c_str(),
                    k.detail.empty() ? "" : "  ", k.detail.c_str());
    std::fflush(stdout);
    auto j = rep.to_json();
    j["criterion"] = c.id;
    j["seconds"] = secs;
    all.push_back(std::move(j));
  }
  if (!json_path.empty()) std::ofstream(json_path) << all.dump(2) << '\n';
  return failures == 0 ? 0 : 1;
}
