#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "microlocal/corpus.hpp"
#include "microlocal/errors.hpp"
#include "microlocal/io.hpp"
#include "microlocal/lpdecomp.hpp"

using namespace microlocal;

TEST_CASE("signal csv round trip") {
  const auto f = band_limited_noise(6, 3);
  std::stringstream ss;
  write_signal_csv(ss, f);
  const auto g = parse_signal_csv(ss, 1);
  CHECK(g.depth() == 6);
  for (std::size_t m = 0; m < f.size(); ++m) CHECK(g[m] == f[m]);

  std::vector<Complex> v(16);
  for (std::size_t m = 0; m < v.size(); ++m) v[m] = Complex(0.1 * m, -0.3 * m);
  const SampledSignal c(2, 2, v);
  std::stringstream s2;
  write_signal_csv(s2, c);
  const auto d = parse_signal_csv(s2, 2);
  CHECK(d.dim() == 2);
  CHECK(d.depth() == 2);
  for (std::size_t m = 0; m < v.size(); ++m) CHECK(d[m] == v[m]);

  std::stringstream bad("1\n2\nx\n4\n");
  CHECK_THROWS_AS(parse_signal_csv(bad, 1), InvalidInput);
  std::stringstream shortf("1\n2\n3\n");
  CHECK_THROWS_AS(parse_signal_csv(shortf, 1), InvalidInput);
  std::stringstream odd("1\n2\n3\n4\n5\n6\n7\n8\n");
  CHECK_THROWS_AS(parse_signal_csv(odd, 2), InvalidInput);
}

TEST_CASE("coefficient json round trip") {
  CoefField c(1, 4);
  c.level(2)[1] = Complex(1.5, -2.0);
  c.level(4)[7] = 0.25;
  const auto j = coef_field_to_json(c);
  CHECK(j["schema"] == "v1");
  const auto back = coef_field_from_json(nlohmann::json::parse(j.dump()));
  for (int l = 0; l <= 4; ++l)
    for (std::size_t k = 0; k < c.level(l).size(); ++k) CHECK(back.level(l)[k] == c.level(l)[k]);
  auto broken = j;
  broken["levels"][2].push_back(1.0);
  CHECK_THROWS_AS(coef_field_from_json(broken), InvalidInput);
}

TEST_CASE("numbers and config") {
  CHECK(parse_number("inf", "p") == kInf);
  CHECK(parse_number(" 2.5 ", "p") == 2.5);
  CHECK(parse_number("+1e-3", "p") == 1e-3);
  CHECK_THROWS_AS(parse_number("2.5x", "p"), InvalidInput);
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(0.1) == "0.1");

  const std::string path = "cfg_test.txt";
  {
    std::ofstream out(path);
    out << "# comment\n depth = 8 \nfamily=F # trailing\n\n";
  }
  const auto cfg = read_config_file(path);
  CHECK(cfg.at("depth") == "8");
  CHECK(cfg.at("family") == "F");
  {
    std::ofstream out(path);
    out << "novalue\n";
  }
  CHECK_THROWS_AS(read_config_file(path), InvalidInput);
  std::remove(path.c_str());
}

TEST_CASE("corpus fixtures") {
  const auto a = standard_corpus(8);
  const auto b = standard_corpus(8);
  REQUIRE(a.size() == 25);
  for (std::size_t e = 0; e < a.size(); ++e) {
    CHECK(a[e].name == b[e].name);
    CHECK(a[e].signal.values() == b[e].signal.values());
    CHECK(a[e].signal.is_real());
    CHECK(a[e].signal.l2_norm() > 0.0);
  }
  const auto c = cusp(8);
  CHECK(c[128].real() == 0.0);
  CHECK(c[0].real() == 0.0);  // outside the window
  CHECK(c[130].real() == doctest::Approx(std::sqrt(2.0 / 256)));

  // Band-limited fixtures are the same function at every depth.
  const auto hi = band_limited_noise(10, 5);
  const auto lo = band_limited_noise(8, 5);
  CHECK(SampledSignal::relative_l2_error(restrict_signal(hi, 8), lo) < 1e-12);
  const auto w10 = weierstrass(10);
  const auto w8 = weierstrass(8);
  for (std::size_t m = 0; m < 256; ++m) CHECK(std::abs(w10[4 * m] - w8[m]) < 1e-12);
}
