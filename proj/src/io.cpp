#include "microlocal/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "microlocal/errors.hpp"

namespace microlocal {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

nlohmann::json complex_to_json(Complex z) {
  if (z.imag() == 0.0) return z.real();
  return nlohmann::json::array({z.real(), z.imag()});
}

Complex complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
          "coefficient entries must be numbers or [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& text, const std::string& what) {
  std::string t = trim(text);
  std::string lower(t);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "inf" || lower == "infinity" || lower == "+inf") return kInf;
  if (lower == "-inf" || lower == "-infinity") return -kInf;
  double v = 0.0;
  const char* b = t.data();
  const char* e = t.data() + t.size();
  if (!t.empty() && *b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  require(res.ec == std::errc() && res.ptr == e && !t.empty(), "malformed number for " + what + ": '" + text + "'");
  return v;
}

SampledSignal parse_signal_csv(std::istream& in, int dim) {
  require(dim == 1 || dim == 2, "dimension must be 1 or 2");
  std::vector<Complex> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto comma = t.find(',');
    const std::string where = "signal line " + std::to_string(lineno);
    if (comma == std::string::npos) {
      values.emplace_back(parse_number(t, where), 0.0);
    } else {
      require(t.find(',', comma + 1) == std::string::npos, "too many fields on " + where);
      values.emplace_back(parse_number(t.substr(0, comma), where), parse_number(t.substr(comma + 1), where));
    }
  }
  const std::size_t n = values.size();
  require(n >= 2 && std::has_single_bit(n), "signal length must be 2^(n D)");
  const int bits = std::countr_zero(n);
  require(bits % dim == 0, "signal length must be 2^(n D)");
  return SampledSignal(dim, bits / dim, std::move(values));
}

SampledSignal read_signal_csv(const std::string& path, int dim) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open signal file " + path);
  return parse_signal_csv(in, dim);
}

void write_signal_csv(std::ostream& out, const SampledSignal& f) {
  const bool real = f.is_real();
  for (std::size_t m = 0; m < f.size(); ++m) {
    out << format_number(f[m].real());
    if (!real) out << ',' << format_number(f[m].imag());
    out << '\n';
  }
}

nlohmann::json coef_field_to_json(const CoefField& c) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& lv : c.levels()) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& z : lv) a.push_back(complex_to_json(z));
    levels.push_back(std::move(a));
  }
  return {{"schema", "v1"}, {"n", c.dim()}, {"D", c.depth()}, {"levels", std::move(levels)}};
}

CoefField coef_field_from_json(const nlohmann::json& j) {
  require(j.is_object(), "coefficient JSON must be an object");
  if (j.contains("schema")) require(j["schema"] == "v1", "unsupported coefficient schema");
  require(j.contains("n") && j.contains("levels"), "coefficient JSON needs n and levels");
  const int dim = j["n"].get<int>();
  std::vector<std::vector<Complex>> levels;
  for (const auto& lv : j["levels"]) {
    require(lv.is_array(), "each level must be an array");
    std::vector<Complex> v;
    v.reserve(lv.size());
    for (const auto& e : lv) v.push_back(complex_from_json(e));
    levels.push_back(std::move(v));
  }
  CoefField c = CoefField::from_levels(dim, std::move(levels));
  if (j.contains("D")) require(j["D"].get<int>() == c.depth(), "D does not match the number of levels");
  return c;
}

nlohmann::json cube_to_json(const DyadicCube& q) {
  nlohmann::json k = nlohmann::json::array();
  k.push_back(q.k[0]);
  k.push_back(q.k[1]);
  return {{"level", q.level}, {"k", std::move(k)}};
}

namespace {

nlohmann::json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

nlohmann::json space_params_to_json(const SpaceParams& p) {
  return {{"family", p.family == Family::B ? "B" : "F"},
          {"tilde", p.tilde},
          {"s", p.s},
          {"sprime", p.sprime},
          {"sigma", p.sigma},
          {"p", number_json(p.p)},
          {"q", number_json(p.q)},
          {"x0", nlohmann::json::array({p.x0[0], p.x0[1]})}};
}

nlohmann::json norm_report_to_json(const NormReport& r) {
  nlohmann::json j = {{"schema", "v1"},
                      {"value", number_json(r.value)},
                      {"witness_Q", cube_to_json(r.witness_Q)},
                      {"witness_P", cube_to_json(r.witness_P)},
                      {"params", space_params_to_json(r.params)},
                      {"depth", r.depth},
                      {"M_virtual", r.virtual_levels}};
  if (r.truncation_delta) j["truncation_delta"] = number_json(*r.truncation_delta);
  if (r.per_cube) {
    nlohmann::json rows = nlohmann::json::array();
    const auto& t = *r.per_cube;
    for (std::size_t g = 0; g < t.values.size(); ++g) {
      const DyadicCube q = t.lattice.cube_from_global(g);
      nlohmann::json row = cube_to_json(q);
      row["local"] = number_json(t.values[g]);
      rows.push_back(std::move(row));
    }
    j["per_cube"] = std::move(rows);
  }
  return j;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    require(eq != std::string::npos, "config line " + std::to_string(lineno) + " is not key=value");
    const std::string key = trim(t.substr(0, eq));
    require(!key.empty(), "empty key on config line " + std::to_string(lineno));
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

}  // namespace microlocal
