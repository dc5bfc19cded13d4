#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "json.hpp"
#include "microlocal/seqspace.hpp"
#include "microlocal/signal.hpp"

namespace microlocal {

// One value per line, either "re" or "re,im"; length 2^(n D), row-major for n = 2. Blank lines
// and '#' comments are skipped.
SampledSignal read_signal_csv(const std::string& path, int dim);
SampledSignal parse_signal_csv(std::istream& in, int dim);
void write_signal_csv(std::ostream& out, const SampledSignal& f);

// {"schema": "v1", "n": n, "D": D, "levels": [[...], ...]}; entries are reals or [re, im].
nlohmann::json coef_field_to_json(const CoefField& c);
CoefField coef_field_from_json(const nlohmann::json& j);

nlohmann::json cube_to_json(const DyadicCube& q);
nlohmann::json space_params_to_json(const SpaceParams& p);
// {schema, value, witness_Q, witness_P, params, depth, M_virtual, truncation_delta?, per_cube?}
nlohmann::json norm_report_to_json(const NormReport& r);

// Infinite values print as "inf", NaN as "nan"; finite values use the shortest round-trip form.
std::string format_number(double v);
// Accepts "inf" / "infinity" (any case) besides ordinary numbers.
double parse_number(const std::string& text, const std::string& what);

// Flat key=value lines, '#' comments, surrounding whitespace trimmed.
std::map<std::string, std::string> read_config_file(const std::string& path);

}  // namespace microlocal
