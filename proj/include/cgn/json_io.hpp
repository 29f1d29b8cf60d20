#pragma once
// Problem files (JSON), certificate JSON, and CSV iteration traces.
//
// Problem files are strict: every section is schema-checked before any
// computation and unknown keys are rejected.  JSON has no literal for
// infinities, so +/-infinity travels as the strings "inf" / "-inf"
// wherever a numeric field can be infinite (delta, check bounds, ...).

#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "cgn/regularity.hpp"
#include "cgn/scalar_majorant.hpp"
#include "cgn/solver.hpp"

namespace cgn {

// Insertion-ordered JSON so emitted documents are byte-deterministic.
using njson = nlohmann::ordered_json;

// A problem file (or any of its sections) failed validation.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything a problem file describes: the composite instance plus the
// certification data (regularity model, majorant, optional overrides).
struct ProblemInputs {
  CompositeProblem problem;
  RegularityModel regularity;
  MajorantModel majorant;
  std::optional<double> xi_override;
  std::optional<double> alpha_override;
};

// Sections: map {n, m, components}, outer {kind, ...}, x0, delta, eta,
// regularity {kind, ...}, majorant {kind, ...}, optional overrides
// {xi, alpha, tol_step, tol_feas}.  Throws SchemaError with the offending
// location on any violation (including malformed JSON text).
ProblemInputs parse_problem(const njson& j);
ProblemInputs parse_problem_text(const std::string& text);
ProblemInputs parse_problem_file(const std::string& path);
njson problem_to_json(const ProblemInputs& in);

// Fixed-layout certificate document; emit-parse-emit is byte-stable.
// Custom majorants without a catalog name cannot be rebuilt from JSON and
// serialize as null.
njson certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const njson& j);

// CSV trace with columns  k, x0..x{n-1}, step_norm, dist, h, t, dt,
// bd1_ok, bd2_ok.  The scalar columns come from report.majorization when
// attached and are blank otherwise; unevaluated cells stay empty.
std::string trace_to_csv(const RunReport& report);

// Shared numeric encoding: finite numbers as JSON numbers, infinities as
// the strings "inf" / "-inf".
njson json_number(double v);
double number_from_json(const njson& j, const std::string& context);

}  // namespace cgn
