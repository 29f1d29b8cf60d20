#pragma once
// Built-in demonstration instances.  Each is a complete problem description
// (map, outer function, start point, regularity and majorant data) whose
// certificate is valid, so they double as end-to-end examples for the CLI
// and the library:
//
//   sqrt2   : minimize |x^2 - 2| from x0 = 1.5; regular-point data with a
//             quadratic certificate, solved to sqrt(2) in three steps.
//   orthant : drive two convex quadratics into the nonpositive orthant from
//             the origin; Robinson condition with beta0 estimated from the
//             linearized process (beta0 = 1, four sign vertices).
//   minimax : minimize max(|x^2+y^2-2|, |x-y|) from (1.05, 0.95); Robinson
//             condition on an invertible Jacobian, solution (1, 1).

#include <string>
#include <vector>

#include "cgn/json_io.hpp"

namespace cgn {

// Catalog order: {"sqrt2", "orthant", "minimax"}.
std::vector<std::string> demo_names();

// Builds the named instance; throws std::invalid_argument for unknown names.
ProblemInputs demo(const std::string& name);

}  // namespace cgn
