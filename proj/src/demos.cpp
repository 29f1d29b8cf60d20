#include "cgn/demos.hpp"

#include <stdexcept>

namespace cgn {

namespace {

// min |x^2 - 2| from x0 = 1.5.  F'(x) = 2x is 2-Lipschitz; on the ball of
// radius 0.5 every point is regular with beta = 1/(2 * 1) = 0.5.
ProblemInputs demo_sqrt2() {
  PolynomialMap map(1, 1, {{{1.0, {2}}, {-2.0, {0}}}});
  Matrix A(2, 1);
  A(0, 0) = 1.0;
  A(1, 0) = -1.0;
  OuterFunction outer = OuterFunction::max_affine(A, {0.0, 0.0});
  CompositeProblem problem{std::move(map), std::move(outer), {1.5}};
  return ProblemInputs{std::move(problem),
                       RegularityModel::regular_point(0.5, 0.5),
                       MajorantModel::lipschitz(2.0, 0.5),
                       std::nullopt, std::nullopt};
}

// Make F(x, y) = (x + 0.05 x^2 + 0.25, y + 0.05 y^2 + 0.25) nonpositive,
// starting from the origin where the Jacobian is the identity.  The
// minimizer set of h(z) = max(z1, z2, 0) is the nonpositive orthant, a
// cone, so the Robinson data (G = A, beta0) is derived automatically.
ProblemInputs demo_orthant() {
  PolynomialMap map(2, 2,
                    {{{1.0, {1, 0}}, {0.05, {2, 0}}, {0.25, {0, 0}}},
                     {{1.0, {0, 1}}, {0.05, {0, 2}}, {0.25, {0, 0}}}});
  Matrix A(3, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 1.0;  // third row stays zero: the constant-0 affine piece
  OuterFunction outer = OuterFunction::max_affine(A, {0.0, 0.0, 0.0});
  CompositeProblem problem{std::move(map), std::move(outer), {0.0, 0.0}};
  return ProblemInputs{std::move(problem), RegularityModel::robinson(),
                       MajorantModel::lipschitz(0.1, 5.0),
                       std::nullopt, std::nullopt};
}

// min max(|x^2+y^2-2|, |x-y|) from (1.05, 0.95): a sup-norm residual with
// the single minimizer (1, 1).  C = {0} is a cone and the Jacobian at x0 is
// invertible, so beta0 comes from the four-vertex enumeration (0.775).
ProblemInputs demo_minimax() {
  PolynomialMap map(2, 2,
                    {{{1.0, {2, 0}}, {1.0, {0, 2}}, {-2.0, {0, 0}}},
                     {{1.0, {1, 0}}, {-1.0, {0, 1}}}});
  OuterFunction outer = OuterFunction::linf_deviation({0.0, 0.0});
  CompositeProblem problem{std::move(map), std::move(outer), {1.05, 0.95}};
  return ProblemInputs{std::move(problem), RegularityModel::robinson(),
                       MajorantModel::lipschitz(4.0, 1.0),
                       std::nullopt, std::nullopt};
}

}  // namespace

std::vector<std::string> demo_names() { return {"sqrt2", "orthant", "minimax"}; }

ProblemInputs demo(const std::string& name) {
  if (name == "sqrt2") return demo_sqrt2();
  if (name == "orthant") return demo_orthant();
  if (name == "minimax") return demo_minimax();
  throw std::invalid_argument("unknown demo \"" + name +
                              "\"; available: sqrt2, orthant, minimax");
}

}  // namespace cgn
