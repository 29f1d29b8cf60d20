#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "cgn/solver.hpp"

using namespace cgn;

namespace {

Matrix make_matrix(int r, int c, std::initializer_list<double> vals) {
  Matrix M(r, c);
  int k = 0;
  for (double v : vals) M.a[static_cast<size_t>(k++)] = v;
  return M;
}

// h(z) = |z|
OuterFunction abs_outer() {
  return OuterFunction::max_affine(make_matrix(2, 1, {1.0, -1.0}), {0.0, 0.0});
}

// h(z) = max(z, 0)
OuterFunction relu_outer() {
  return OuterFunction::max_affine(make_matrix(2, 1, {1.0, 0.0}), {0.0, 0.0});
}

// h(z1, z2) = max(z1, z2, 0)
OuterFunction orthant_outer() {
  return OuterFunction::max_affine(make_matrix(3, 2, {1, 0, 0, 1, 0, 0}),
                                   {0.0, 0.0, 0.0});
}

PolynomialMap sqrt2_map() {  // F(x) = x^2 - 2
  return PolynomialMap(1, 1, {{Term{1.0, {2}}, Term{-2.0, {0}}}});
}

PolynomialMap square_map() {  // F(x) = x^2
  return PolynomialMap(1, 1, {{Term{1.0, {2}}}});
}

PolynomialMap square_plus_one_map() {  // F(x) = x^2 + 1
  return PolynomialMap(1, 1, {{Term{1.0, {2}}, Term{1.0, {0}}}});
}

PolynomialMap circle_gap_map() {  // F(x,y) = (x^2 + y^2 - 1, x - y)
  return PolynomialMap(2, 2,
                       {{Term{1.0, {2, 0}}, Term{1.0, {0, 2}}, Term{-1.0, {0, 0}}},
                        {Term{1.0, {1, 0}}, Term{-1.0, {0, 1}}}});
}

CompositeProblem sqrt2_problem() {
  return CompositeProblem{sqrt2_map(), abs_outer(), {1.5}};
}

}  // namespace

TEST_CASE("square root of two: Feasible after a few Newton steps") {
  CompositeProblem p = sqrt2_problem();
  RunReport rep = run(p);

  CHECK(rep.stop == StopReason::Feasible);
  CHECK(rep.steps_taken == 3);
  CHECK(rep.iterations.size() == 4);
  CHECK(rep.error.empty());
  CHECK(rep.x_final[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
  CHECK(rep.h_final <= 1e-9);

  // the steps here are classical Newton iterates for x^2 = 2
  CHECK(rep.iterations[1].x[0] == doctest::Approx(17.0 / 12.0).epsilon(1e-14));
  CHECK(rep.iterations[2].x[0] == doctest::Approx(577.0 / 408.0).epsilon(1e-14));

  // the recurrence x_{k+1} = x_k + d_k holds bitwise
  for (int k = 0; k + 1 < static_cast<int>(rep.iterations.size()); ++k) {
    REQUIRE(rep.iterations[k].d.size() == 1);
    CHECK(rep.iterations[k + 1].x[0] ==
          rep.iterations[k].x[0] + rep.iterations[k].d[0]);
  }

  // only the last iterate is feasible; every solved subproblem reached the
  // linearized inclusion (value == h_min == 0) and MinNorm means dist == ||d||
  for (std::size_t k = 0; k < rep.iterations.size(); ++k) {
    const IterationRecord& it = rep.iterations[k];
    CHECK(it.in_C == (k + 1 == rep.iterations.size()));
    if (it.subproblem_value) CHECK(*it.subproblem_value <= 1e-12);
    if (it.dist && it.step_norm)
      CHECK(*it.dist == doctest::Approx(*it.step_norm).epsilon(1e-12));
  }

  // monotone, superlinear step decay
  const double d0 = *rep.iterations[0].step_norm;
  const double d1 = *rep.iterations[1].step_norm;
  const double d2 = *rep.iterations[2].step_norm;
  CHECK(d0 == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
  CHECK(d1 < d0);
  CHECK(d2 < d1);
  CHECK(d2 / d1 < 0.2 * (d1 / d0));
}

TEST_CASE("square root of two at tol_feas = 1e-12: within five iterations") {
  CompositeProblem p = sqrt2_problem();
  p.tol_feas = 1e-12;
  RunReport rep = run(p);
  CHECK(rep.stop == StopReason::Feasible);
  CHECK(rep.steps_taken == 4);
  CHECK(rep.iterations.size() <= 6);
  CHECK(std::abs(rep.x_final[0] * rep.x_final[0] - 2.0) <= 1e-12);
  CHECK(std::abs(rep.x_final[0] - std::sqrt(2.0)) <= 1e-12);
}

TEST_CASE("feasible start point terminates immediately with zero steps") {
  CompositeProblem p = sqrt2_problem();
  p.x0 = {std::sqrt(2.0)};
  RunReport rep = run(p);
  CHECK(rep.stop == StopReason::Feasible);
  CHECK(rep.steps_taken == 0);
  CHECK(rep.iterations.size() == 1);
  CHECK(rep.iterations[0].in_C);
  CHECK(!rep.iterations[0].dist.has_value());  // no subproblem was solved
  CHECK(rep.x_final[0] == p.x0[0]);
}

TEST_CASE("stationary infeasible point: StepZero without moving") {
  // F(x) = x^2 + 1 >= 1, h = max(z, 0): at x = 0 the Jacobian vanishes, so
  // every d solves the linearized problem and the minimum-norm step is 0.
  CompositeProblem p{square_plus_one_map(), relu_outer(), {0.0}};
  RunReport rep = run(p);
  CHECK(rep.stop == StopReason::StepZero);
  CHECK(rep.steps_taken == 0);
  CHECK(rep.iterations.size() == 1);
  REQUIRE(rep.iterations[0].dist.has_value());
  CHECK(*rep.iterations[0].dist <= 1e-15);
  REQUIRE(rep.iterations[0].subproblem_value.has_value());
  CHECK(*rep.iterations[0].subproblem_value == doctest::Approx(1.0));
  CHECK(rep.iterations[0].d.empty());
  CHECK(rep.x_final[0] == 0.0);
  CHECK(to_string(rep.stop) == "StepZero");
}

TEST_CASE("infeasible inclusion plateaus and ends with MaxIter") {
  // |x^2 + 1| has no zero; the iteration wanders and never gets below 1.
  CompositeProblem p{square_plus_one_map(), abs_outer(), {1.5}};
  RunReport rep = run(p, 30);
  CHECK(rep.stop == StopReason::MaxIter);
  CHECK(rep.steps_taken == 30);
  CHECK(rep.iterations.size() == 31);
  CHECK(rep.error.empty());
  for (const IterationRecord& it : rep.iterations)
    CHECK(it.h_value >= 1.0 - 1e-12);
  CHECK(to_string(rep.stop) == "MaxIter");
}

TEST_CASE("inequality system: run reaches membership in C") {
  // F(x,y) = (x^2 + y^2 - 1, x - y) with h = max(z1, z2, 0): feasible points
  // fill the arc x = y, x^2 + y^2 <= 1.
  CompositeProblem p{circle_gap_map(), orthant_outer(), {1.0, 0.5}};
  RunReport rep = run(p, 50);
  CHECK(rep.stop == StopReason::Feasible);
  Vector Ff = p.map.eval(rep.x_final);
  CHECK(Ff[0] <= p.tol_feas + 1e-15);
  CHECK(Ff[1] <= p.tol_feas + 1e-15);
  CHECK(p.outer.distance_to_C(Ff) <= p.tol_feas * 2.0);
}

TEST_CASE("trust region clamps steps but convergence survives") {
  CompositeProblem p = sqrt2_problem();
  p.delta = 0.05;
  RunReport rep = run(p, 20);
  CHECK(rep.stop == StopReason::Feasible);
  REQUIRE(rep.iterations[0].step_norm.has_value());
  CHECK(*rep.iterations[0].step_norm == doctest::Approx(0.05).epsilon(1e-12));
  for (const IterationRecord& it : rep.iterations)
    if (it.step_norm) CHECK(*it.step_norm <= 0.05 + 1e-12);
  CHECK(rep.x_final[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("with the feasibility stop disabled the run ends in StepZero") {
  CompositeProblem p = sqrt2_problem();
  p.tol_feas = 0.0;  // |x^2 - 2| > 0 for every double, so Feasible never fires
  RunReport rep = run(p, 50);
  CHECK(rep.stop == StopReason::StepZero);
  CHECK(rep.steps_taken >= 3);
  CHECK(rep.steps_taken <= 6);
  REQUIRE(rep.iterations.back().dist.has_value());
  CHECK(*rep.iterations.back().dist <= 1e-12);
  CHECK(std::abs(rep.x_final[0] - std::sqrt(2.0)) <= 1e-12);
  // StepZero at the end implies the linearized inclusion held at every
  // earlier iterate: each solved subproblem reached the minimum value.
  for (const IterationRecord& it : rep.iterations)
    if (it.subproblem_value) CHECK(*it.subproblem_value <= 1e-12);
  // the final row records no movement
  CHECK(rep.x_final[0] == rep.iterations.back().x[0]);
}

TEST_CASE("run validation rejects inconsistent problems") {
  CHECK_THROWS_AS(run(CompositeProblem{sqrt2_map(), orthant_outer(), {1.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(run(CompositeProblem{sqrt2_map(), abs_outer(), {1.5, 2.0}}),
                  std::invalid_argument);
  CompositeProblem p = sqrt2_problem();
  p.delta = 0.0;
  CHECK_THROWS_AS(run(p), std::invalid_argument);
  p.delta = std::nan("");
  CHECK_THROWS_AS(run(p), std::invalid_argument);
  p = sqrt2_problem();
  p.eta = 0.5;
  CHECK_THROWS_AS(run(p), std::invalid_argument);
  p = sqrt2_problem();
  p.tol_step = -1.0;
  CHECK_THROWS_AS(run(p), std::invalid_argument);
  p = sqrt2_problem();
  p.tol_feas = -1.0;
  CHECK_THROWS_AS(run(p), std::invalid_argument);
  p = sqrt2_problem();
  CHECK_THROWS_AS(run(p, -1), std::invalid_argument);
}

TEST_CASE("certified square-root run passes every majorization row") {
  CompositeProblem p = sqrt2_problem();
  RunReport rep = run(p);
  Certificate cert =
      certify(p.outer, p.map.eval(p.x0), p.map.jacobian(p.x0), p.delta, p.eta,
              RegularityModel::regular_point(0.5, 0.5),
              MajorantModel::lipschitz(2.0, 0.5));
  REQUIRE(cert.valid);

  MajorizationCheck mc = verify_majorization(rep, cert);
  CHECK(mc.all_ok);
  CHECK(mc.guaranteed);
  CHECK(mc.rows.size() == rep.iterations.size());
  CHECK(mc.t.size() == rep.iterations.size());
  CHECK(mc.t_star ==
        doctest::Approx((9.0 - 3.0 * std::sqrt(7.0)) / 8.0).epsilon(1e-10));

  // k = 0 reduces to ||d_0|| <= t_1 - t_0 = xi
  CHECK(mc.rows[0].t == 0.0);
  CHECK(mc.rows[0].dt == doctest::Approx(cert.xi).epsilon(1e-12));
  REQUIRE(mc.rows[0].bd1.has_value());
  CHECK(*mc.rows[0].bd1);
  CHECK(!mc.rows[0].bd2.has_value());  // needs two consecutive steps

  CHECK(mc.t[1] == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(mc.t[2] == doctest::Approx(0.1328125).epsilon(1e-12));
  REQUIRE(mc.rows[1].bd2.has_value());
  CHECK(*mc.rows[1].bd2);
  REQUIRE(mc.rows[2].bd2.has_value());
  CHECK(*mc.rows[2].bd2);
  CHECK(!mc.rows.back().bd1.has_value());  // the last row took no step
  for (const MajorizationRow& row : mc.rows) {
    CHECK(row.eq002);
    CHECK(row.ball);
  }

  rep.majorization = mc;  // report can carry its check
  CHECK(rep.majorization->all_ok);
}

TEST_CASE("over-claimed regularity data is reported, not asserted") {
  // F(x) = x^2, h = |.|, x0 = 1: steps halve exactly (d_k = -x_k / 2).  A
  // constant regular-point bound beta = 0.5 claimed on radius 10 satisfies
  // every certificate hypothesis (with xi = 1 the discriminant is exactly 0,
  // the linear-rate boundary), but it is false near the root x = 0 -- and
  // the second step inequality exposes that: ||d_k|| = 2 * rhs at every k.
  CompositeProblem p{square_map(), abs_outer(), {1.0}};
  RunReport rep = run(p, 40);
  CHECK(rep.stop == StopReason::Feasible);
  CHECK(rep.steps_taken == 15);
  for (int k = 0; k < rep.steps_taken; ++k) {
    CHECK(rep.iterations[k].x[0] == std::ldexp(1.0, -k));
    REQUIRE(rep.iterations[k].step_norm.has_value());
    CHECK(*rep.iterations[k].step_norm ==
          doctest::Approx(std::ldexp(1.0, -k - 1)).epsilon(1e-12));
  }

  Certificate cert =
      certify(p.outer, p.map.eval(p.x0), p.map.jacobian(p.x0), p.delta, p.eta,
              RegularityModel::regular_point(10.0, 0.5),
              MajorantModel::lipschitz(2.0, 10.0), /*xi_override=*/1.0);
  REQUIRE(cert.valid);
  CHECK(cert.rate == "linear");
  CHECK(!cert.h4);
  CHECK(cert.t_star == doctest::Approx(2.0).epsilon(1e-12));

  MajorizationCheck mc = verify_majorization(rep, cert);
  CHECK(mc.guaranteed);  // the certificate (trusting its inputs) is valid
  CHECK(!mc.all_ok);     // ... but the run refutes the claimed bound
  for (const MajorizationRow& row : mc.rows) {
    if (row.bd1) CHECK(*row.bd1);  // first inequality holds: 2^{-k-1} <= 2^{-k}
    if (row.bd2) CHECK(!*row.bd2);
    CHECK(row.eq002);
    CHECK(row.ball);
  }
  REQUIRE(mc.rows[1].bd2.has_value());
}

TEST_CASE("verification needs a scalar zero and a non-empty run") {
  CompositeProblem p = sqrt2_problem();
  RunReport rep = run(p);

  // xi pushed past the reach of the majorant: h3 fails, nothing to verify
  Certificate no_h3 =
      certify(p.outer, p.map.eval(p.x0), p.map.jacobian(p.x0), p.delta, p.eta,
              RegularityModel::regular_point(0.5, 0.5),
              MajorantModel::lipschitz(2.0, 0.5), /*xi_override=*/0.45);
  REQUIRE(!no_h3.h3);
  CHECK_THROWS_AS(verify_majorization(rep, no_h3), std::invalid_argument);

  CHECK_THROWS_AS(verify_majorization(RunReport{}, no_h3), std::invalid_argument);

  Certificate bare;  // never produced by certify: no majorant attached
  bare.h3 = true;
  CHECK_THROWS_AS(verify_majorization(rep, bare), std::invalid_argument);
}

TEST_CASE("an uncertified run is still checked, marked as not guaranteed") {
  CompositeProblem p = sqrt2_problem();
  RunReport rep = run(p);
  Certificate weak =
      certify(p.outer, p.map.eval(p.x0), p.map.jacobian(p.x0), p.delta, p.eta,
              RegularityModel::regular_point(0.5, 0.5),
              MajorantModel::lipschitz(2.0, 0.5), /*xi_override=*/std::nullopt,
              /*alpha_override=*/0.1);
  REQUIRE(!weak.valid);  // alpha below its lower bound
  REQUIRE(weak.h3);
  MajorizationCheck mc = verify_majorization(rep, weak);
  CHECK(!mc.guaranteed);
  CHECK(mc.rows.size() == rep.iterations.size());
  REQUIRE(mc.rows[0].bd1.has_value());
  CHECK(*mc.rows[0].bd1);  // ||d_0|| = 1/12 <= xi = 0.125 still holds
}

TEST_CASE("sampled Jacobian Lipschitz constants") {
  // F(x) = x^2 - 2: |J(y) - J(x)| / |y - x| = 2 for every pair
  CHECK(sample_lipschitz_constant(sqrt2_map(), {1.5}, 1.0, 16) ==
        doctest::Approx(2.0).epsilon(1e-12));

  // linear map: zero
  PolynomialMap lin(1, 1, {{Term{3.0, {1}}, Term{-1.0, {0}}}});
  CHECK(sample_lipschitz_constant(lin, {0.0}, 2.0, 32) == 0.0);

  // F(x) = x^3 on B(0,1): ratios are 3|x+y| <= 6, approached from below
  PolynomialMap cubic(1, 1, {{Term{1.0, {3}}}});
  double est = sample_lipschitz_constant(cubic, {0.0}, 1.0, 512);
  CHECK(est >= 4.5);
  CHECK(est <= 6.0 + 1e-9);

  CHECK_THROWS_AS(sample_lipschitz_constant(cubic, {0.0, 1.0}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_lipschitz_constant(cubic, {0.0}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_lipschitz_constant(cubic, {0.0}, 1.0, 0),
                  std::invalid_argument);
}

TEST_CASE("stop reasons have readable names") {
  CHECK(to_string(StopReason::Feasible) == "Feasible");
  CHECK(to_string(StopReason::StepZero) == "StepZero");
  CHECK(to_string(StopReason::MaxIter) == "MaxIter");
  CHECK(to_string(StopReason::SubproblemError) == "SubproblemError");
}
