#pragma once
// Gauss-Newton driver for convex composite problems  min h(F(x)):
// repeatedly linearize F, pick a step from the trust-region solution set
// D_delta(x), and stop when the set contains 0 or the iterate is feasible.
// A finished run can be checked a posteriori against the scalar majorizing
// sequence of a certificate (the two step-length inequalities, the
// distance-to-limit bound with the final iterate standing in for the limit,
// and containment of all iterates in the ball of radius t*).

#include <optional>
#include <string>
#include <vector>

#include "cgn/lp_core.hpp"
#include "cgn/problem.hpp"
#include "cgn/regularity.hpp"
#include "cgn/scalar_majorant.hpp"
#include "cgn/subproblem.hpp"

namespace cgn {

// A convex composite instance together with the algorithm's parameters.
struct CompositeProblem {
  PolynomialMap map;    // F
  OuterFunction outer;  // h
  Vector x0;
  double delta = kInf;  // trust-region radius, may be +infinity
  double eta = 1.0;     // step acceptance factor, >= 1 (used by certification)
  double tol_step = 1e-12;  // stop: dist(0, D_delta(x_k)) <= tol_step
  double tol_feas = 1e-9;   // stop: h(F(x_k)) <= h_min + tol_feas
};

enum class StopReason { Feasible, StepZero, MaxIter, SubproblemError };
std::string to_string(StopReason r);

// One row of the iteration trace.  dist / subproblem_value are present once
// the subproblem at x_k was solved; d / step_norm once the step was taken.
// The last row never has a step, and has no subproblem data when the run
// stopped before solving one (Feasible, MaxIter, SubproblemError).
struct IterationRecord {
  int k = 0;
  Vector x;              // iterate x_k
  double h_value = 0.0;  // h(F(x_k))
  bool in_C = false;     // h(F(x_k)) <= h_min + tol_feas
  std::optional<double> dist;              // inf-norm distance 0 -> D_delta(x_k)
  std::optional<double> subproblem_value;  // min h(F + J d) over the region
  Vector d;                                // step d_k (empty if none taken)
  std::optional<double> step_norm;         // ||d_k||_inf
};

// Per-iteration comparison of a run against the scalar majorizing sequence.
struct MajorizationRow {
  int k = 0;
  double t = 0.0;   // t_k
  double dt = 0.0;  // t_{k+1} - t_k (0 once the scalar sequence has stalled)
  // bd1: ||d_k|| <= t_{k+1} - t_k.  Evaluated on rows with a step.
  std::optional<bool> bd1;
  // bd2: ||d_k|| <= (t_{k+1}-t_k) (||d_{k-1}|| / (t_k-t_{k-1}))^2, k >= 1.
  std::optional<bool> bd2;
  bool eq002 = true;   // ||x_last - x_k|| <= t* - t_k + inflation (proxy check)
  bool ball = true;    // ||x_k - x0|| <= t* (+ slack)
  double slack_bd = 0.0;  // 1e-9 (1 + dt), used by bd1/bd2
};

struct MajorizationCheck {
  std::vector<MajorizationRow> rows;  // one per iteration record
  bool all_ok = false;      // every evaluated check holds
  bool guaranteed = false;  // cert.valid: only then are failures violations
  // x* is unknown; eq002 compares against the final iterate instead, inflated
  // by (xi/d0) tol_feas + 1e-9 (1 + t*) to absorb the feasibility stop.
  double eq002_inflation = 0.0;
  std::vector<double> t;  // scalar sequence used, t_0 .. t_K
  double t_star = 0.0;
};

struct RunReport {
  std::vector<IterationRecord> iterations;  // rows k = 0 .. K
  StopReason stop = StopReason::MaxIter;
  int steps_taken = 0;  // = iterations.size() - 1
  Vector x_final;
  double h_final = 0.0;
  std::string error;  // SubproblemError message, empty otherwise
  // echo of the run parameters (verify_majorization reads tol_feas)
  double delta = kInf;
  double eta = 1.0;
  double tol_step = 0.0;
  double tol_feas = 0.0;
  std::optional<MajorizationCheck> majorization;  // attached by callers
};

// Runs the method from x0: at each iterate record h(F(x_k)), stop Feasible
// when it reaches h_min + tol_feas, stop MaxIter after max_iter steps,
// otherwise solve the subproblem, stop StepZero (without moving) when the
// solution set lies within tol_step of 0, else step.  A subproblem failure
// ends the run with reason SubproblemError and the partial trace.
RunReport run(const CompositeProblem& p, int max_iter = 100,
              StepRule rule = StepRule::MinNorm);

// Compares a finished run against the scalar sequence of the certificate
// (which must carry a majorant model and satisfy h3).  Executes on invalid
// certificates too — rows then report which inequalities fail, and
// `guaranteed` is false to mark that no guarantee was claimed.
MajorizationCheck verify_majorization(const RunReport& report,
                                      const Certificate& cert);

// Diagnostic lower-bound estimate of the Lipschitz constant of the Jacobian
// on the ball B_inf(x0, R): max over sampled pairs of
// ||J(y) - J(x)||_inf / ||y - x||_inf.  For sanity-checking user inputs.
double sample_lipschitz_constant(const PolynomialMap& map, const Vector& x0,
                                 double R, int samples = 256,
                                 unsigned long long seed = 20260819ULL);

}  // namespace cgn
