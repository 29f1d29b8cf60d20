#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgn/lp_core.hpp"
#include "cgn/scalar_majorant.hpp"
#include "cgn/subproblem.hpp"

namespace cgn {

// How the solvability of the linearized inclusion near the start point is
// certified.  Each kind yields a radius r and a nondecreasing bound beta(t)
// on [0, r) controlling the minimum-norm linearized step:
//   QuasiRegular: beta given directly as a right-continuous step function.
//   RegularPoint: beta constant on [0, r).
//   Robinson:     beta derived from an inverse bound beta0 of the linearized
//                 convex process (requires the minimizer set C to be a cone).
enum class RegularityKind { QuasiRegular, RegularPoint, Robinson };

class RegularityModel {
 public:
  // Step function: beta(t) = beta_values[i] on [t_break[i], t_break[i+1]),
  // with t_break[0] == 0 and the last piece extending to `radius`.
  static RegularityModel quasi_regular(double radius, std::vector<double> t_break,
                                       std::vector<double> beta_values);
  static RegularityModel regular_point(double radius, double beta);
  // Robinson condition; G rows describe C = {z : G z <= 0} and beta0 bounds
  // the inverse process.  Either may be omitted and derived/estimated.
  static RegularityModel robinson(std::optional<Matrix> G = std::nullopt,
                                  std::optional<double> beta0 = std::nullopt);

  RegularityKind kind() const { return kind_; }
  double radius() const { return radius_; }                    // not Robinson
  const std::vector<double>& t_break() const { return t_break_; }
  const std::vector<double>& beta_values() const { return beta_values_; }
  double beta_constant() const { return beta_constant_; }      // RegularPoint
  const std::optional<Matrix>& G() const { return G_; }        // Robinson
  const std::optional<double>& beta0() const { return beta0_; }

 private:
  RegularityModel() = default;

  RegularityKind kind_ = RegularityKind::RegularPoint;
  double radius_ = 0.0;
  std::vector<double> t_break_;
  std::vector<double> beta_values_;
  double beta_constant_ = 0.0;
  std::optional<Matrix> G_;
  std::optional<double> beta0_;
};

// Raised when a regularity hypothesis cannot even be set up (Robinson without
// a cone C, a linearized process that is not onto, ...).
class RegularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// beta0 = sup over the unit ball of the minimum-norm solution of
// G(J0 d - y) <= 0, computed exactly by enumerating the 2^m sign vertices.
struct ConvexProcessNormEstimate {
  double beta0 = 0.0;
  int vertex_count = 0;
  bool onto = true;  // false when some direction y admits no solution d
};
ConvexProcessNormEstimate estimate_convex_process_inverse_norm(const Matrix& G,
                                                               const Matrix& J0);

// Exact polyhedral test for regularity of the start point: the only y with
// J0^T y = 0 supporting C at F0 (sigma_C(y) <= <y, F0>) must be y = 0.
struct RegularPointCheck {
  bool regular = false;
  double max_abnormal = 0.0;  // largest coordinate of a certifying y, if any
};
RegularPointCheck check_regular_point(const OuterFunction& h, const Vector& F0,
                                      const Matrix& J0);

// Quasi-regularity data derived from the Robinson condition: the bound
// beta0 / (1 - beta0 (f'(t) + 1)), valid while the denominator is positive.
double quasi_regular_bound_from_robinson(double beta0, const MajorantModel& f,
                                         double t);
// Largest radius on which that bound is finite, capped at the majorant radius.
double robinson_radius(double beta0, const MajorantModel& f);

// A regularity model made concrete for one instance: an evaluable bound.
struct ResolvedRegularity {
  RegularityKind kind = RegularityKind::RegularPoint;
  double radius = 0.0;
  std::function<double(double)> beta;  // defined on [0, radius)
  std::optional<double> beta0;         // Robinson only
  int vertex_count = 0;                // Robinson, when beta0 was estimated
  bool beta0_estimated = false;
};
ResolvedRegularity resolve_regularity(const RegularityModel& reg,
                                      const OuterFunction& h, const Matrix& J0,
                                      const MajorantModel& f);

// Smallest admissible curvature weight alpha for the auxiliary scalar
// function: sup over [xi, t_hi) of eta b(t) / (1 + eta b(t) (f'(t) + 1)).
// Closed forms for RegularPoint/Robinson (the sup sits at t = xi); a guarded
// 1024-point grid sup (inflated by 0.1%) for step-function bounds.  Returns
// +infinity when xi is outside the domain of the bound.
double alpha_lower_bound(const ResolvedRegularity& rr, const MajorantModel& f,
                         double xi, double eta, double t_hi);

struct CertificateCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// Everything the semi-local analysis establishes for one start point.
struct Certificate {
  // resolved inputs
  double eta = 1.0;
  double delta = kInf;
  double d0 = 0.0;     // inf-norm distance from F(x0) to C
  double xi = 0.0;
  double alpha = 0.0;
  RegularityKind regularity = RegularityKind::RegularPoint;
  double radius = 0.0;
  std::optional<double> beta0;
  int vertex_count = 0;
  bool beta0_estimated = false;
  double alpha_bound = 0.0;  // the lower bound alpha was checked against
  // Advisory only: alpha strictly above its bound upgrades the vector
  // sequence to an R-quadratic rate; reported without asserting it.
  bool alpha_strictly_above_bound = false;
  // scalar analysis
  std::optional<MajorantModel> majorant;  // the model the analysis ran on
  bool h3 = false;
  bool h4 = false;
  double t_star = 0.0;  // meaningful when h3 holds
  std::optional<double> q_quadratic;
  std::string rate;  // "quadratic", "linear", or "none"
  // verdict
  std::vector<CertificateCheck> checks;
  bool valid = false;
};

// Builds the full hypothesis checklist for Gauss-Newton convergence from the
// start point data.  xi/alpha may be overridden; defaults are
// xi = max(eta beta(0) d0, 1e-12) and alpha = its lower bound.
Certificate certify(const OuterFunction& h, const Vector& F0, const Matrix& J0,
                    double delta, double eta, const RegularityModel& reg,
                    const MajorantModel& f,
                    std::optional<double> xi_override = std::nullopt,
                    std::optional<double> alpha_override = std::nullopt);

}  // namespace cgn
