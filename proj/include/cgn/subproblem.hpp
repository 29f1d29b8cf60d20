#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "cgn/lp_core.hpp"

namespace cgn {

// Kinds of polyhedral convex outer functions h: R^m -> R.
enum class OuterKind { MaxAffine, L1Deviation, LInfDeviation };

// A polyhedral convex function h together with derived data about its set of
// minimizers C = argmin h:
//   MaxAffine:     h(z) = max_i (A z + b)_i          (A is p x m, p >= 1)
//   L1Deviation:   h(z) = sum_i |z_i - c_i|
//   LInfDeviation: h(z) = max_i |z_i - c_i|
// h must be bounded below; the constructor solves for h_min and whether C is
// a cone (both exact polyhedral computations).
class OuterFunction {
 public:
  static OuterFunction max_affine(Matrix A, Vector b);
  static OuterFunction l1_deviation(Vector center);
  static OuterFunction linf_deviation(Vector center);

  OuterKind kind() const { return kind_; }
  std::size_t m() const { return m_; }

  // MaxAffine data (throws std::logic_error for other kinds).
  const Matrix& A() const;
  const Vector& b() const;
  // Deviation center (throws std::logic_error for MaxAffine).
  const Vector& center() const;

  double eval(const Vector& z) const;
  double h_min() const { return h_min_; }
  bool is_cone() const { return is_cone_; }

  // Membership in C = argmin h, tested by value: h(z) <= h_min + tol.
  bool in_C(const Vector& z, double tol = 1e-9) const;
  // inf-norm distance from z to C.
  double distance_to_C(const Vector& z) const;

 private:
  OuterFunction() = default;
  void finalize();  // computes h_min_ and is_cone_

  OuterKind kind_ = OuterKind::MaxAffine;
  std::size_t m_ = 0;
  Matrix A_{0, 0};
  Vector b_;
  Vector center_;
  double h_min_ = 0.0;
  bool is_cone_ = false;
};

// Raised when a subproblem LP fails in a way that has no solution to report.
class SubproblemError : public std::runtime_error {
 public:
  SubproblemError(const std::string& what, bool unbounded_below)
      : std::runtime_error(what), unbounded(unbounded_below) {}
  bool unbounded;
};

// Which element of the solution set D_delta(x) to return.
enum class StepRule { MinNorm, FirstVertex };

struct SubproblemResult {
  Vector d;         // chosen step
  double value;     // min of h(F + J d) over the trust region
  double distance;  // inf-norm distance from 0 to the full solution set
};

// Solves  min { h(F_val + J_val d) : ||d||_inf <= delta }  and the follow-up
// problem selecting the minimum-norm solution.  delta may be +infinity.
SubproblemResult solve_subproblem(const OuterFunction& h, const Vector& F_val,
                                  const Matrix& J_val, double delta,
                                  StepRule rule = StepRule::MinNorm);

// inf-norm distance from 0 to D_delta = argmin { h(F + J d) : ||d|| <= delta }.
double distance_to_DC(const OuterFunction& h, const Vector& F_val,
                      const Matrix& J_val, double delta);

}  // namespace cgn
