#include "cgn/subproblem.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

namespace cgn {

namespace {

constexpr double kMembershipTol = 1e-9;

void require_finite(const Vector& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x))
      throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

void require_finite(const Matrix& M, const char* what) {
  for (double x : M.a)
    if (!std::isfinite(x))
      throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

}  // namespace

OuterFunction OuterFunction::max_affine(Matrix A, Vector b) {
  if (A.rows < 1 || A.cols < 1)
    throw std::invalid_argument("max_affine: A must have at least one row and column");
  if (static_cast<size_t>(A.rows) != b.size())
    throw std::invalid_argument("max_affine: A and b row counts differ");
  require_finite(A, "max_affine A");
  require_finite(b, "max_affine b");
  OuterFunction h;
  h.kind_ = OuterKind::MaxAffine;
  h.m_ = static_cast<std::size_t>(A.cols);
  h.A_ = std::move(A);
  h.b_ = std::move(b);
  h.finalize();
  return h;
}

OuterFunction OuterFunction::l1_deviation(Vector center) {
  if (center.empty()) throw std::invalid_argument("l1_deviation: empty center");
  require_finite(center, "l1_deviation center");
  OuterFunction h;
  h.kind_ = OuterKind::L1Deviation;
  h.m_ = center.size();
  h.center_ = std::move(center);
  h.finalize();
  return h;
}

OuterFunction OuterFunction::linf_deviation(Vector center) {
  if (center.empty()) throw std::invalid_argument("linf_deviation: empty center");
  require_finite(center, "linf_deviation center");
  OuterFunction h;
  h.kind_ = OuterKind::LInfDeviation;
  h.m_ = center.size();
  h.center_ = std::move(center);
  h.finalize();
  return h;
}

const Matrix& OuterFunction::A() const {
  if (kind_ != OuterKind::MaxAffine)
    throw std::logic_error("outer function: A() is only defined for max_affine");
  return A_;
}

const Vector& OuterFunction::b() const {
  if (kind_ != OuterKind::MaxAffine)
    throw std::logic_error("outer function: b() is only defined for max_affine");
  return b_;
}

const Vector& OuterFunction::center() const {
  if (kind_ == OuterKind::MaxAffine)
    throw std::logic_error("outer function: center() is not defined for max_affine");
  return center_;
}

void OuterFunction::finalize() {
  if (kind_ != OuterKind::MaxAffine) {
    // Deviations attain their minimum 0 exactly at the center; the singleton
    // {c} is a cone exactly when c = 0.
    h_min_ = 0.0;
    is_cone_ = true;
    for (double ci : center_)
      if (std::fabs(ci) > 1e-12) is_cone_ = false;
    return;
  }

  const int p = A_.rows;
  const int m = static_cast<int>(m_);

  // h_min: min s subject to A z - s 1 <= -b, with z and s free.
  LpBuilder lb(m + 1);
  lb.c[static_cast<size_t>(m)] = 1.0;
  for (int i = 0; i < p; ++i) {
    std::size_t row = lb.add_row(-b_[static_cast<size_t>(i)], RowSense::Le);
    for (int j = 0; j < m; ++j) lb.at(row, j) = A_(i, j);
    lb.at(row, m) = -1.0;
  }
  LpSolution sol = solve_lp(lb.build());
  if (sol.status == LpStatus::Unbounded)
    throw std::invalid_argument("max_affine: function is unbounded below");
  if (sol.status != LpStatus::Optimal)
    throw std::runtime_error("max_affine: epigraph LP failed unexpectedly");
  h_min_ = sol.objective;

  // C = { z : A z <= g } with g_i = h_min - b_i.  C is a cone exactly when
  // 0 is in C (g >= 0) and every row satisfies sup_{z in C} A_i z <= 0.
  const double tol = 1e-9 * (1.0 + std::fabs(h_min_));
  Vector g(static_cast<size_t>(p));
  is_cone_ = true;
  for (int i = 0; i < p; ++i) {
    g[static_cast<size_t>(i)] = h_min_ - b_[static_cast<size_t>(i)];
    if (g[static_cast<size_t>(i)] < -tol) is_cone_ = false;
  }
  if (!is_cone_) return;
  for (int i = 0; i < p && is_cone_; ++i) {
    LpBuilder sup(m);
    for (int j = 0; j < m; ++j) sup.c[static_cast<size_t>(j)] = -A_(i, j);
    for (int r = 0; r < p; ++r) {
      std::size_t row = sup.add_row(g[static_cast<size_t>(r)], RowSense::Le);
      for (int j = 0; j < m; ++j) sup.at(row, j) = A_(r, j);
    }
    LpSolution s = solve_lp(sup.build());
    if (s.status == LpStatus::Unbounded || (s.status == LpStatus::Optimal && -s.objective > tol))
      is_cone_ = false;
    else if (s.status == LpStatus::Infeasible)
      throw std::runtime_error("max_affine: recession LP infeasible unexpectedly");
  }
}

double OuterFunction::eval(const Vector& z) const {
  if (z.size() != m_)
    throw std::invalid_argument("outer function: point has wrong dimension");
  require_finite(z, "outer function point");
  switch (kind_) {
    case OuterKind::MaxAffine: {
      double best = -kInf;
      for (int i = 0; i < A_.rows; ++i) {
        double v = b_[static_cast<size_t>(i)];
        for (int j = 0; j < A_.cols; ++j) v += A_(i, j) * z[static_cast<size_t>(j)];
        if (v > best) best = v;
      }
      return best;
    }
    case OuterKind::L1Deviation: {
      double acc = 0.0;
      for (std::size_t i = 0; i < m_; ++i) acc += std::fabs(z[i] - center_[i]);
      return acc;
    }
    case OuterKind::LInfDeviation: {
      double best = 0.0;
      for (std::size_t i = 0; i < m_; ++i)
        best = std::max(best, std::fabs(z[i] - center_[i]));
      return best;
    }
  }
  std::abort();  // unreachable
}

bool OuterFunction::in_C(const Vector& z, double tol) const {
  return eval(z) <= h_min_ + tol;
}

double OuterFunction::distance_to_C(const Vector& z) const {
  if (z.size() != m_)
    throw std::invalid_argument("outer function: point has wrong dimension");
  require_finite(z, "outer function point");
  if (kind_ != OuterKind::MaxAffine) {
    double best = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      best = std::max(best, std::fabs(z[i] - center_[i]));
    return best;
  }
  // min t subject to A w <= g, |w_j - z_j| <= t.  C is nonempty, so the LP
  // is feasible; if simplex tolerances ever report otherwise, retry once
  // with slightly inflated membership rows.
  const int p = A_.rows;
  const int m = static_cast<int>(m_);
  auto solve_with = [&](double slack) {
    LpBuilder lb(m + 1);
    lb.c[static_cast<size_t>(m)] = 1.0;
    lb.lower[static_cast<size_t>(m)] = 0.0;
    for (int i = 0; i < p; ++i) {
      std::size_t row = lb.add_row(h_min_ - b_[static_cast<size_t>(i)] + slack, RowSense::Le);
      for (int j = 0; j < m; ++j) lb.at(row, j) = A_(i, j);
    }
    for (int j = 0; j < m; ++j) {
      std::size_t up = lb.add_row(z[static_cast<size_t>(j)], RowSense::Le);
      lb.at(up, j) = 1.0;
      lb.at(up, m) = -1.0;
      std::size_t dn = lb.add_row(-z[static_cast<size_t>(j)], RowSense::Le);
      lb.at(dn, j) = -1.0;
      lb.at(dn, m) = -1.0;
    }
    return solve_lp(lb.build());
  };
  LpSolution sol = solve_with(0.0);
  if (sol.status == LpStatus::Infeasible)
    sol = solve_with(1e-7 * (1.0 + std::fabs(h_min_)));
  if (sol.status != LpStatus::Optimal)
    throw std::runtime_error("distance_to_C: projection LP failed");
  return std::max(0.0, sol.objective);
}

namespace {

struct StageOneResult {
  Vector d;
  double value;
};

// Stage 1: minimize h(F + J d) over ||d||_inf <= delta.
StageOneResult stage_one(const OuterFunction& h, const Vector& F_val,
                         const Matrix& J_val, double delta) {
  const int n = J_val.cols;
  const int m = static_cast<int>(h.m());

  auto d_bounds = [&](LpBuilder& lb) {
    for (int j = 0; j < n; ++j) {
      lb.lower[static_cast<size_t>(j)] = -delta;
      lb.upper[static_cast<size_t>(j)] = delta;
    }
  };

  LpSolution sol;
  switch (h.kind()) {
    case OuterKind::MaxAffine: {
      const Matrix AJ = matmul(h.A(), J_val);
      const Vector AF = matvec(h.A(), F_val);
      const int p = h.A().rows;
      LpBuilder lb(n + 1);
      d_bounds(lb);
      lb.c[static_cast<size_t>(n)] = 1.0;  // s free
      for (int i = 0; i < p; ++i) {
        std::size_t row = lb.add_row(
            -AF[static_cast<size_t>(i)] - h.b()[static_cast<size_t>(i)], RowSense::Le);
        for (int j = 0; j < n; ++j) lb.at(row, j) = AJ(i, j);
        lb.at(row, n) = -1.0;
      }
      sol = solve_lp(lb.build());
      break;
    }
    case OuterKind::L1Deviation: {
      LpBuilder lb(n + m);
      d_bounds(lb);
      for (int i = 0; i < m; ++i) {
        lb.lower[static_cast<size_t>(n + i)] = 0.0;
        lb.c[static_cast<size_t>(n + i)] = 1.0;
      }
      for (int i = 0; i < m; ++i) {
        double r = h.center()[static_cast<size_t>(i)] - F_val[static_cast<size_t>(i)];
        std::size_t up = lb.add_row(r, RowSense::Le);
        std::size_t dn = lb.add_row(-r, RowSense::Le);
        for (int j = 0; j < n; ++j) {
          lb.at(up, j) = J_val(i, j);
          lb.at(dn, j) = -J_val(i, j);
        }
        lb.at(up, n + i) = -1.0;
        lb.at(dn, n + i) = -1.0;
      }
      sol = solve_lp(lb.build());
      break;
    }
    case OuterKind::LInfDeviation: {
      LpBuilder lb(n + 1);
      d_bounds(lb);
      lb.lower[static_cast<size_t>(n)] = 0.0;
      lb.c[static_cast<size_t>(n)] = 1.0;
      for (int i = 0; i < m; ++i) {
        double r = h.center()[static_cast<size_t>(i)] - F_val[static_cast<size_t>(i)];
        std::size_t up = lb.add_row(r, RowSense::Le);
        std::size_t dn = lb.add_row(-r, RowSense::Le);
        for (int j = 0; j < n; ++j) {
          lb.at(up, j) = J_val(i, j);
          lb.at(dn, j) = -J_val(i, j);
        }
        lb.at(up, n) = -1.0;
        lb.at(dn, n) = -1.0;
      }
      sol = solve_lp(lb.build());
      break;
    }
  }

  if (sol.status == LpStatus::Unbounded)
    throw SubproblemError("linearized subproblem is unbounded below", true);
  if (sol.status != LpStatus::Optimal)
    throw SubproblemError("linearized subproblem LP failed", false);
  StageOneResult out;
  out.d.assign(sol.x.begin(), sol.x.begin() + n);
  out.value = sol.objective;
  return out;
}

// Stage 2: minimum inf-norm element of the stage-1 solution set, with the
// optimal value relaxed by eps to absorb LP tolerances.
LpSolution stage_two(const OuterFunction& h, const Vector& F_val,
                     const Matrix& J_val, double delta, double v1, double eps) {
  const int n = J_val.cols;
  const int m = static_cast<int>(h.m());

  auto d_bounds = [&](LpBuilder& lb) {
    for (int j = 0; j < n; ++j) {
      lb.lower[static_cast<size_t>(j)] = -delta;
      lb.upper[static_cast<size_t>(j)] = delta;
    }
  };
  auto norm_rows = [&](LpBuilder& lb, int t_col) {
    lb.lower[static_cast<size_t>(t_col)] = 0.0;
    lb.c[static_cast<size_t>(t_col)] = 1.0;
    for (int j = 0; j < n; ++j) {
      std::size_t up = lb.add_row(0.0, RowSense::Le);
      lb.at(up, j) = 1.0;
      lb.at(up, t_col) = -1.0;
      std::size_t dn = lb.add_row(0.0, RowSense::Le);
      lb.at(dn, j) = -1.0;
      lb.at(dn, t_col) = -1.0;
    }
  };

  switch (h.kind()) {
    case OuterKind::MaxAffine: {
      const Matrix AJ = matmul(h.A(), J_val);
      const Vector AF = matvec(h.A(), F_val);
      const int p = h.A().rows;
      LpBuilder lb(n + 1);
      d_bounds(lb);
      for (int i = 0; i < p; ++i) {
        std::size_t row = lb.add_row(
            v1 + eps - AF[static_cast<size_t>(i)] - h.b()[static_cast<size_t>(i)],
            RowSense::Le);
        for (int j = 0; j < n; ++j) lb.at(row, j) = AJ(i, j);
      }
      norm_rows(lb, n);
      return solve_lp(lb.build());
    }
    case OuterKind::L1Deviation: {
      LpBuilder lb(n + m + 1);
      d_bounds(lb);
      for (int i = 0; i < m; ++i) lb.lower[static_cast<size_t>(n + i)] = 0.0;
      for (int i = 0; i < m; ++i) {
        double r = h.center()[static_cast<size_t>(i)] - F_val[static_cast<size_t>(i)];
        std::size_t up = lb.add_row(r, RowSense::Le);
        std::size_t dn = lb.add_row(-r, RowSense::Le);
        for (int j = 0; j < n; ++j) {
          lb.at(up, j) = J_val(i, j);
          lb.at(dn, j) = -J_val(i, j);
        }
        lb.at(up, n + i) = -1.0;
        lb.at(dn, n + i) = -1.0;
      }
      std::size_t lvl = lb.add_row(v1 + eps, RowSense::Le);
      for (int i = 0; i < m; ++i) lb.at(lvl, n + i) = 1.0;
      norm_rows(lb, n + m);
      return solve_lp(lb.build());
    }
    case OuterKind::LInfDeviation: {
      LpBuilder lb(n + 2);
      d_bounds(lb);
      lb.lower[static_cast<size_t>(n)] = 0.0;
      lb.upper[static_cast<size_t>(n)] = v1 + eps;  // h level bound on s
      for (int i = 0; i < m; ++i) {
        double r = h.center()[static_cast<size_t>(i)] - F_val[static_cast<size_t>(i)];
        std::size_t up = lb.add_row(r, RowSense::Le);
        std::size_t dn = lb.add_row(-r, RowSense::Le);
        for (int j = 0; j < n; ++j) {
          lb.at(up, j) = J_val(i, j);
          lb.at(dn, j) = -J_val(i, j);
        }
        lb.at(up, n) = -1.0;
        lb.at(dn, n) = -1.0;
      }
      norm_rows(lb, n + 1);
      return solve_lp(lb.build());
    }
  }
  std::abort();  // unreachable
}

}  // namespace

SubproblemResult solve_subproblem(const OuterFunction& h, const Vector& F_val,
                                  const Matrix& J_val, double delta,
                                  StepRule rule) {
  if (F_val.size() != h.m())
    throw std::invalid_argument("subproblem: F value has wrong dimension");
  if (static_cast<size_t>(J_val.rows) != h.m() || J_val.cols < 1)
    throw std::invalid_argument("subproblem: Jacobian has wrong shape");
  require_finite(F_val, "subproblem F value");
  require_finite(J_val, "subproblem Jacobian");
  if (std::isnan(delta) || delta <= 0.0)
    throw std::invalid_argument("subproblem: delta must be positive");

  StageOneResult s1 = stage_one(h, F_val, J_val, delta);

  // The level constraint reuses stage one's rows bitwise, so its optimal
  // vertex stays feasible with no relaxation at all; solve exactly first and
  // widen only if the feasibility phase stumbles over roundoff.  A nonzero
  // relaxation would bias every minimum-norm step by about eps / ||J||.
  const double scale = 1.0 + std::fabs(s1.value);
  LpSolution s2 = stage_two(h, F_val, J_val, delta, s1.value, 0.0);
  for (double eps : {1e-12 * scale, 1e-9 * scale, 1e-6 * scale}) {
    if (s2.status != LpStatus::Infeasible) break;
    s2 = stage_two(h, F_val, J_val, delta, s1.value, eps);
  }
  if (s2.status != LpStatus::Optimal)
    throw SubproblemError("minimum-norm selection LP failed", false);

  SubproblemResult out;
  out.value = s1.value;
  out.distance = std::max(0.0, s2.objective);
  if (rule == StepRule::MinNorm) {
    out.d.assign(s2.x.begin(), s2.x.begin() + J_val.cols);
  } else {
    out.d = std::move(s1.d);
  }
  return out;
}

double distance_to_DC(const OuterFunction& h, const Vector& F_val,
                      const Matrix& J_val, double delta) {
  return solve_subproblem(h, F_val, J_val, delta, StepRule::MinNorm).distance;
}

}  // namespace cgn
