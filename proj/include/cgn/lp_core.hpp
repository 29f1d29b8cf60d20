#pragma once
// Dense linear programming core.
//
// Everything downstream (set distances, linearized steps, regularity
// estimates) reduces to small LPs in the sup norm, so this solver favours
// exactness and determinism over scale: two-phase primal simplex on a dense
// tableau, a switch to Bland's rule once degeneracy persists, and a final
// refactorization of the optimal basis to recover primal/dual values.

#include <limits>
#include <vector>

namespace cgn {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense row-major matrix.
struct Matrix {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

using Vector = std::vector<double>;

enum class RowSense { Le, Eq, Ge };

// min c.x  subject to  A x (sense) b,  lower <= x <= upper.
// Bound entries may be +-inf; empty bound vectors mean 0 <= x < inf.
struct LinearProgram {
  Vector c;
  Matrix A;
  Vector b;
  std::vector<RowSense> sense;
  Vector lower, upper;

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_rows() const { return A.rows; }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vector x;                // primal point in original variables (Optimal only)
  double objective = 0.0;  // c.x at the returned point
  // One multiplier per original row, minimization convention:
  // <= rows have dual <= 0, >= rows have dual >= 0, = rows are free.
  Vector dual;
  double primal_residual = 0.0;  // max violation over rows and bounds
  double dual_residual = 0.0;    // max complementary-slackness violation
  double duality_gap = 0.0;      // |primal - dual objective| in solved form
  int iterations = 0;
  bool used_bland = false;
};

// Deterministic two-phase dense simplex.  Dantzig pricing with lowest-index
// tie breaks, switching to Bland's rule after 3*(rows+cols) consecutive
// degenerate pivots; identical inputs give identical runs.
//
// Throws std::invalid_argument on malformed input (dimension mismatch, NaN,
// infinite entries in A/b/c).  Inconsistent bounds (lower > upper) yield
// LpStatus::Infeasible.
LpSolution solve_lp(const LinearProgram& lp);

Vector matvec(const Matrix& M, const Vector& v);
Matrix matmul(const Matrix& L, const Matrix& R);

// Incremental LP assembly: fixed column count, rows appended one at a time.
// Variables default to free; add_row returns an index rather than a reference
// because appending may reallocate row storage.
struct LpBuilder {
  explicit LpBuilder(int ncols)
      : n(ncols), c(ncols, 0.0), lower(ncols, -kInf), upper(ncols, kInf) {}

  std::size_t add_row(double rhs_value, RowSense s) {
    rows.emplace_back(n, 0.0);
    rhs.push_back(rhs_value);
    sense.push_back(s);
    return rows.size() - 1;
  }

  double& at(std::size_t row, int col) {
    return rows[row][static_cast<std::size_t>(col)];
  }

  LinearProgram build() const {
    LinearProgram lp;
    lp.c = c;
    lp.A = Matrix(static_cast<int>(rows.size()), n);
    for (int i = 0; i < lp.A.rows; ++i)
      for (int j = 0; j < n; ++j)
        lp.A(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    lp.b = rhs;
    lp.sense = sense;
    lp.lower = lower;
    lp.upper = upper;
    return lp;
  }

  int n;
  Vector c;
  std::vector<Vector> rows;
  Vector rhs;
  std::vector<RowSense> sense;
  Vector lower, upper;
};

}  // namespace cgn
