#include "cgn/lp_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cgn {
namespace {

constexpr double kEpsCost = 1e-9;   // entering threshold on reduced costs
constexpr double kEpsPivot = 1e-9;  // smallest acceptable pivot element
constexpr double kEpsDegen = 1e-9;  // ratio below this counts as degenerate

bool finite(double v) { return std::isfinite(v); }

// How each original variable maps into the nonnegative standard-form space.
struct VarMap {
  int kind;    // 0: x = off + z[col];  1: x = off - z[col];  2: x = z[col] - z[col+1]
  int col;
  double off;
};

// Dense LU with partial pivoting; solves M x = rhs in place.  M is square.
// Returns false when M is numerically singular.
bool lu_solve(Matrix M, Vector rhs, Vector& out) {
  const int n = M.rows;
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(M(i, k)) > std::fabs(M(p, k))) p = i;
    if (std::fabs(M(p, k)) < 1e-12) return false;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(M(p, j), M(k, j));
      std::swap(rhs[p], rhs[k]);
    }
    for (int i = k + 1; i < n; ++i) {
      double f = M(i, k) / M(k, k);
      if (f == 0.0) continue;
      M(i, k) = 0.0;
      for (int j = k + 1; j < n; ++j) M(i, j) -= f * M(k, j);
      rhs[i] -= f * rhs[k];
    }
  }
  out.assign(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double s = rhs[i];
    for (int j = i + 1; j < n; ++j) s -= M(i, j) * out[j];
    out[i] = s / M(i, i);
  }
  return true;
}

struct Standardizer {
  // Standard form: min cs.z  s.t.  As z = bs, z >= 0.
  int n_struct = 0;  // structural columns (transformed variables)
  int n_slack = 0;
  int art_start = 0;  // first artificial column; also count of real columns
  int n_total = 0;
  int m = 0;  // standard-form rows = original rows + finite-upper rows
  Matrix As;  // m x n_total, pristine
  Vector bs;  // >= 0 after row flips
  Vector cs;  // phase-2 costs, artificials zero
  std::vector<VarMap> vmap;      // per original variable
  std::vector<int> row_origin;   // standard row -> original row (-1 for bound rows)
  std::vector<bool> row_flip;    // standard row negated relative to origin
  std::vector<int> init_basis;   // per row: initial basic column
};

// Builds the standard form.  Returns false when bounds are trivially
// inconsistent (lower > upper or empty box), in which case the LP is
// infeasible without running the simplex.
bool standardize(const LinearProgram& lp, Standardizer& S) {
  const int n = lp.num_vars(), m0 = lp.num_rows();
  Vector lo = lp.lower.empty() ? Vector(n, 0.0) : lp.lower;
  Vector up = lp.upper.empty() ? Vector(n, kInf) : lp.upper;

  S.vmap.resize(n);
  int col = 0, upper_rows = 0;
  for (int j = 0; j < n; ++j) {
    if (lo[j] > up[j] || lo[j] == kInf || up[j] == -kInf) return false;
    if (finite(lo[j])) {
      S.vmap[j] = {0, col++, lo[j]};
      if (finite(up[j])) ++upper_rows;
    } else if (finite(up[j])) {
      S.vmap[j] = {1, col++, up[j]};
    } else {
      S.vmap[j] = {2, col, 0.0};
      col += 2;
    }
  }
  S.n_struct = col;
  S.m = m0 + upper_rows;

  S.n_slack = 0;
  for (RowSense s : lp.sense)
    if (s != RowSense::Eq) ++S.n_slack;
  S.n_slack += upper_rows;  // bound rows are Le
  S.art_start = S.n_struct + S.n_slack;
  S.n_total = S.art_start + S.m;  // reserve an artificial slot per row

  S.As = Matrix(S.m, S.n_total);
  S.bs.assign(S.m, 0.0);
  S.cs.assign(S.n_total, 0.0);
  S.row_origin.assign(S.m, -1);
  S.row_flip.assign(S.m, false);
  S.init_basis.assign(S.m, -1);

  for (int j = 0; j < n; ++j) {
    const VarMap& v = S.vmap[j];
    if (v.kind == 0) S.cs[v.col] = lp.c[j];
    else if (v.kind == 1) S.cs[v.col] = -lp.c[j];
    else { S.cs[v.col] = lp.c[j]; S.cs[v.col + 1] = -lp.c[j]; }
  }

  int slack = S.n_struct;
  for (int i = 0; i < m0; ++i) {
    double rhs = lp.b[i];
    for (int j = 0; j < n; ++j) {
      double a = lp.A(i, j);
      if (a == 0.0) continue;
      const VarMap& v = S.vmap[j];
      if (v.kind == 0) { S.As(i, v.col) += a; rhs -= a * v.off; }
      else if (v.kind == 1) { S.As(i, v.col) -= a; rhs -= a * v.off; }
      else { S.As(i, v.col) += a; S.As(i, v.col + 1) -= a; }
    }
    S.bs[i] = rhs;
    S.row_origin[i] = i;
    if (lp.sense[i] == RowSense::Le) S.As(i, slack++) = 1.0;
    else if (lp.sense[i] == RowSense::Ge) S.As(i, slack++) = -1.0;
  }
  int r = m0;
  for (int j = 0; j < n; ++j) {
    const VarMap& v = S.vmap[j];
    if (v.kind == 0 && finite(up[j])) {
      S.As(r, v.col) = 1.0;
      S.As(r, slack++) = 1.0;
      S.bs[r] = up[j] - lo[j];
      ++r;
    }
  }

  for (int i = 0; i < S.m; ++i) {
    if (S.bs[i] < 0.0) {
      S.row_flip[i] = true;
      S.bs[i] = -S.bs[i];
      for (int j = 0; j < S.art_start; ++j) S.As(i, j) = -S.As(i, j);
    }
    // A +1 slack can start basic; otherwise the row gets its artificial.
    int basic = -1;
    for (int j = S.n_struct; j < S.art_start; ++j)
      if (S.As(i, j) == 1.0) { basic = j; break; }
    if (basic < 0) {
      basic = S.art_start + i;
      S.As(i, basic) = 1.0;
    }
    S.init_basis[i] = basic;
  }
  return true;
}

struct Simplex {
  const Standardizer& S;
  Matrix T;  // m rows, then phase-2 and phase-1 cost rows; last col = rhs
  std::vector<int> basis;
  std::vector<bool> is_basic;
  std::vector<bool> inert;  // redundant rows left out of ratio tests
  int m, ncols, rhs;
  int iterations = 0;
  bool bland = false, used_bland = false;
  int degen_streak = 0;

  explicit Simplex(const Standardizer& s) : S(s) {
    m = S.m;
    ncols = S.n_total + 1;
    rhs = S.n_total;
    T = Matrix(m + 2, ncols);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < S.n_total; ++j) T(i, j) = S.As(i, j);
      T(i, rhs) = S.bs[i];
    }
    basis = S.init_basis;
    is_basic.assign(S.n_total, false);
    for (int i = 0; i < m; ++i) is_basic[basis[i]] = true;
    inert.assign(m, false);

    for (int j = 0; j < S.n_total; ++j) T(m, j) = S.cs[j];
    // Phase-1 reduced costs: artificial costs are 1, so subtract the rows
    // whose initial basic variable is artificial.
    for (int j = 0; j < S.n_total; ++j)
      T(m + 1, j) = (j >= S.art_start) ? 1.0 : 0.0;
    for (int i = 0; i < m; ++i) {
      if (basis[i] >= S.art_start)
        for (int j = 0; j < ncols; ++j) T(m + 1, j) -= T(i, j);
    }
    // Initial basic slacks/artificials all carry zero phase-2 cost, so the
    // phase-2 row needs no adjustment.
  }

  void pivot(int r, int jcol) {
    double p = T(r, jcol);
    for (int j = 0; j < ncols; ++j) T(r, j) /= p;
    T(r, jcol) = 1.0;
    for (int i = 0; i < m + 2; ++i) {
      if (i == r) continue;
      double f = T(i, jcol);
      if (f == 0.0) continue;
      for (int j = 0; j < ncols; ++j) T(i, j) -= f * T(r, j);
      T(i, jcol) = 0.0;
    }
    is_basic[basis[r]] = false;
    basis[r] = jcol;
    is_basic[jcol] = true;
  }

  // Returns LpStatus::Optimal when the phase finished, Unbounded otherwise.
  LpStatus run_phase(int phase) {
    const int cr = (phase == 1) ? m + 1 : m;
    const int jmax = (phase == 1) ? S.n_total : S.art_start;
    const int iter_cap = 2000 + 200 * (m + S.n_total);
    for (;;) {
      int enter = -1;
      if (bland) {
        for (int j = 0; j < jmax; ++j)
          if (!is_basic[j] && T(cr, j) < -kEpsCost) { enter = j; break; }
      } else {
        double best = -kEpsCost;
        for (int j = 0; j < jmax; ++j)
          if (!is_basic[j] && T(cr, j) < best) { best = T(cr, j); enter = j; }
      }
      if (enter < 0) return LpStatus::Optimal;

      int leave = -1;
      double best_ratio = kInf;
      for (int i = 0; i < m; ++i) {
        if (inert[i] || T(i, enter) <= kEpsPivot) continue;
        double ratio = T(i, rhs) / T(i, enter);
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::Unbounded;

      if (best_ratio <= kEpsDegen) {
        if (++degen_streak > 3 * (m + S.n_total)) { bland = true; used_bland = true; }
      } else {
        degen_streak = 0;
      }
      pivot(leave, enter);
      if (++iterations > iter_cap)
        throw std::runtime_error("simplex: iteration cap exceeded");
    }
  }

  double phase1_objective() const { return -T(m + 1, rhs); }

  // After phase 1: pivot artificials out of the basis where possible; rows
  // that offer no pivot are redundant and go inert.  An artificial sitting
  // at a (tolerated) positive level only accepts a positive pivot element,
  // otherwise the swap would make the new basic variable negative.
  void drive_out_artificials() {
    for (int i = 0; i < m; ++i) {
      if (basis[i] < S.art_start) continue;
      const bool need_pos = T(i, rhs) > 1e-9;
      int jbest = -1;
      double abest = 1e-7;
      for (int j = 0; j < S.art_start; ++j) {
        if (is_basic[j]) continue;
        double e = need_pos ? T(i, j) : std::fabs(T(i, j));
        if (e > abest) { abest = e; jbest = j; }
      }
      if (jbest >= 0) pivot(i, jbest);
      else if (!need_pos) inert[i] = true;
    }
  }

  // Rebuilds the tableau from the pristine columns for the current basis.
  // Returns false if the basis matrix is singular.
  bool refresh_from_basis() {
    Matrix B(m, m);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) B(i, k) = S.As(i, basis[k]);
    // Columns of the new tableau solve B t = column.
    Matrix NT(m + 2, ncols);
    Vector col(m), sol;
    for (int j = 0; j < ncols; ++j) {
      for (int i = 0; i < m; ++i) col[i] = (j == rhs) ? S.bs[i] : S.As(i, j);
      if (!lu_solve(B, col, sol)) return false;
      for (int i = 0; i < m; ++i) NT(i, j) = sol[i];
    }
    for (int j = 0; j < ncols; ++j) {
      double r2 = (j == rhs) ? 0.0 : S.cs[j];
      double r1 = (j == rhs) ? 0.0 : ((j >= S.art_start) ? 1.0 : 0.0);
      for (int i = 0; i < m; ++i) {
        double cb2 = S.cs[basis[i]];
        double cb1 = (basis[i] >= S.art_start) ? 1.0 : 0.0;
        r2 -= cb2 * NT(i, j);
        r1 -= cb1 * NT(i, j);
      }
      NT(m, j) = r2;
      NT(m + 1, j) = r1;
    }
    T = std::move(NT);
    return true;
  }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const int n = lp.num_vars(), m0 = lp.num_rows();
  if (lp.A.cols != n && !(m0 == 0 && lp.A.cols == 0))
    throw std::invalid_argument("solve_lp: A column count != |c|");
  if (static_cast<int>(lp.b.size()) != m0 || static_cast<int>(lp.sense.size()) != m0)
    throw std::invalid_argument("solve_lp: b/sense size != row count");
  if (!lp.lower.empty() && static_cast<int>(lp.lower.size()) != n)
    throw std::invalid_argument("solve_lp: lower bound size mismatch");
  if (!lp.upper.empty() && static_cast<int>(lp.upper.size()) != n)
    throw std::invalid_argument("solve_lp: upper bound size mismatch");
  for (double v : lp.c)
    if (!finite(v)) throw std::invalid_argument("solve_lp: non-finite objective");
  for (double v : lp.b)
    if (!finite(v)) throw std::invalid_argument("solve_lp: non-finite rhs");
  for (double v : lp.A.a)
    if (!finite(v)) throw std::invalid_argument("solve_lp: non-finite matrix entry");
  for (double v : lp.lower)
    if (std::isnan(v)) throw std::invalid_argument("solve_lp: NaN bound");
  for (double v : lp.upper)
    if (std::isnan(v)) throw std::invalid_argument("solve_lp: NaN bound");

  LpSolution out;
  Standardizer S;
  if (!standardize(lp, S)) {
    out.status = LpStatus::Infeasible;
    return out;
  }

  Simplex sx(S);
  double bscale = 1.0;
  for (double v : S.bs) bscale = std::max(bscale, std::fabs(v));

  sx.run_phase(1);  // bounded below by zero; Unbounded cannot occur
  if (sx.phase1_objective() > 1e-8 * bscale) {
    out.status = LpStatus::Infeasible;
    out.iterations = sx.iterations;
    out.used_bland = sx.used_bland;
    return out;
  }
  sx.drive_out_artificials();

  LpStatus ph2 = LpStatus::Optimal;
  for (int attempt = 0; attempt < 4; ++attempt) {
    ph2 = sx.run_phase(2);
    if (ph2 == LpStatus::Unbounded) break;
    // Check optimality against pristine data; tableau drift may hide a
    // negative reduced cost, in which case rebuild and continue.
    if (attempt == 3) break;
    if (!sx.refresh_from_basis()) break;
    bool clean = true;
    for (int j = 0; j < S.art_start; ++j)
      if (!sx.is_basic[j] && sx.T(sx.m, j) < -1e-7) { clean = false; break; }
    if (clean) break;
  }
  out.iterations = sx.iterations;
  out.used_bland = sx.used_bland;
  if (ph2 == LpStatus::Unbounded) {
    out.status = LpStatus::Unbounded;
    return out;
  }

  // Recover primal/dual values from the final basis against pristine data.
  Matrix B(S.m, S.m);
  for (int i = 0; i < S.m; ++i)
    for (int k = 0; k < S.m; ++k) B(i, k) = S.As(i, sx.basis[k]);
  Vector xb, y;
  Vector cb(S.m);
  for (int k = 0; k < S.m; ++k) cb[k] = S.cs[sx.basis[k]];
  bool ok = lu_solve(B, S.bs, xb);
  Matrix Bt(S.m, S.m);
  for (int i = 0; i < S.m; ++i)
    for (int k = 0; k < S.m; ++k) Bt(i, k) = B(k, i);
  ok = ok && lu_solve(Bt, cb, y);
  if (!ok) throw std::runtime_error("solve_lp: singular optimal basis");

  Vector z(S.n_total, 0.0);
  for (int i = 0; i < S.m; ++i) z[sx.basis[i]] = std::max(0.0, xb[i]);

  out.x.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const VarMap& v = S.vmap[j];
    if (v.kind == 0) out.x[j] = v.off + z[v.col];
    else if (v.kind == 1) out.x[j] = v.off - z[v.col];
    else out.x[j] = z[v.col] - z[v.col + 1];
  }
  out.objective = 0.0;
  for (int j = 0; j < n; ++j) out.objective += lp.c[j] * out.x[j];

  out.dual.assign(m0, 0.0);
  for (int i = 0; i < S.m; ++i)
    if (S.row_origin[i] >= 0)
      out.dual[S.row_origin[i]] = S.row_flip[i] ? -y[i] : y[i];

  // Residuals: primal in original space, complementary slackness and the
  // duality gap in the solved (standard) space where both are exact notions.
  double pres = 0.0;
  for (int i = 0; i < m0; ++i) {
    double ax = 0.0;
    for (int j = 0; j < n; ++j) ax += lp.A(i, j) * out.x[j];
    double viol = 0.0;
    if (lp.sense[i] == RowSense::Le) viol = ax - lp.b[i];
    else if (lp.sense[i] == RowSense::Ge) viol = lp.b[i] - ax;
    else viol = std::fabs(ax - lp.b[i]);
    pres = std::max(pres, viol);
  }
  for (int j = 0; j < n; ++j) {
    if (!lp.lower.empty() && finite(lp.lower[j]))
      pres = std::max(pres, lp.lower[j] - out.x[j]);
    if (!lp.upper.empty() && finite(lp.upper[j]))
      pres = std::max(pres, out.x[j] - lp.upper[j]);
    if (lp.lower.empty()) pres = std::max(pres, -out.x[j]);
  }
  out.primal_residual = std::max(0.0, pres);

  double cs_res = 0.0, gap = 0.0, primal_std = 0.0, dual_std = 0.0;
  for (int j = 0; j < S.art_start; ++j) {
    double rj = S.cs[j];
    for (int i = 0; i < S.m; ++i) rj -= y[i] * S.As(i, j);
    cs_res = std::max(cs_res, std::fabs(z[j] * rj));
    cs_res = std::max(cs_res, std::max(0.0, -rj));  // dual feasibility
    primal_std += S.cs[j] * z[j];
  }
  for (int i = 0; i < S.m; ++i) dual_std += y[i] * S.bs[i];
  gap = std::fabs(primal_std - dual_std);
  out.dual_residual = cs_res;
  out.duality_gap = gap;
  out.status = LpStatus::Optimal;
  return out;
}

Vector matvec(const Matrix& M, const Vector& v) {
  Vector out(static_cast<std::size_t>(M.rows), 0.0);
  for (int i = 0; i < M.rows; ++i) {
    double acc = 0.0;
    for (int j = 0; j < M.cols; ++j) acc += M(i, j) * v[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

Matrix matmul(const Matrix& L, const Matrix& R) {
  Matrix out(L.rows, R.cols);
  for (int i = 0; i < L.rows; ++i)
    for (int k = 0; k < L.cols; ++k) {
      double lik = L(i, k);
      if (lik == 0.0) continue;
      for (int j = 0; j < R.cols; ++j) out(i, j) += lik * R(k, j);
    }
  return out;
}

}  // namespace cgn
