#include "cgn/regularity.hpp"

#include <algorithm>
#include <cmath>

namespace cgn {

namespace {

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

double ratio_at(double eta, double beta, double fp1) {
  return eta * beta / (1.0 + eta * beta * fp1);
}

}  // namespace

RegularityModel RegularityModel::quasi_regular(double radius,
                                               std::vector<double> t_break,
                                               std::vector<double> beta_values) {
  if (std::isnan(radius) || radius <= 0.0)
    throw std::invalid_argument("quasi_regular: radius must be positive");
  if (t_break.empty() || t_break.size() != beta_values.size())
    throw std::invalid_argument(
        "quasi_regular: need matching nonempty breakpoint and value lists");
  if (t_break.front() != 0.0)
    throw std::invalid_argument("quasi_regular: first breakpoint must be 0");
  for (std::size_t i = 0; i < t_break.size(); ++i) {
    if (!std::isfinite(t_break[i]) || t_break[i] >= radius)
      throw std::invalid_argument("quasi_regular: breakpoints must lie in [0, radius)");
    if (i > 0 && t_break[i] <= t_break[i - 1])
      throw std::invalid_argument("quasi_regular: breakpoints must increase");
    if (!std::isfinite(beta_values[i]) || beta_values[i] <= 0.0)
      throw std::invalid_argument("quasi_regular: bound values must be positive");
    if (i > 0 && beta_values[i] < beta_values[i - 1])
      throw std::invalid_argument("quasi_regular: bound must be nondecreasing");
  }
  RegularityModel r;
  r.kind_ = RegularityKind::QuasiRegular;
  r.radius_ = radius;
  r.t_break_ = std::move(t_break);
  r.beta_values_ = std::move(beta_values);
  return r;
}

RegularityModel RegularityModel::regular_point(double radius, double beta) {
  if (std::isnan(radius) || radius <= 0.0)
    throw std::invalid_argument("regular_point: radius must be positive");
  if (!std::isfinite(beta) || beta <= 0.0)
    throw std::invalid_argument("regular_point: beta must be positive");
  RegularityModel r;
  r.kind_ = RegularityKind::RegularPoint;
  r.radius_ = radius;
  r.beta_constant_ = beta;
  return r;
}

RegularityModel RegularityModel::robinson(std::optional<Matrix> G,
                                          std::optional<double> beta0) {
  if (G) {
    if (G->rows < 1 || G->cols < 1)
      throw std::invalid_argument("robinson: G must be nonempty");
    require_finite(*G, "robinson G");
  }
  if (beta0 && (!std::isfinite(*beta0) || *beta0 <= 0.0))
    throw std::invalid_argument("robinson: beta0 must be positive");
  RegularityModel r;
  r.kind_ = RegularityKind::Robinson;
  r.G_ = std::move(G);
  r.beta0_ = beta0;
  return r;
}

ConvexProcessNormEstimate estimate_convex_process_inverse_norm(const Matrix& G,
                                                               const Matrix& J0) {
  if (G.rows < 1 || G.cols < 1 || J0.rows < 1 || J0.cols < 1)
    throw std::invalid_argument("process norm: empty matrix");
  if (G.cols != J0.rows)
    throw std::invalid_argument("process norm: G and J0 dimensions disagree");
  require_finite(G, "process norm G");
  require_finite(J0, "process norm J0");
  const int m = J0.rows;
  const int n = J0.cols;
  if (m > 12)
    throw std::invalid_argument(
        "process norm: vertex enumeration supports at most 12 residual dimensions");

  const Matrix GJ = matmul(G, J0);
  ConvexProcessNormEstimate est;
  est.vertex_count = 1 << m;
  est.beta0 = 0.0;

  Vector y(static_cast<std::size_t>(m));
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    for (int i = 0; i < m; ++i)
      y[static_cast<std::size_t>(i)] = ((mask >> i) & 1u) ? 1.0 : -1.0;
    const Vector Gy = matvec(G, y);

    LpBuilder lb(n + 1);
    lb.lower[static_cast<std::size_t>(n)] = 0.0;
    lb.c[static_cast<std::size_t>(n)] = 1.0;
    for (int i = 0; i < G.rows; ++i) {
      std::size_t row = lb.add_row(Gy[static_cast<std::size_t>(i)], RowSense::Le);
      for (int j = 0; j < n; ++j) lb.at(row, j) = GJ(i, j);
    }
    for (int j = 0; j < n; ++j) {
      std::size_t up = lb.add_row(0.0, RowSense::Le);
      lb.at(up, j) = 1.0;
      lb.at(up, n) = -1.0;
      std::size_t dn = lb.add_row(0.0, RowSense::Le);
      lb.at(dn, j) = -1.0;
      lb.at(dn, n) = -1.0;
    }
    LpSolution sol = solve_lp(lb.build());
    if (sol.status == LpStatus::Infeasible) {
      est.onto = false;
      continue;
    }
    if (sol.status != LpStatus::Optimal)
      throw std::runtime_error("process norm: vertex LP failed unexpectedly");
    est.beta0 = std::max(est.beta0, sol.objective);
  }
  return est;
}

RegularPointCheck check_regular_point(const OuterFunction& h, const Vector& F0,
                                      const Matrix& J0) {
  const int m = static_cast<int>(h.m());
  const int n = J0.cols;
  if (F0.size() != h.m() || J0.rows != m || n < 1)
    throw std::invalid_argument("regular point check: dimension mismatch");
  require_finite(F0, "regular point F0");
  require_finite(J0, "regular point J0");

  // Feasible set: y in [-1,1]^m with J0^T y = 0 and sigma_C(y) <= <y, F0>.
  // For C = {z : A z <= g}: sigma_C(y) = min { <g,l> : A^T l = y, l >= 0 },
  // so the support condition is encoded with multipliers l.
  const bool affine = h.kind() == OuterKind::MaxAffine;
  const int p = affine ? h.A().rows : 0;
  LpBuilder lb(m + p);
  for (int i = 0; i < m; ++i) {
    lb.lower[static_cast<std::size_t>(i)] = -1.0;
    lb.upper[static_cast<std::size_t>(i)] = 1.0;
  }
  for (int j = 0; j < n; ++j) {
    std::size_t row = lb.add_row(0.0, RowSense::Eq);
    for (int i = 0; i < m; ++i) lb.at(row, i) = J0(i, j);
  }
  if (affine) {
    for (int i = 0; i < p; ++i) lb.lower[static_cast<std::size_t>(m + i)] = 0.0;
    for (int k = 0; k < m; ++k) {
      std::size_t row = lb.add_row(0.0, RowSense::Eq);
      lb.at(row, k) = -1.0;
      for (int i = 0; i < p; ++i) lb.at(row, m + i) = h.A()(i, k);
    }
    std::size_t sup = lb.add_row(0.0, RowSense::Le);
    for (int i = 0; i < p; ++i)
      lb.at(sup, m + i) = h.h_min() - h.b()[static_cast<std::size_t>(i)];
    for (int k = 0; k < m; ++k) lb.at(sup, k) = -F0[static_cast<std::size_t>(k)];
  } else {
    std::size_t sup = lb.add_row(0.0, RowSense::Le);
    for (int k = 0; k < m; ++k)
      lb.at(sup, k) = h.center()[static_cast<std::size_t>(k)] - F0[static_cast<std::size_t>(k)];
  }

  RegularPointCheck out;
  out.max_abnormal = 0.0;
  for (int i = 0; i < m; ++i) {
    for (double sign : {1.0, -1.0}) {
      LinearProgram lp = lb.build();
      lp.c[static_cast<std::size_t>(i)] = -sign;  // maximize sign * y_i
      LpSolution sol = solve_lp(lp);
      if (sol.status != LpStatus::Optimal)
        throw std::runtime_error("regular point check: LP failed unexpectedly");
      out.max_abnormal = std::max(out.max_abnormal, -sol.objective);
    }
  }
  out.regular = out.max_abnormal <= 1e-7;
  return out;
}

double quasi_regular_bound_from_robinson(double beta0, const MajorantModel& f,
                                         double t) {
  if (!std::isfinite(beta0) || beta0 <= 0.0)
    throw std::invalid_argument("robinson bound: beta0 must be positive");
  if (!(t >= 0.0) || !(t < f.radius()))
    throw std::domain_error("robinson bound: t outside [0, R)");
  double denom = 1.0 - beta0 * (f.fp(t) + 1.0);
  if (!(denom > 0.0))
    throw std::domain_error("robinson bound: undefined at this t (denominator <= 0)");
  return beta0 / denom;
}

double robinson_radius(double beta0, const MajorantModel& f) {
  if (!std::isfinite(beta0) || beta0 <= 0.0)
    throw std::invalid_argument("robinson radius: beta0 must be positive");
  const double R = f.radius();
  auto g = [&](double t) { return beta0 * (f.fp(t) + 1.0) - 1.0; };
  double hi = R * (1.0 - 1e-12);
  if (g(hi) < 0.0) return R;
  double lo = 0.0;  // g(0) = -1 < 0 always
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

ResolvedRegularity resolve_regularity(const RegularityModel& reg,
                                      const OuterFunction& h, const Matrix& J0,
                                      const MajorantModel& f) {
  ResolvedRegularity rr;
  rr.kind = reg.kind();
  switch (reg.kind()) {
    case RegularityKind::QuasiRegular: {
      rr.radius = reg.radius();
      std::vector<double> tb = reg.t_break();
      std::vector<double> bv = reg.beta_values();
      double rad = rr.radius;
      rr.beta = [tb, bv, rad](double t) {
        if (!(t >= 0.0) || !(t < rad))
          throw std::domain_error("quasi-regular bound: t outside [0, radius)");
        std::size_t i = 0;
        while (i + 1 < tb.size() && t >= tb[i + 1]) ++i;
        return bv[i];
      };
      return rr;
    }
    case RegularityKind::RegularPoint: {
      rr.radius = reg.radius();
      double beta = reg.beta_constant();
      double rad = rr.radius;
      rr.beta = [beta, rad](double t) {
        if (!(t >= 0.0) || !(t < rad))
          throw std::domain_error("regular point bound: t outside [0, radius)");
        return beta;
      };
      return rr;
    }
    case RegularityKind::Robinson: {
      if (!h.is_cone())
        throw RegularityError(
            "robinson condition requires the minimizer set to be a cone");
      Matrix G;
      if (reg.G()) {
        G = *reg.G();
        if (static_cast<std::size_t>(G.cols) != h.m())
          throw std::invalid_argument("robinson: G column count must match residual dimension");
      } else if (h.kind() == OuterKind::MaxAffine) {
        G = h.A();
      } else {
        const int m = static_cast<int>(h.m());
        G = Matrix(2 * m, m);
        for (int i = 0; i < m; ++i) {
          G(i, i) = 1.0;
          G(m + i, i) = -1.0;
        }
      }
      double beta0;
      if (reg.beta0()) {
        beta0 = *reg.beta0();
      } else {
        ConvexProcessNormEstimate est = estimate_convex_process_inverse_norm(G, J0);
        if (!est.onto)
          throw RegularityError(
              "linearized inclusion is not onto: some residual directions admit no step");
        rr.vertex_count = est.vertex_count;
        rr.beta0_estimated = true;
        beta0 = est.beta0;
      }
      rr.beta0 = beta0;
      if (beta0 <= 0.0) {
        // Degenerate: every direction solvable with a zero step.  The bound
        // collapses to zero on the whole majorant domain.
        rr.radius = f.radius();
        double rad = rr.radius;
        rr.beta = [rad](double t) {
          if (!(t >= 0.0) || !(t < rad))
            throw std::domain_error("robinson bound: t outside [0, radius)");
          return 0.0;
        };
        return rr;
      }
      rr.radius = robinson_radius(beta0, f);
      double rad = rr.radius;
      MajorantModel fc = f;
      double b0 = beta0;
      rr.beta = [b0, fc, rad](double t) {
        if (!(t >= 0.0) || !(t < rad))
          throw std::domain_error("robinson bound: t outside [0, radius)");
        return quasi_regular_bound_from_robinson(b0, fc, t);
      };
      return rr;
    }
  }
  throw std::logic_error("unreachable regularity kind");
}

double alpha_lower_bound(const ResolvedRegularity& rr, const MajorantModel& f,
                         double xi, double eta, double t_hi) {
  if (!std::isfinite(xi) || xi <= 0.0)
    throw std::invalid_argument("alpha bound: xi must be positive");
  if (!std::isfinite(eta) || eta < 1.0)
    throw std::invalid_argument("alpha bound: eta must be at least 1");
  const double dom = std::min(rr.radius, f.radius());
  if (!(xi < dom)) return kInf;

  switch (rr.kind) {
    case RegularityKind::RegularPoint:
      return ratio_at(eta, rr.beta(xi), f.fp(xi) + 1.0);
    case RegularityKind::Robinson: {
      double b0 = rr.beta0.value_or(0.0);
      if (b0 <= 0.0) return 0.0;
      return eta * b0 / (1.0 + (eta - 1.0) * b0 * (f.fp(xi) + 1.0));
    }
    case RegularityKind::QuasiRegular: {
      const double hi = std::min(t_hi, dom);
      if (!(xi < hi)) return 1.001 * ratio_at(eta, rr.beta(xi), f.fp(xi) + 1.0);
      double sup = 0.0;
      const int N = 1024;
      for (int i = 0; i < N; ++i) {
        double t = xi + (hi - xi) * static_cast<double>(i) / N;
        sup = std::max(sup, ratio_at(eta, rr.beta(t), f.fp(t) + 1.0));
      }
      return 1.001 * sup;
    }
  }
  throw std::logic_error("unreachable regularity kind");
}

Certificate certify(const OuterFunction& h, const Vector& F0, const Matrix& J0,
                    double delta, double eta, const RegularityModel& reg,
                    const MajorantModel& f, std::optional<double> xi_override,
                    std::optional<double> alpha_override) {
  if (!std::isfinite(eta) || eta < 1.0)
    throw std::invalid_argument("certify: eta must be at least 1");
  if (std::isnan(delta) || delta <= 0.0)
    throw std::invalid_argument("certify: delta must be positive");
  if (F0.size() != h.m() || static_cast<std::size_t>(J0.rows) != h.m() || J0.cols < 1)
    throw std::invalid_argument("certify: dimension mismatch");
  require_finite(F0, "certify F0");
  require_finite(J0, "certify J0");
  if ((xi_override && std::isnan(*xi_override)) ||
      (alpha_override && std::isnan(*alpha_override)))
    throw std::invalid_argument("certify: overrides must not be NaN");

  Certificate cert;
  cert.eta = eta;
  cert.delta = delta;
  cert.majorant = f;
  cert.d0 = h.distance_to_C(F0);

  ResolvedRegularity rr = resolve_regularity(reg, h, J0, f);
  cert.regularity = rr.kind;
  cert.radius = rr.radius;
  cert.beta0 = rr.beta0;
  cert.vertex_count = rr.vertex_count;
  cert.beta0_estimated = rr.beta0_estimated;

  const double beta_zero = rr.beta(0.0);
  const double xi_floor = eta * beta_zero * cert.d0;
  cert.xi = xi_override ? *xi_override : std::max(xi_floor, 1e-12);
  const bool xi_usable = std::isfinite(cert.xi) && cert.xi > 0.0;

  const double probe_hi = std::min(rr.radius, f.radius());
  const double bound_probe =
      xi_usable ? alpha_lower_bound(rr, f, cert.xi, eta, probe_hi) : kInf;
  cert.alpha = alpha_override
                   ? *alpha_override
                   : ((std::isfinite(bound_probe) && bound_probe > 0.0) ? bound_probe : 1.0);
  const bool alpha_usable = std::isfinite(cert.alpha) && cert.alpha > 0.0;

  // Scalar analysis only makes sense for positive data; without it the
  // certificate still carries every check (failed ones yield valid=false).
  ZeroInfo z;
  if (xi_usable && alpha_usable) {
    AuxiliaryFunction aux(f, cert.xi, cert.alpha);
    z = smallest_zero(aux);
    if (z.h3 && z.h4) cert.q_quadratic = rate_constants(aux, z.t_star).q_quadratic;
  }
  cert.h3 = z.h3;
  cert.h4 = z.h4;
  cert.t_star = z.h3 ? z.t_star : 0.0;
  cert.rate = z.h3 ? (z.h4 ? "quadratic" : "linear") : "none";

  double bound = bound_probe;
  if (rr.kind == RegularityKind::QuasiRegular && z.h3)
    bound = alpha_lower_bound(rr, f, cert.xi, eta, std::min(z.t_star, rr.radius));
  cert.alpha_bound = bound;
  cert.alpha_strictly_above_bound =
      std::isfinite(bound) && cert.alpha > bound;  // advisory, not a hypothesis

  auto add = [&](const char* name, double lhs, double rhs, bool holds) {
    cert.checks.push_back({name, lhs, rhs, holds});
  };
  add("d(F(x0),C)>0", cert.d0, 0.0, cert.d0 > 0.0);
  add("xi>0", cert.xi, 0.0, xi_usable);
  add("alpha>0", cert.alpha, 0.0, alpha_usable);
  add("delta>=xi", delta, cert.xi, delta >= cert.xi - 1e-9 * (1.0 + cert.xi));
  add("xi>=eta*beta(0)*d0", cert.xi, xi_floor,
      cert.xi >= xi_floor - 1e-9 * (1.0 + std::fabs(xi_floor)));
  add("alpha>=alpha_bound", cert.alpha, bound,
      std::isfinite(bound) && cert.alpha >= bound - 1e-9 * (1.0 + std::fabs(bound)));
  add("h3", z.h3 ? 1.0 : 0.0, 1.0, z.h3);
  add("t*<=radius", z.h3 ? z.t_star : kInf, rr.radius,
      z.h3 && z.t_star <= rr.radius + 1e-9 * (1.0 + rr.radius));

  cert.valid = true;
  for (const CertificateCheck& c : cert.checks) cert.valid = cert.valid && c.holds;
  return cert;
}

}  // namespace cgn
