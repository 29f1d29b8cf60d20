#include "cgn/scalar_majorant.hpp"

#include <cmath>
#include <stdexcept>

namespace cgn {
namespace {

void require_finite_positive(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0)
    throw std::invalid_argument(std::string(what) + " must be a positive real");
}

// Grid validation of the majorant properties: f(0)=0, f'(0)=-1, f' strictly
// increasing and midpoint-convex, f'' nonnegative.  64 points of [0, R).
void validate_majorant(const MajorantModel& m) {
  const double R = m.radius();
  const double end = R * (1.0 - 1e-9);
  if (std::fabs(m.f(0.0)) > 1e-12)
    throw std::invalid_argument("not a majorant: f(0) != 0");
  if (std::fabs(m.fp(0.0) + 1.0) > 1e-12)
    throw std::invalid_argument("not a majorant: f'(0) != -1");
  constexpr int N = 64;
  double prev = m.fp(0.0);
  for (int i = 1; i < N; ++i) {
    double t = end * i / (N - 1);
    double v = m.fp(t);
    if (!(v > prev - 1e-12))
      throw std::invalid_argument("not a majorant: f' not increasing");
    if (m.fpp(t) < -1e-12)
      throw std::invalid_argument("not a majorant: f'' negative");
    prev = v;
  }
  if (!(m.fp(end) > m.fp(0.0)))
    throw std::invalid_argument("not a majorant: f' not strictly increasing");
  for (int i = 0; i + 2 < N; i += 2) {
    double a = end * i / (N - 1), b = end * (i + 2) / (N - 1);
    double mid = m.fp(0.5 * (a + b));
    double avg = 0.5 * (m.fp(a) + m.fp(b));
    if (mid > avg + 1e-9 * (1.0 + std::fabs(avg)))
      throw std::invalid_argument("not a majorant: f' not convex");
  }
}

double check_domain(const MajorantModel& m, double t) {
  if (!(t >= 0.0) || !(t < m.radius()))
    throw std::domain_error("majorant evaluated outside [0, R)");
  return t;
}

}  // namespace

MajorantModel MajorantModel::lipschitz(double K, double R) {
  require_finite_positive(K, "K");
  require_finite_positive(R, "R");
  MajorantModel m(LipschitzModel{K, R});
  validate_majorant(m);
  return m;
}

MajorantModel MajorantModel::smale(double gamma) {
  require_finite_positive(gamma, "gamma");
  MajorantModel m(SmaleModel{gamma});
  validate_majorant(m);
  return m;
}

MajorantModel MajorantModel::custom(std::function<double(double)> f,
                                    std::function<double(double)> fp,
                                    std::function<double(double)> fpp, double R,
                                    std::string name) {
  require_finite_positive(R, "R");
  if (!f || !fp || !fpp)
    throw std::invalid_argument("custom majorant needs f, f', f''");
  MajorantModel m(CustomModel{std::move(f), std::move(fp), std::move(fpp), R,
                              std::move(name)});
  validate_majorant(m);
  return m;
}

MajorantModel MajorantModel::custom_catalog(const std::string& name, double R) {
  if (name == "cubic") {
    // f = t^3/6 + t^2/2 - t
    return custom([](double t) { return t * t * t / 6.0 + t * t / 2.0 - t; },
                  [](double t) { return t * t / 2.0 + t - 1.0; },
                  [](double t) { return t + 1.0; }, R, "cubic");
  }
  if (name == "exponential") {
    // f = e^t - 1 - 2t
    return custom([](double t) { return std::exp(t) - 1.0 - 2.0 * t; },
                  [](double t) { return std::exp(t) - 2.0; },
                  [](double t) { return std::exp(t); }, R, "exponential");
  }
  throw std::invalid_argument("unknown custom majorant: " + name);
}

std::vector<std::string> MajorantModel::catalog_names() {
  return {"cubic", "exponential"};
}

double MajorantModel::radius() const {
  if (auto* l = as_lipschitz()) return l->R;
  if (auto* s = as_smale()) return 1.0 / s->gamma;
  return as_custom()->R;
}

double MajorantModel::f(double t) const {
  check_domain(*this, t);
  if (auto* l = as_lipschitz()) return l->K * t * t / 2.0 - t;
  if (auto* s = as_smale()) return t / (1.0 - s->gamma * t) - 2.0 * t;
  return as_custom()->f(t);
}

double MajorantModel::fp(double t) const {
  check_domain(*this, t);
  if (auto* l = as_lipschitz()) return l->K * t - 1.0;
  if (auto* s = as_smale()) {
    double d = 1.0 - s->gamma * t;
    return 1.0 / (d * d) - 2.0;
  }
  return as_custom()->fp(t);
}

double MajorantModel::fpp(double t) const {
  check_domain(*this, t);
  if (auto* l = as_lipschitz()) return l->K;
  if (auto* s = as_smale()) {
    double d = 1.0 - s->gamma * t;
    return 2.0 * s->gamma / (d * d * d);
  }
  return as_custom()->fpp(t);
}

AuxiliaryFunction::AuxiliaryFunction(MajorantModel m, double x, double a)
    : model(std::move(m)), xi(x), alpha(a) {
  require_finite_positive(xi, "xi");
  require_finite_positive(alpha, "alpha");
}

AuxEval eval_aux(const AuxiliaryFunction& a, double t) {
  double f = a.model.f(t);
  double fp = a.model.fp(t);
  return {a.xi + (a.alpha - 1.0) * t + a.alpha * f, (a.alpha - 1.0) + a.alpha * fp};
}

double aux_second_derivative(const AuxiliaryFunction& a, double t) {
  return a.alpha * a.model.fpp(t);
}

ZeroInfo smallest_zero(const AuxiliaryFunction& a) {
  ZeroInfo z;
  const double R = a.model.radius();
  if (auto* l = a.model.as_lipschitz()) {
    // f_{xi,alpha}(t) = alpha K t^2/2 - t + xi
    double disc = 1.0 - 2.0 * a.alpha * l->K * a.xi;
    if (disc < 0.0) return z;
    double t_star = (1.0 - std::sqrt(disc)) / (a.alpha * l->K);
    if (!(t_star < R)) return z;
    z.h3 = true;
    z.h4 = disc > 0.0;
    z.t_star = t_star;
    return z;
  }
  if (auto* s = a.model.as_smale()) {
    double u = s->gamma * a.xi;
    double thresh = 1.0 + 2.0 * a.alpha - 2.0 * std::sqrt(a.alpha * (1.0 + a.alpha));
    if (u > thresh) return z;
    double disc = (1.0 + u) * (1.0 + u) - 4.0 * (1.0 + a.alpha) * u;
    disc = std::max(disc, 0.0);  // clip rounding noise at the h4 boundary
    double t_star =
        (1.0 + u - std::sqrt(disc)) / (2.0 * (1.0 + a.alpha) * s->gamma);
    if (!(t_star < R)) return z;
    z.h3 = true;
    z.h4 = u < thresh;
    z.t_star = t_star;
    return z;
  }

  // Custom: scan for the first downward crossing, bisect, Newton-polish.
  const double end = R * (1.0 - 1e-9);
  constexpr int N = 4096;
  double prev_t = 0.0, prev_v = a.xi;  // f_{xi,alpha}(0) = xi > 0
  int down_crossings = 0;
  double lo = -1.0, hi = -1.0;
  for (int i = 1; i <= N; ++i) {
    double t = end * i / N;
    double v = eval_aux(a, t).value;
    if (prev_v > 0.0 && v <= 0.0) {
      ++down_crossings;
      if (down_crossings == 1) { lo = prev_t; hi = t; }
    }
    prev_t = t;
    prev_v = v;
  }
  if (down_crossings == 0) return z;
  for (int k = 0; k < 100; ++k) {
    double mid = 0.5 * (lo + hi);
    if (eval_aux(a, mid).value > 0.0) lo = mid; else hi = mid;
  }
  double t_star = 0.5 * (lo + hi);
  for (int k = 0; k < 3; ++k) {  // polish
    AuxEval e = eval_aux(a, t_star);
    if (e.derivative >= -1e-300) break;
    double next = t_star - e.value / e.derivative;
    if (next >= lo - 1e-12 && next <= hi + 1e-12 && next < R) t_star = next;
    else break;
  }
  z.h3 = true;
  z.t_star = t_star;
  z.h4 = eval_aux(a, t_star).derivative < -1e-10;
  z.extra_zero = down_crossings > 1;
  return z;
}

double newton_map(const AuxiliaryFunction& a, double t) {
  ZeroInfo z = smallest_zero(a);
  if (!z.h3) throw std::domain_error("newton_map: h3 fails (no zero of f_{xi,alpha})");
  if (!(t >= 0.0) || t >= z.t_star)
    throw std::domain_error("newton_map: t outside [0, t*)");
  AuxEval e = eval_aux(a, t);
  if (!(e.derivative < 0.0)) return z.t_star;  // flat only at t* (fp noise)
  double n = t - e.value / e.derivative;
  return std::min(std::max(n, t), z.t_star);
}

RateConstants rate_constants(const AuxiliaryFunction& a, double t_star) {
  ZeroInfo z = smallest_zero(a);
  if (!z.h3) throw std::domain_error("rate_constants: h3 fails");
  RateConstants rc;
  if (z.h4) {
    AuxEval e = eval_aux(a, t_star);
    rc.q_quadratic = aux_second_derivative(a, t_star) / (-2.0 * e.derivative);
  }
  return rc;
}

ScalarTrace scalar_sequence(const AuxiliaryFunction& a, double tol, int max_iter) {
  ZeroInfo z = smallest_zero(a);
  if (!z.h3) throw std::domain_error("scalar_sequence: h3 fails");
  ScalarTrace tr;
  tr.t_star = z.t_star;
  tr.h3 = true;
  tr.h4 = z.h4;
  tr.q_quadratic = rate_constants(a, z.t_star).q_quadratic;
  tr.t.push_back(0.0);
  for (int k = 0; k < max_iter; ++k) {
    double cur = tr.t.back();
    if (z.t_star - cur <= tol) break;
    AuxEval e = eval_aux(a, cur);
    if (!(e.derivative < 0.0)) break;
    double next = cur - e.value / e.derivative;
    // overshooting t* or stalling only happens at working precision
    if (!(next > cur) || !(next < z.t_star)) break;
    tr.t.push_back(next);
  }
  return tr;
}

}  // namespace cgn
