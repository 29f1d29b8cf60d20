#pragma once
// Scalar majorant machinery.
//
// A majorant model is a scalar function f on [0, R) with f(0) = 0,
// f'(0) = -1 and f' convex and strictly increasing.  From it and data
// xi > 0, alpha > 0 the auxiliary function
//
//   f_{xi,alpha}(t) = xi + (alpha - 1) t + alpha f(t)
//
// is built; its smallest zero t* and the Newton iteration t_{k+1} = n(t_k)
// started at t_0 = 0 produce the scalar sequence that majorizes the
// composite solver's steps.

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cgn {

struct LipschitzModel {
  double K;  // f(t) = K t^2 / 2 - t
  double R;
};

struct SmaleModel {
  double gamma;  // f(t) = t / (1 - gamma t) - 2 t  on  [0, 1/gamma)
};

struct CustomModel {
  std::function<double(double)> f, fp, fpp;
  double R;
  std::string name;  // non-empty for catalog entries (serializable)
};

class MajorantModel {
 public:
  static MajorantModel lipschitz(double K, double R);
  static MajorantModel smale(double gamma);
  // Arbitrary custom model; rejected unless f(0)=0, f'(0)=-1 and f' is
  // strictly increasing and convex on a 64-point grid of [0, R).
  static MajorantModel custom(std::function<double(double)> f,
                              std::function<double(double)> fp,
                              std::function<double(double)> fpp, double R,
                              std::string name = "");
  // Named entries usable from files: "cubic", "exponential".
  static MajorantModel custom_catalog(const std::string& name, double R);
  static std::vector<std::string> catalog_names();

  double radius() const;       // R
  double f(double t) const;    // all three: domain error outside [0, R)
  double fp(double t) const;
  double fpp(double t) const;

  const LipschitzModel* as_lipschitz() const { return std::get_if<LipschitzModel>(&v_); }
  const SmaleModel* as_smale() const { return std::get_if<SmaleModel>(&v_); }
  const CustomModel* as_custom() const { return std::get_if<CustomModel>(&v_); }

 private:
  template <typename T>
  explicit MajorantModel(T m) : v_(std::move(m)) {}
  std::variant<LipschitzModel, SmaleModel, CustomModel> v_;
};

// f_{xi,alpha} bundled with its data.  Construction validates xi, alpha > 0.
struct AuxiliaryFunction {
  AuxiliaryFunction(MajorantModel m, double xi, double alpha);
  MajorantModel model;
  double xi;
  double alpha;
};

struct AuxEval {
  double value;
  double derivative;
};

// Value and derivative of f_{xi,alpha} at t in [0, R).
AuxEval eval_aux(const AuxiliaryFunction& a, double t);
double aux_second_derivative(const AuxiliaryFunction& a, double t);

struct ZeroInfo {
  bool h3 = false;    // smallest zero exists in [0, R)
  bool h4 = false;    // f'_{xi,alpha}(t*) < 0
  double t_star = 0;  // defined only when h3
  bool extra_zero = false;  // custom models: a second downward crossing before R
};

// Smallest zero of f_{xi,alpha}: closed forms for Lipschitz/Smale (the h3/h4
// flags come from the discriminant), scan + bisection for custom models.
ZeroInfo smallest_zero(const AuxiliaryFunction& a);

// Newton map n(t) = t - f_{xi,alpha}(t) / f'_{xi,alpha}(t) on [0, t*).
// Throws std::domain_error when h3 fails or t lies outside [0, t*).
double newton_map(const AuxiliaryFunction& a, double t);

struct RateConstants {
  // f''_{xi,alpha}(t*) / (-2 f'_{xi,alpha}(t*)); present iff h4 holds.
  std::optional<double> q_quadratic;
};
RateConstants rate_constants(const AuxiliaryFunction& a, double t_star);

struct ScalarTrace {
  std::vector<double> t;  // t_0 = 0, t_1 = xi, ... strictly increasing, < t*
  double t_star = 0;
  bool h3 = false, h4 = false;
  std::optional<double> q_quadratic;
};

// Newton iteration from t_0 = 0, stopping when t* - t_k <= tol or after
// max_iter steps.  Throws std::domain_error when h3 fails.
ScalarTrace scalar_sequence(const AuxiliaryFunction& a, double tol = 1e-12,
                            int max_iter = 64);

}  // namespace cgn
