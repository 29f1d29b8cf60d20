#include "cgn/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <utility>

namespace cgn {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw SchemaError(where + ": " + what);
}

void check_object(const njson& j, std::initializer_list<const char*> allowed,
                  std::initializer_list<const char*> required,
                  const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& el : j.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || el.key() == k;
    if (!known) fail(where, "unknown key \"" + el.key() + "\"");
  }
  for (const char* k : required)
    if (!j.contains(k)) fail(where, std::string("missing key \"") + k + "\"");
}

double as_number(const njson& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(where, "number must be finite");
  return d;
}

// number, or the strings "inf" / "+inf" / "-inf"
double as_extended(const njson& v, const std::string& where) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    fail(where, "expected a number or \"inf\" / \"-inf\", got \"" + s + "\"");
  }
  return as_number(v, where);
}

long long as_integer(const njson& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<long long>();
}

std::size_t as_dimension(const njson& v, const std::string& where) {
  const long long n = as_integer(v, where);
  if (n < 1 || n > 1000) fail(where, "dimension must be between 1 and 1000");
  return static_cast<std::size_t>(n);
}

bool as_bool(const njson& v, const std::string& where) {
  if (!v.is_boolean()) fail(where, "expected a boolean");
  return v.get<bool>();
}

std::string as_string(const njson& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

Vector as_vector(const njson& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of numbers");
  Vector out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_number(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Matrix as_matrix(const njson& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of rows");
  const std::size_t rows = v.size();
  std::size_t cols = 0;
  std::vector<Vector> data;
  data.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    Vector row = as_vector(v[i], where + "[" + std::to_string(i) + "]");
    if (i == 0) {
      cols = row.size();
      if (cols == 0) fail(where, "rows must not be empty");
    } else if (row.size() != cols) {
      fail(where, "rows have inconsistent lengths");
    }
    data.push_back(std::move(row));
  }
  Matrix M(static_cast<int>(rows), static_cast<int>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t c = 0; c < cols; ++c)
      M(static_cast<int>(i), static_cast<int>(c)) = data[i][c];
  return M;
}

njson vector_to_json(const Vector& v) {
  njson a = njson::array();
  for (double x : v) a.push_back(x);
  return a;
}

njson matrix_to_json(const Matrix& M) {
  njson a = njson::array();
  for (int i = 0; i < M.rows; ++i) {
    njson row = njson::array();
    for (int j = 0; j < M.cols; ++j) row.push_back(M(i, j));
    a.push_back(std::move(row));
  }
  return a;
}

PolynomialMap parse_map(const njson& j) {
  check_object(j, {"n", "m", "components"}, {"n", "m", "components"}, "map");
  const std::size_t n = as_dimension(j["n"], "map.n");
  const std::size_t m = as_dimension(j["m"], "map.m");
  const njson& comps = j["components"];
  if (!comps.is_array() || comps.size() != m)
    fail("map.components", "expected an array with one entry per component (m = " +
                               std::to_string(m) + ")");
  std::vector<std::vector<Term>> components(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::string where = "map.components[" + std::to_string(i) + "]";
    const njson& terms = comps[i];
    if (!terms.is_array()) fail(where, "expected an array of terms");
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const std::string twhere = where + "[" + std::to_string(t) + "]";
      const njson& term = terms[t];
      check_object(term, {"coeff", "powers"}, {"coeff", "powers"}, twhere);
      Term out;
      out.coeff = as_number(term["coeff"], twhere + ".coeff");
      const njson& powers = term["powers"];
      if (!powers.is_array() || powers.size() != n)
        fail(twhere + ".powers", "expected an array of n = " + std::to_string(n) +
                                     " exponents");
      for (std::size_t p = 0; p < powers.size(); ++p) {
        const long long e = as_integer(powers[p], twhere + ".powers[" +
                                                      std::to_string(p) + "]");
        if (e < 0 || e > 64)
          fail(twhere + ".powers", "exponents must be integers in [0, 64]");
        out.powers.push_back(static_cast<unsigned>(e));
      }
      components[i].push_back(std::move(out));
    }
  }
  try {
    return PolynomialMap(n, m, std::move(components));
  } catch (const std::invalid_argument& e) {
    fail("map", e.what());
  }
}

OuterFunction parse_outer(const njson& j, std::size_t m) {
  check_object(j, {"kind", "A", "b", "center"}, {"kind"}, "outer");
  const std::string kind = as_string(j["kind"], "outer.kind");
  try {
    if (kind == "max_affine") {
      check_object(j, {"kind", "A", "b"}, {"kind", "A", "b"}, "outer");
      Matrix A = as_matrix(j["A"], "outer.A");
      if (static_cast<std::size_t>(A.cols) != m)
        fail("outer.A", "expected m = " + std::to_string(m) + " columns");
      return OuterFunction::max_affine(std::move(A),
                                       as_vector(j["b"], "outer.b"));
    }
    if (kind == "l1" || kind == "linf") {
      check_object(j, {"kind", "center"}, {"kind", "center"}, "outer");
      Vector c = as_vector(j["center"], "outer.center");
      if (c.size() != m)
        fail("outer.center", "expected m = " + std::to_string(m) + " entries");
      return kind == "l1" ? OuterFunction::l1_deviation(std::move(c))
                          : OuterFunction::linf_deviation(std::move(c));
    }
  } catch (const std::invalid_argument& e) {
    fail("outer", e.what());
  }
  fail("outer.kind", "expected \"max_affine\", \"l1\" or \"linf\", got \"" + kind + "\"");
}

RegularityModel parse_regularity(const njson& j, std::size_t m) {
  check_object(j, {"kind", "radius", "beta", "t_break", "beta_values", "G", "beta0"},
               {"kind"}, "regularity");
  const std::string kind = as_string(j["kind"], "regularity.kind");
  try {
    if (kind == "regular_point") {
      check_object(j, {"kind", "radius", "beta"}, {"kind", "radius", "beta"},
                   "regularity");
      return RegularityModel::regular_point(
          as_number(j["radius"], "regularity.radius"),
          as_number(j["beta"], "regularity.beta"));
    }
    if (kind == "quasi_regular") {
      check_object(j, {"kind", "radius", "t_break", "beta_values"},
                   {"kind", "radius", "t_break", "beta_values"}, "regularity");
      return RegularityModel::quasi_regular(
          as_number(j["radius"], "regularity.radius"),
          as_vector(j["t_break"], "regularity.t_break"),
          as_vector(j["beta_values"], "regularity.beta_values"));
    }
    if (kind == "robinson") {
      check_object(j, {"kind", "G", "beta0"}, {"kind"}, "regularity");
      std::optional<Matrix> G;
      if (j.contains("G")) {
        G = as_matrix(j["G"], "regularity.G");
        if (static_cast<std::size_t>(G->cols) != m)
          fail("regularity.G", "expected m = " + std::to_string(m) + " columns");
      }
      std::optional<double> beta0;
      if (j.contains("beta0"))
        beta0 = as_number(j["beta0"], "regularity.beta0");
      return RegularityModel::robinson(std::move(G), beta0);
    }
  } catch (const std::invalid_argument& e) {
    fail("regularity", e.what());
  }
  fail("regularity.kind",
       "expected \"quasi_regular\", \"regular_point\" or \"robinson\", got \"" +
           kind + "\"");
}

MajorantModel parse_majorant(const njson& j) {
  check_object(j, {"kind", "K", "R", "gamma", "name"}, {"kind"}, "majorant");
  const std::string kind = as_string(j["kind"], "majorant.kind");
  try {
    if (kind == "lipschitz") {
      check_object(j, {"kind", "K", "R"}, {"kind", "K", "R"}, "majorant");
      return MajorantModel::lipschitz(as_number(j["K"], "majorant.K"),
                                      as_extended(j["R"], "majorant.R"));
    }
    if (kind == "smale") {
      check_object(j, {"kind", "gamma"}, {"kind", "gamma"}, "majorant");
      return MajorantModel::smale(as_number(j["gamma"], "majorant.gamma"));
    }
    if (kind == "custom") {
      check_object(j, {"kind", "name", "R"}, {"kind", "name", "R"}, "majorant");
      return MajorantModel::custom_catalog(as_string(j["name"], "majorant.name"),
                                           as_number(j["R"], "majorant.R"));
    }
  } catch (const std::invalid_argument& e) {
    fail("majorant", e.what());
  }
  fail("majorant.kind",
       "expected \"lipschitz\", \"smale\" or \"custom\", got \"" + kind + "\"");
}

njson majorant_to_json(const std::optional<MajorantModel>& f) {
  if (!f) return njson(nullptr);
  njson j;
  if (const LipschitzModel* lip = f->as_lipschitz()) {
    j["kind"] = "lipschitz";
    j["K"] = json_number(lip->K);
    j["R"] = json_number(lip->R);
    return j;
  }
  if (const SmaleModel* sm = f->as_smale()) {
    j["kind"] = "smale";
    j["gamma"] = json_number(sm->gamma);
    return j;
  }
  const CustomModel* c = f->as_custom();
  if (c == nullptr || c->name.empty()) return njson(nullptr);  // not serializable
  j["kind"] = "custom";
  j["name"] = c->name;
  j["R"] = json_number(c->R);
  return j;
}

const char* regularity_kind_name(RegularityKind k) {
  switch (k) {
    case RegularityKind::QuasiRegular: return "quasi_regular";
    case RegularityKind::RegularPoint: return "regular_point";
    case RegularityKind::Robinson: return "robinson";
  }
  return "unknown";
}

RegularityKind regularity_kind_from_name(const std::string& s,
                                         const std::string& where) {
  if (s == "quasi_regular") return RegularityKind::QuasiRegular;
  if (s == "regular_point") return RegularityKind::RegularPoint;
  if (s == "robinson") return RegularityKind::Robinson;
  fail(where, "unknown regularity kind \"" + s + "\"");
}

njson regularity_to_json(const RegularityModel& r) {
  njson j;
  j["kind"] = regularity_kind_name(r.kind());
  switch (r.kind()) {
    case RegularityKind::RegularPoint:
      j["radius"] = json_number(r.radius());
      j["beta"] = json_number(r.beta_constant());
      break;
    case RegularityKind::QuasiRegular:
      j["radius"] = json_number(r.radius());
      j["t_break"] = vector_to_json(r.t_break());
      j["beta_values"] = vector_to_json(r.beta_values());
      break;
    case RegularityKind::Robinson:
      if (r.G()) j["G"] = matrix_to_json(*r.G());
      if (r.beta0()) j["beta0"] = json_number(*r.beta0());
      break;
  }
  return j;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

njson json_number(double v) {
  if (std::isnan(v)) throw std::logic_error("json_number: NaN is not representable");
  if (std::isinf(v)) return njson(v > 0 ? "inf" : "-inf");
  return njson(v);
}

double number_from_json(const njson& j, const std::string& context) {
  return as_extended(j, context);
}

ProblemInputs parse_problem(const njson& j) {
  check_object(j,
               {"map", "outer", "x0", "delta", "eta", "regularity", "majorant",
                "overrides"},
               {"map", "outer", "x0", "delta", "eta", "regularity", "majorant"},
               "problem");

  PolynomialMap map = parse_map(j["map"]);
  OuterFunction outer = parse_outer(j["outer"], map.m());

  Vector x0 = as_vector(j["x0"], "x0");
  if (x0.size() != map.n())
    fail("x0", "expected n = " + std::to_string(map.n()) + " entries");

  const double delta = as_extended(j["delta"], "delta");
  if (!(delta > 0.0)) fail("delta", "must be positive");
  const double eta = as_number(j["eta"], "eta");
  if (eta < 1.0) fail("eta", "must be at least 1");

  RegularityModel regularity = parse_regularity(j["regularity"], map.m());
  MajorantModel majorant = parse_majorant(j["majorant"]);

  CompositeProblem problem{std::move(map), std::move(outer), std::move(x0),
                           delta, eta};
  std::optional<double> xi_override, alpha_override;
  if (j.contains("overrides")) {
    const njson& o = j["overrides"];
    check_object(o, {"xi", "alpha", "tol_step", "tol_feas"}, {}, "overrides");
    if (o.contains("xi")) xi_override = as_number(o["xi"], "overrides.xi");
    if (o.contains("alpha")) alpha_override = as_number(o["alpha"], "overrides.alpha");
    if (o.contains("tol_step")) {
      problem.tol_step = as_number(o["tol_step"], "overrides.tol_step");
      if (problem.tol_step < 0.0) fail("overrides.tol_step", "must be non-negative");
    }
    if (o.contains("tol_feas")) {
      problem.tol_feas = as_number(o["tol_feas"], "overrides.tol_feas");
      if (problem.tol_feas < 0.0) fail("overrides.tol_feas", "must be non-negative");
    }
  }

  return ProblemInputs{std::move(problem), std::move(regularity),
                       std::move(majorant), xi_override, alpha_override};
}

ProblemInputs parse_problem_text(const std::string& text) {
  njson j;
  try {
    j = njson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail("problem", std::string("malformed JSON: ") + e.what());
  }
  return parse_problem(j);
}

ProblemInputs parse_problem_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("problem", "cannot read file \"" + path + "\"");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_problem_text(text);
}

njson problem_to_json(const ProblemInputs& in) {
  njson j;

  njson map;
  map["n"] = in.problem.map.n();
  map["m"] = in.problem.map.m();
  njson comps = njson::array();
  for (const std::vector<Term>& terms : in.problem.map.components()) {
    njson jterms = njson::array();
    for (const Term& t : terms) {
      njson jt;
      jt["coeff"] = t.coeff;
      njson powers = njson::array();
      for (unsigned p : t.powers) powers.push_back(p);
      jt["powers"] = std::move(powers);
      jterms.push_back(std::move(jt));
    }
    comps.push_back(std::move(jterms));
  }
  map["components"] = std::move(comps);
  j["map"] = std::move(map);

  njson outer;
  switch (in.problem.outer.kind()) {
    case OuterKind::MaxAffine:
      outer["kind"] = "max_affine";
      outer["A"] = matrix_to_json(in.problem.outer.A());
      outer["b"] = vector_to_json(in.problem.outer.b());
      break;
    case OuterKind::L1Deviation:
      outer["kind"] = "l1";
      outer["center"] = vector_to_json(in.problem.outer.center());
      break;
    case OuterKind::LInfDeviation:
      outer["kind"] = "linf";
      outer["center"] = vector_to_json(in.problem.outer.center());
      break;
  }
  j["outer"] = std::move(outer);

  j["x0"] = vector_to_json(in.problem.x0);
  j["delta"] = json_number(in.problem.delta);
  j["eta"] = json_number(in.problem.eta);
  j["regularity"] = regularity_to_json(in.regularity);
  j["majorant"] = majorant_to_json(in.majorant);

  njson overrides;
  if (in.xi_override) overrides["xi"] = json_number(*in.xi_override);
  if (in.alpha_override) overrides["alpha"] = json_number(*in.alpha_override);
  if (in.problem.tol_step != 1e-12) overrides["tol_step"] = json_number(in.problem.tol_step);
  if (in.problem.tol_feas != 1e-9) overrides["tol_feas"] = json_number(in.problem.tol_feas);
  if (!overrides.empty()) j["overrides"] = std::move(overrides);

  return j;
}

njson certificate_to_json(const Certificate& c) {
  njson j;
  j["valid"] = c.valid;
  j["rate"] = c.rate;
  j["eta"] = json_number(c.eta);
  j["delta"] = json_number(c.delta);
  j["d0"] = json_number(c.d0);
  j["xi"] = json_number(c.xi);
  j["alpha"] = json_number(c.alpha);
  j["alpha_bound"] = json_number(c.alpha_bound);
  j["alpha_strictly_above_bound"] = c.alpha_strictly_above_bound;
  j["regularity"] = regularity_kind_name(c.regularity);
  j["radius"] = json_number(c.radius);
  j["beta0"] = c.beta0 ? json_number(*c.beta0) : njson(nullptr);
  j["vertex_count"] = c.vertex_count;
  j["beta0_estimated"] = c.beta0_estimated;
  j["majorant"] = majorant_to_json(c.majorant);
  j["h3"] = c.h3;
  j["h4"] = c.h4;
  j["t_star"] = c.h3 ? json_number(c.t_star) : njson(nullptr);
  j["q_quadratic"] = c.q_quadratic ? json_number(*c.q_quadratic) : njson(nullptr);
  njson checks = njson::array();
  for (const CertificateCheck& chk : c.checks) {
    njson jc;
    jc["name"] = chk.name;
    jc["lhs"] = json_number(chk.lhs);
    jc["rhs"] = json_number(chk.rhs);
    jc["holds"] = chk.holds;
    checks.push_back(std::move(jc));
  }
  j["checks"] = std::move(checks);
  return j;
}

Certificate certificate_from_json(const njson& j) {
  check_object(j,
               {"valid", "rate", "eta", "delta", "d0", "xi", "alpha",
                "alpha_bound", "alpha_strictly_above_bound", "regularity",
                "radius", "beta0", "vertex_count", "beta0_estimated", "majorant",
                "h3", "h4", "t_star", "q_quadratic", "checks"},
               {"valid", "rate", "eta", "delta", "d0", "xi", "alpha",
                "alpha_bound", "alpha_strictly_above_bound", "regularity",
                "radius", "beta0", "vertex_count", "beta0_estimated", "majorant",
                "h3", "h4", "t_star", "q_quadratic", "checks"},
               "certificate");
  Certificate c;
  c.valid = as_bool(j["valid"], "certificate.valid");
  c.rate = as_string(j["rate"], "certificate.rate");
  if (c.rate != "quadratic" && c.rate != "linear" && c.rate != "none")
    fail("certificate.rate", "unknown rate \"" + c.rate + "\"");
  c.eta = as_extended(j["eta"], "certificate.eta");
  c.delta = as_extended(j["delta"], "certificate.delta");
  c.d0 = as_extended(j["d0"], "certificate.d0");
  c.xi = as_extended(j["xi"], "certificate.xi");
  c.alpha = as_extended(j["alpha"], "certificate.alpha");
  c.alpha_bound = as_extended(j["alpha_bound"], "certificate.alpha_bound");
  c.alpha_strictly_above_bound =
      as_bool(j["alpha_strictly_above_bound"],
              "certificate.alpha_strictly_above_bound");
  c.regularity = regularity_kind_from_name(
      as_string(j["regularity"], "certificate.regularity"),
      "certificate.regularity");
  c.radius = as_extended(j["radius"], "certificate.radius");
  if (!j["beta0"].is_null())
    c.beta0 = as_extended(j["beta0"], "certificate.beta0");
  c.vertex_count = static_cast<int>(
      as_integer(j["vertex_count"], "certificate.vertex_count"));
  c.beta0_estimated = as_bool(j["beta0_estimated"], "certificate.beta0_estimated");
  if (!j["majorant"].is_null()) c.majorant = parse_majorant(j["majorant"]);
  c.h3 = as_bool(j["h3"], "certificate.h3");
  c.h4 = as_bool(j["h4"], "certificate.h4");
  c.t_star = j["t_star"].is_null()
                 ? 0.0
                 : as_extended(j["t_star"], "certificate.t_star");
  if (!j["q_quadratic"].is_null())
    c.q_quadratic = as_extended(j["q_quadratic"], "certificate.q_quadratic");
  const njson& checks = j["checks"];
  if (!checks.is_array()) fail("certificate.checks", "expected an array");
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string where = "certificate.checks[" + std::to_string(i) + "]";
    const njson& jc = checks[i];
    check_object(jc, {"name", "lhs", "rhs", "holds"},
                 {"name", "lhs", "rhs", "holds"}, where);
    CertificateCheck chk;
    chk.name = as_string(jc["name"], where + ".name");
    chk.lhs = as_extended(jc["lhs"], where + ".lhs");
    chk.rhs = as_extended(jc["rhs"], where + ".rhs");
    chk.holds = as_bool(jc["holds"], where + ".holds");
    c.checks.push_back(std::move(chk));
  }
  return c;
}

std::string trace_to_csv(const RunReport& report) {
  if (report.iterations.empty())
    throw std::invalid_argument("trace_to_csv: empty run report");
  const std::size_t n = report.iterations.front().x.size();

  std::string out = "k";
  for (std::size_t jx = 0; jx < n; ++jx) out += ",x" + std::to_string(jx);
  out += ",step_norm,dist,h,t,dt,bd1_ok,bd2_ok\n";

  const MajorizationCheck* mc =
      report.majorization ? &*report.majorization : nullptr;
  for (std::size_t k = 0; k < report.iterations.size(); ++k) {
    const IterationRecord& it = report.iterations[k];
    out += std::to_string(it.k);
    for (double xv : it.x) out += "," + format_double(xv);
    out += ",";
    if (it.step_norm) out += format_double(*it.step_norm);
    out += ",";
    if (it.dist) out += format_double(*it.dist);
    out += "," + format_double(it.h_value);
    const MajorizationRow* row =
        (mc != nullptr && k < mc->rows.size()) ? &mc->rows[k] : nullptr;
    out += ",";
    if (row != nullptr) out += format_double(row->t);
    out += ",";
    if (row != nullptr) out += format_double(row->dt);
    out += ",";
    if (row != nullptr && row->bd1) out += *row->bd1 ? "1" : "0";
    out += ",";
    if (row != nullptr && row->bd2) out += *row->bd2 ? "1" : "0";
    out += "\n";
  }
  return out;
}

}  // namespace cgn
