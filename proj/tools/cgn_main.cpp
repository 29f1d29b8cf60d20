// cgn: certify, solve, and explore convex composite Gauss-Newton instances.
//
// Exit codes (scriptable contract):
//   0  success (certificate valid / run converged / table printed)
//   1  hypothesis failure (invalid certificate, h3 fails)
//   2  schema or usage error (bad file, bad flags, unknown demo)
//   3  computation error (regularity setup, subproblem failure)
//   4  no convergence within the iteration budget

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cgn/demos.hpp"
#include "cgn/json_io.hpp"
#include "cgn/solver.hpp"

namespace {

using namespace cgn;

constexpr int kExitOk = 0;
constexpr int kExitHypothesis = 1;
constexpr int kExitSchema = 2;
constexpr int kExitCompute = 3;
constexpr int kExitNoConvergence = 4;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_vector(const Vector& x) {
  std::string out = "[";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt(x[i]);
  }
  return out + "]";
}

// FILE positional and --demo NAME are alternatives everywhere.
ProblemInputs load_inputs(const std::string& file, const std::string& demo_name) {
  if (!demo_name.empty()) return demo(demo_name);
  return parse_problem_file(file);
}

Certificate certify_inputs(const ProblemInputs& in) {
  const Vector F0 = in.problem.map.eval(in.problem.x0);
  const Matrix J0 = in.problem.map.jacobian(in.problem.x0);
  return certify(in.problem.outer, F0, J0, in.problem.delta, in.problem.eta,
                 in.regularity, in.majorant, in.xi_override, in.alpha_override);
}

int cmd_certify(const std::string& file, const std::string& demo_name) {
  ProblemInputs in = load_inputs(file, demo_name);
  Certificate cert = certify_inputs(in);
  std::cout << certificate_to_json(cert).dump(2) << "\n";
  return cert.valid ? kExitOk : kExitHypothesis;
}

int cmd_solve(const std::string& file, const std::string& demo_name,
              int max_iter, const std::string& trace_path, bool do_verify) {
  ProblemInputs in = load_inputs(file, demo_name);
  RunReport rep = run(in.problem, max_iter);

  std::optional<Certificate> cert;
  std::string verify_note;
  if (do_verify) {
    cert = certify_inputs(in);
    try {
      rep.majorization = verify_majorization(rep, *cert);
    } catch (const std::invalid_argument& e) {
      verify_note = e.what();
    }
  }

  if (!trace_path.empty()) {
    std::ofstream out(trace_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trace file \"" + trace_path + "\"");
    out << trace_to_csv(rep);
    std::cout << "trace: " << trace_path << "\n";
  }

  std::cout << "stop: " << to_string(rep.stop) << "\n";
  std::cout << "iterations: " << rep.steps_taken << "\n";
  std::cout << "x_final: " << fmt_vector(rep.x_final) << "\n";
  std::cout << "h_final: " << fmt(rep.h_final) << "\n";
  if (rep.stop == StopReason::SubproblemError)
    std::cout << "error: " << rep.error << "\n";
  if (rep.stop == StopReason::MaxIter) {
    // Plateau diagnostics: how much the last stretch of the run moved.
    const std::size_t tail = std::min<std::size_t>(10, rep.iterations.size());
    double h_lo = kInf, h_hi = -kInf, dist_lo = kInf, dist_hi = -kInf;
    for (std::size_t i = rep.iterations.size() - tail; i < rep.iterations.size(); ++i) {
      const IterationRecord& it = rep.iterations[i];
      h_lo = std::min(h_lo, it.h_value);
      h_hi = std::max(h_hi, it.h_value);
      if (it.dist) {
        dist_lo = std::min(dist_lo, *it.dist);
        dist_hi = std::max(dist_hi, *it.dist);
      }
    }
    std::cout << "plateau: over the last " << tail << " iterations h(F(x)) in ["
              << fmt(h_lo) << ", " << fmt(h_hi) << "]";
    if (dist_lo <= dist_hi)
      std::cout << ", dist(0, D) in [" << fmt(dist_lo) << ", " << fmt(dist_hi) << "]";
    std::cout << "\n";
  }

  if (do_verify) {
    if (cert->valid)
      std::cout << "certificate: valid (rate = " << cert->rate
                << ", t* = " << fmt(cert->t_star) << ")\n";
    else
      std::cout << "certificate: invalid\n";
    if (rep.majorization) {
      const MajorizationCheck& mc = *rep.majorization;
      if (mc.all_ok) {
        std::cout << "majorization: all k pass\n";
      } else {
        int bad = 0, first_bad = -1;
        for (const MajorizationRow& row : mc.rows) {
          const bool ok = row.bd1.value_or(true) && row.bd2.value_or(true) &&
                          row.eq002 && row.ball;
          if (!ok) {
            ++bad;
            if (first_bad < 0) first_bad = row.k;
          }
        }
        std::cout << "majorization: " << bad << " of " << mc.rows.size()
                  << " rows fail (first at k = " << first_bad << ")\n";
      }
      if (!mc.guaranteed)
        std::cout << "note: certificate invalid, so the comparison is informational\n";
    } else {
      std::cout << "majorization: unavailable (" << verify_note << ")\n";
    }
  }

  switch (rep.stop) {
    case StopReason::Feasible:
    case StopReason::StepZero:
      return kExitOk;
    case StopReason::MaxIter:
      return kExitNoConvergence;
    case StopReason::SubproblemError:
      return kExitCompute;
  }
  return kExitCompute;
}

int cmd_scalar(std::optional<double> lipschitz_K, std::optional<double> smale_gamma,
               const std::string& custom_name, double R, double xi, double alpha,
               double tol, int max_iter) {
  const int picked = int(lipschitz_K.has_value()) + int(smale_gamma.has_value()) +
                     int(!custom_name.empty());
  if (picked != 1) {
    std::cerr << "scalar: pick exactly one of --lipschitz K, --smale GAMMA, "
                 "--custom NAME\n";
    return kExitSchema;
  }
  MajorantModel model =
      lipschitz_K  ? MajorantModel::lipschitz(*lipschitz_K, R)
      : smale_gamma ? MajorantModel::smale(*smale_gamma)
                    : MajorantModel::custom_catalog(custom_name, R);

  AuxiliaryFunction aux(model, xi, alpha);
  ZeroInfo z = smallest_zero(aux);
  if (!z.h3) {
    if (lipschitz_K) {
      const double prod = 2.0 * alpha * *lipschitz_K * xi;
      if (prod > 1.0)
        std::cerr << "h3 fails: discriminant 1 - 2*alpha*K*xi = "
                  << fmt(1.0 - prod) << " < 0 (2*alpha*K*xi = " << fmt(prod)
                  << " > 1)\n";
      else
        std::cerr << "h3 fails: the smallest zero lies outside [0, R = "
                  << fmt(R) << ")\n";
    } else {
      // No closed-form discriminant: report the best the function does.
      const double hi = model.radius();
      double best = kInf, best_t = 0.0;
      const int N = 4096;
      for (int i = 0; i < N; ++i) {
        const double t = hi * (static_cast<double>(i) / N);
        const double v = eval_aux(aux, t).value;
        if (v < best) {
          best = v;
          best_t = t;
        }
      }
      std::cerr << "h3 fails: min f_(xi,alpha) = " << fmt(best) << " at t = "
                << fmt(best_t) << " stays positive on [0, " << fmt(hi) << ")\n";
    }
    return kExitHypothesis;
  }

  ScalarTrace tr = scalar_sequence(aux, tol, max_iter);
  std::cout << "t* = " << fmt(tr.t_star) << "  (h3 holds, h4 "
            << (tr.h4 ? "holds: quadratic rate" : "fails: linear rate") << ")\n";
  std::printf("%4s  %-22s  %-22s  %s\n", "k", "t_k", "t*-t_k", "gap ratio");
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    const double gap = tr.t_star - tr.t[k];
    std::printf("%4zu  %-22.17g  %-22.17g", k, tr.t[k], gap);
    if (k > 0) {
      const double prev_gap = tr.t_star - tr.t[k - 1];
      if (prev_gap > 0.0) std::printf("  %.17g", gap / prev_gap);
    }
    std::printf("\n");
  }
  return kExitOk;
}

int cmd_demo(const std::string& name) {
  std::cout << problem_to_json(demo(name)).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gauss-Newton solver and convergence certifier for convex "
               "composite problems min h(F(x))"};
  app.require_subcommand(1);

  // certify
  std::string certify_file, certify_demo;
  CLI::App* certify_cmd = app.add_subcommand(
      "certify", "Check the convergence hypotheses of a problem file; prints "
                 "the certificate JSON and exits 0 iff it is valid");
  CLI::Option* certify_file_opt =
      certify_cmd->add_option("FILE", certify_file, "problem JSON file");
  certify_cmd->add_option("--demo", certify_demo, "use a built-in instance instead")
      ->excludes(certify_file_opt);

  // solve
  std::string solve_file, solve_demo, solve_trace;
  int solve_max_iter = 100;
  bool solve_verify = false;
  CLI::App* solve_cmd = app.add_subcommand(
      "solve", "Run the Gauss-Newton iteration on a problem file");
  CLI::Option* solve_file_opt =
      solve_cmd->add_option("FILE", solve_file, "problem JSON file");
  solve_cmd->add_option("--demo", solve_demo, "use a built-in instance instead")
      ->excludes(solve_file_opt);
  solve_cmd->add_option("--max-iter", solve_max_iter, "iteration budget")
      ->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--trace", solve_trace, "write the iteration trace CSV here");
  solve_cmd->add_flag("--verify", solve_verify,
                      "also certify and compare the run against the scalar "
                      "majorizing sequence");

  // scalar
  std::optional<double> scalar_K, scalar_gamma;
  std::string scalar_custom;
  double scalar_R = 10.0, scalar_xi = 0.0, scalar_alpha = 1.0, scalar_tol = 1e-12;
  int scalar_max_iter = 64;
  CLI::App* scalar_cmd = app.add_subcommand(
      "scalar", "Print the Newton trace of the scalar auxiliary function "
                "f_(xi,alpha) for a majorant model");
  scalar_cmd->add_option("--lipschitz", scalar_K, "Lipschitz model with constant K");
  scalar_cmd->add_option("--smale", scalar_gamma, "Smale model with parameter gamma");
  scalar_cmd->add_option("--custom", scalar_custom,
                         "catalog model by name (cubic, exponential)");
  scalar_cmd->add_option("--R", scalar_R,
                         "radius of validity for lipschitz/custom models");
  scalar_cmd->add_option("--xi", scalar_xi, "offset xi > 0")->required();
  scalar_cmd->add_option("--alpha", scalar_alpha, "curvature weight alpha > 0");
  scalar_cmd->add_option("--tol", scalar_tol, "stop once t* - t_k <= tol");
  scalar_cmd->add_option("--max-iter", scalar_max_iter, "iteration budget");

  // demo
  std::string demo_name;
  CLI::App* demo_cmd = app.add_subcommand(
      "demo", "Print a built-in problem file (sqrt2, orthant, minimax)");
  demo_cmd->add_option("NAME", demo_name, "demo name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitSchema;
  }

  try {
    if (app.got_subcommand(certify_cmd)) {
      if (certify_file.empty() && certify_demo.empty()) {
        std::cerr << "certify: pass a FILE or --demo NAME\n";
        return kExitSchema;
      }
      return cmd_certify(certify_file, certify_demo);
    }
    if (app.got_subcommand(solve_cmd)) {
      if (solve_file.empty() && solve_demo.empty()) {
        std::cerr << "solve: pass a FILE or --demo NAME\n";
        return kExitSchema;
      }
      return cmd_solve(solve_file, solve_demo, solve_max_iter, solve_trace,
                       solve_verify);
    }
    if (app.got_subcommand(scalar_cmd))
      return cmd_scalar(scalar_K, scalar_gamma, scalar_custom, scalar_R,
                        scalar_xi, scalar_alpha, scalar_tol, scalar_max_iter);
    if (app.got_subcommand(demo_cmd)) return cmd_demo(demo_name);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "computation error: " << e.what() << "\n";
    return kExitCompute;
  }
  return kExitSchema;
}
