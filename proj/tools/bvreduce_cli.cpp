#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bvreduce/errors.hpp"
#include "bvreduce/hbar.hpp"
#include "bvreduce/oracle.hpp"
#include "bvreduce/problem_io.hpp"
#include "bvreduce/reduce.hpp"
#include "bvreduce/verify.hpp"

using namespace bvreduce;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kNotGeneric = 2, kInvalid = 3, kVerifyFailed = 4 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
}

int cmd_reduce(const std::string& input, const std::string& output) {
  ProblemFile p = parse_problem(read_file(input));
  auto start = std::chrono::steady_clock::now();
  ReductionSession session(Action::build(p.action));
  JacClass c = session.reduce(p.observable);
  ResultDiagnostics diag;
  diag.weights_solved = session.solved_weights();
  diag.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_output(output, result_to_json(c, diag));
  return kOk;
}

int cmd_wick(const std::string& input, const std::string& output) {
  ProblemFile p = parse_problem(read_file(input));
  Scalar v = wick(Action::build(p.action), p.observable);
  write_output(output, json{{"value", scalar_to_json(v)}}.dump(2) + "\n");
  return kOk;
}

int cmd_hbar(const std::string& input, int K, const std::string& output) {
  ProblemFile p = parse_problem(read_file(input));
  if (!p.hbar) throw InvalidInput("problem has no hbar block");
  if (K < 0) K = p.hbar->K;
  write_output(output, series_to_json(hbar_reduce(p.observable, p.hbar->model, K)));
  return kOk;
}

int cmd_basis(int n, int d) {
  json out = json::array();
  for (const auto& m : jac_basis(n, d).monomials) out.push_back(m);
  std::cout << out.dump() << "\n";
  return kOk;
}

int cmd_verify(const VerifyConfig& cfg) {
  VerifyReport r = run_verify(cfg);
  std::cout << "seed " << r.seed << ": " << r.trials << " trials, " << r.checks << " checks run, " << r.non_generic
            << " non-generic actions skipped\n";
  if (r.ok()) {
    std::cout << "all invariants hold\n";
    return kOk;
  }
  for (const auto& f : r.failures) {
    std::cout << "FAIL trial " << f.trial << ": " << f.invariant << " (" << f.detail << ")\n"
              << "  action: " << f.action << "\n"
              << "  input:  " << f.input << "\n";
  }
  return kVerifyFailed;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

int cmd_oracle(const std::string& input, const std::string& contour_path, double tol, const std::string& output) {
  ProblemFile p = parse_problem(read_file(input));
  Action a = Action::build(p.action);
  std::vector<ContourSpec> contours;
  std::string path = contour_path.empty() ? p.contour_path.value_or("") : contour_path;
  if (!path.empty())
    contours.push_back(parse_contour_json(read_file(path)));
  else
    contours = default_contours_for(p.action);
  VerificationReport r = verify_reduction(a, p.observable, contours, tol);
  json checks = json::array();
  for (const auto& c : r.contours)
    checks.push_back({{"integral", complex_json(c.integral_f.value)},
                      {"predicted", complex_json(c.predicted)},
                      {"residual", c.residual},
                      {"scale", c.scale},
                      {"pass", c.pass}});
  json coeffs = json::array();
  for (const auto& m : r.tau.basis.monomials) coeffs.push_back(scalar_to_json(r.tau.coefficient(m)));
  write_output(output, json{{"tol", tol}, {"coefficients", coeffs}, {"contours", checks}, {"pass", r.pass}}.dump(2) + "\n");
  return r.pass ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact BV reduction of polynomial integrands"};
  app.require_subcommand(1);

  std::string input, output, contour;
  int K = -1, n = 1, d = 3;
  double tol = 1e-6;
  VerifyConfig vcfg;
  bool flip = false;

  auto* reduce = app.add_subcommand("reduce", "Class of the observable in degree-0 quantum BV homology");
  reduce->add_option("input", input, "Problem file")->required();
  reduce->add_option("-o,--output", output, "Result file (default stdout)");

  auto* wick_cmd = app.add_subcommand("wick", "Gaussian expectation for a quadratic action");
  wick_cmd->add_option("input", input, "Problem file")->required();
  wick_cmd->add_option("-o,--output", output, "Result file (default stdout)");

  auto* hbar = app.add_subcommand("hbar", "Truncated hbar expansion of the normalised expectation");
  hbar->add_option("input", input, "Problem file with an hbar block")->required();
  hbar->add_option("-K,--order", K, "Truncation order (default: K from the file)");
  hbar->add_option("-o,--output", output, "Result file (default stdout)");

  auto* verify = app.add_subcommand("verify", "Randomised invariant suite");
  verify->add_option("--n", vcfg.n, "Number of variables");
  verify->add_option("--d", vcfg.d, "Degree of the action");
  verify->add_option("--maxdeg", vcfg.maxdeg, "Maximal degree of random observables");
  verify->add_option("--trials", vcfg.trials, "Number of random trials");
  verify->add_option("--seed", vcfg.seed, "Random seed");
  verify->add_option("--threads", vcfg.threads, "Worker threads (default: all cores)");
  verify->add_flag("--flip-homotopy-sign", flip, "Fault injection: negate the diagonal homotopy");

  auto* oracle = app.add_subcommand("oracle", "Check the reduction against contour integrals (n = 1)");
  oracle->add_option("input", input, "Problem file")->required();
  oracle->add_option("--contour", contour, "Contour file (default: one contour per pair of adjacent decay sectors)");
  oracle->add_option("--tol", tol, "Relative residual tolerance");
  oracle->add_option("-o,--output", output, "Report file (default stdout)");

  auto* basis = app.add_subcommand("basis", "Monomial basis of the Jacobian ring");
  basis->add_option("--n", n, "Number of variables")->required();
  basis->add_option("--d", d, "Degree of the action")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (*reduce) return cmd_reduce(input, output);
    if (*wick_cmd) return cmd_wick(input, output);
    if (*hbar) return cmd_hbar(input, K, output);
    if (*verify) {
      vcfg.homotopy_sign = flip ? -1 : 1;
      return cmd_verify(vcfg);
    }
    if (*oracle) return cmd_oracle(input, contour, tol, output);
    if (*basis) return cmd_basis(n, d);
  } catch (const NotGenericAtWeight& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNotGeneric;
  } catch (const NonDiagonalizableAction& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNotGeneric;
  } catch (const NotAllowable& e) {
    std::cerr << "error: contour not allowable: " << e.what() << "\n";
    return kNotGeneric;
  } catch (const SingularMatrix& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNotGeneric;
  } catch (const ToleranceNotReached& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerifyFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
