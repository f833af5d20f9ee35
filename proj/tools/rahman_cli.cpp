// Command-line front end: build kernels, solve the degree-one spectrum, dump
// polynomial tables, run the full verification and evolve distributions.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include "rahman/io.hpp"
#include "rahman/kernels.hpp"
#include "rahman/polynomials.hpp"
#include "rahman/spectra.hpp"
#include "rahman/verifier.hpp"

namespace {

using namespace rahman;

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

template <class Writer>
void write_to(const std::string& path, Writer&& writer) {
  if (path.empty() || path == "-") {
    writer(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw DomainError("cannot open output file " + path);
  writer(out);
}

void print_error(const std::string& type, const std::string& message) {
  std::cerr << nlohmann::json{{"error", {{"type", type}, {"message", message}}}}.dump() << '\n';
}

int run_kernel(const std::string& params_path, const std::string& out_path) {
  const ChainParameters params = io::read_parameters(params_path).validated();
  const KernelMatrix K = build_kernel(params);
  const WeightVector pi = reversible_weights(params);
  const double conservation = conservation_residual(K);
  const double reversibility = check_reversibility(K, pi);
  if (!out_path.empty()) write_to(out_path, [&](std::ostream& os) { io::write_kernel_csv(os, K); });
  std::cout << std::scientific << std::setprecision(3) << "states:        " << K.size() << '\n'
            << "conservation:  " << conservation << '\n'
            << "reversibility: " << reversibility << '\n'
            << "min entry:     " << K.min_entry() << '\n';
  return conservation <= 1e-12 && reversibility <= 1e-12 ? 0 : kExitFail;
}

int run_spectrum(const std::string& params_path, const std::string& out_path) {
  const ChainParameters params = io::read_parameters(params_path).validated();
  const SpectralData s = solve_spectrum(params);
  const nlohmann::json report = io::spectrum_report(params, s);
  write_to(out_path, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  const auto& r = report.at("residuals");
  const bool ok = r.at("sum_rule").get<double>() <= 1e-10 && r.at("beta_u_sum_rule").get<double>() <= 1e-11 &&
                  r.at("eigenvalue_product").get<double>() <= 1e-11 && r.at("eigenvalue_sum").get<double>() <= 1e-11;
  return ok ? 0 : kExitFail;
}

int run_poly(const std::string& params_path, const std::string& method_name, const std::string& out_path) {
  const ChainParameters params = io::read_parameters(params_path).validated();
  const EvaluationMethod method = parse_evaluation_method(method_name);
  const SpectralData s = solve_spectrum(params);
  const PolynomialTable table = polynomial_table(s.u, params.level, method);
  write_to(out_path, [&](std::ostream& os) { io::write_polynomial_csv(os, table); });
  const nlohmann::json sidecar = io::polynomial_sidecar(s, method);
  if (!out_path.empty() && out_path != "-") {
    std::ofstream side(out_path + ".json");
    side << sidecar.dump(2) << '\n';
  } else {
    std::cerr << sidecar.dump() << '\n';
  }
  return 0;
}

int run_verify(const std::string& params_path, double tol_scale, std::uint64_t seed, const std::string& out_path) {
  const RawParameters raw = io::read_parameters(params_path);
  Tolerances tol;
  tol.scale = tol_scale;
  const VerificationReport report = run_all(raw, seed, tol);

  std::cout << std::left << std::setw(28) << "check" << std::setw(12) << "residual" << std::setw(12) << "tolerance"
            << "result\n";
  for (const auto& c : report.checks) {
    std::cout << std::left << std::setw(28) << c.name << std::scientific << std::setprecision(2) << std::setw(12)
              << c.residual << std::setw(12) << c.tolerance << (c.passed ? "PASS" : "FAIL") << '\n';
  }
  if (report.error) std::cout << "error: " << report.error->type << ": " << report.error->message << '\n';
  std::cout << "overall: " << (report.passed() ? "PASS" : "FAIL") << '\n';
  if (!out_path.empty())
    write_to(out_path, [&](std::ostream& os) { os << to_json(report).dump(2) << '\n'; });
  return report.passed() ? 0 : kExitFail;
}

int run_evolve(const std::string& params_path, int steps, const std::string& start, const std::string& out_path) {
  const ChainParameters params = io::read_parameters(params_path).validated();
  const KernelMatrix K = build_kernel(params);
  const WeightVector pi = reversible_weights(params);
  WeightVector p0 = start == "uniform" ? uniform_distribution(K.lattice) : point_mass(K.lattice, 0);
  write_to(out_path, [&](std::ostream& os) { io::write_evolution_csv(os, K, p0, pi, steps); });
  const WeightVector last = evolve_distribution(K, p0, steps);
  return std::abs(last.values.sum() - 1.0) <= 1e-12 ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rahman polynomials as left eigenvectors of multivariate Markov chains"};
  app.require_subcommand(1);

  std::string params_path;
  std::string out_path;

  auto* kernel = app.add_subcommand("kernel", "build the transition matrix, report conservation and reversibility");
  kernel->add_option("--params", params_path, "parameter JSON file")->required();
  kernel->add_option("--out", out_path, "kernel CSV output");

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues lambda, u and b matrices with residuals");
  spectrum->add_option("--params", params_path, "parameter JSON file")->required();
  spectrum->add_option("--out", out_path, "spectrum JSON output (default stdout)");

  std::string method = "direct";
  auto* poly = app.add_subcommand("poly", "polynomial table P_m(x)");
  poly->add_option("--params", params_path, "parameter JSON file")->required();
  poly->add_option("--method", method, "direct or genfun")->check(CLI::IsMember({"direct", "genfun"}));
  poly->add_option("--out", out_path, "table CSV output (sidecar written to OUT.json)");

  double tol_scale = 1.0;
  std::uint64_t seed = 20240601;
  auto* verify = app.add_subcommand("verify", "run every identity check");
  verify->add_option("--params", params_path, "parameter JSON file")->required();
  verify->add_option("--tol-scale", tol_scale, "multiply all tolerances")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "seed for the random t vectors");
  verify->add_option("--out", out_path, "report JSON output");

  int steps = 0;
  std::string start = "point";
  auto* evolve = app.add_subcommand("evolve", "evolve a distribution and trace its distance to stationarity");
  evolve->add_option("--params", params_path, "parameter JSON file")->required();
  evolve->add_option("--steps", steps, "number of steps")->required()->check(CLI::NonNegativeNumber);
  evolve->add_option("--start", start, "point (mass at 0) or uniform")->check(CLI::IsMember({"point", "uniform"}));
  evolve->add_option("--out", out_path, "trace CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (kernel->parsed()) return run_kernel(params_path, out_path);
    if (spectrum->parsed()) return run_spectrum(params_path, out_path);
    if (poly->parsed()) return run_poly(params_path, method, out_path);
    if (verify->parsed()) return run_verify(params_path, tol_scale, seed, out_path);
    if (evolve->parsed()) return run_evolve(params_path, steps, start, out_path);
  } catch (const DegenerateParameters& e) {
    print_error("DegenerateParameters", e.what());
  } catch (const SingularU& e) {
    print_error("SingularU", e.what());
  } catch (const NonGenericSpectrum& e) {
    print_error("NonGenericSpectrum", e.what());
  } catch (const DomainError& e) {
    print_error("DomainError", e.what());
  } catch (const nlohmann::json::exception& e) {
    print_error("InvalidJson", e.what());
  } catch (const std::exception& e) {
    print_error("Error", e.what());
  }
  return kExitError;
}
