/**
 * @file verifier.hpp
 * @brief End-to-end checks of every chain/polynomial identity, aggregated into
 *        a VerificationReport.
 *
 * A check is a named residual with a tolerance; the report passes iff every
 * residual is within its tolerance. Parameter problems (degenerate alpha,
 * singular u, complex spectrum) abort the run and are reported as a
 * structured error instead of residuals.
 */
#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rahman/combinatorics.hpp"
#include "rahman/distributions.hpp"
#include "rahman/errors.hpp"
#include "rahman/kernels.hpp"
#include "rahman/polynomials.hpp"
#include "rahman/spectra.hpp"

namespace rahman {

/// Unvalidated parameter record, as read from a file.
struct RawParameters {
  std::string kind = "type1";
  int level = 1;
  std::vector<double> alpha;
  std::vector<double> beta;

  ChainParameters validated() const {
    if (alpha.size() != beta.size()) throw DomainError("alpha and beta must have the same length");
    return ChainParameters(parse_chain_kind(kind), level, ProbabilityVector(alpha), ProbabilityVector(beta));
  }

  static RawParameters from(const ChainParameters& p) {
    return RawParameters{to_string(p.kind), p.level, p.alpha.entries(), p.beta.entries()};
  }
};

/// Default tolerances; every entry is multiplied by `scale`.
struct Tolerances {
  double scale = 1.0;
  double construction = 1e-12;  // conservation, reversibility, stationarity, factor identities
  double moments = 1e-11;       // first-moment formulas, sum of beta_i u_ij, trace/determinant
  double spectral = 1e-10;      // sum rules, duality, dual-path, master identity, right eigen
  double left_eigen = 1e-9;
  double gram = 1e-9;
  double full_spectrum = 1e-9;
  double closed_form = 1e-12;

  double operator()(double base) const { return base * scale; }
};

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  double seconds = 0.0;
};

struct VerificationError {
  std::string type;
  std::string message;
};

struct VerificationReport {
  RawParameters parameters;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  std::optional<VerificationError> error;

  bool passed() const {
    if (error) return false;
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }

  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

inline nlohmann::json to_json(const RawParameters& p) {
  return {{"kind", p.kind}, {"n", p.alpha.size()}, {"N", p.level}, {"alpha", p.alpha}, {"beta", p.beta}};
}

inline nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"residual", c.residual},
                      {"tolerance", c.tolerance},
                      {"pass", c.passed},
                      {"seconds", c.seconds}});
  nlohmann::json out = {{"parameters", to_json(r.parameters)},
                        {"seed", r.seed},
                        {"checks", checks},
                        {"pass", r.passed()}};
  if (r.error) out["error"] = {{"type", r.error->type}, {"message", r.error->message}};
  return out;
}

/// Everything the checks need, built once.
struct Pipeline {
  ChainParameters params;
  KernelMatrix kernel;
  WeightVector weights;
  SpectralData spectrum;
  PolynomialTable table;

  explicit Pipeline(const ChainParameters& p)
      : params(p),
        kernel(build_kernel(p)),
        weights(reversible_weights(p)),
        spectrum(solve_spectrum(p)),
        table(polynomial_table(spectrum.u, p.level, EvaluationMethod::Direct)) {}
};

/**
 * Random admissible parameters: alpha i.i.d. uniform on (0.1, 0.9), nudged
 * apart to a pairwise gap of at least 0.05; beta uniform then rescaled so that
 * |beta| is uniform on (0.1, 0.9).
 */
inline ChainParameters random_parameters(ChainKind kind, std::size_t n, int level, std::mt19937_64& rng) {
  constexpr double lo = 0.1;
  constexpr double hi = 0.9;
  constexpr double gap = 0.05;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> alpha(n);
  for (auto& a : alpha) a = lo + (hi - lo) * unit(rng);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return alpha[l] < alpha[r]; });
  for (std::size_t k = 1; k < n; ++k)
    alpha[order[k]] = std::max(alpha[order[k]], alpha[order[k - 1]] + gap);
  if (n > 0 && alpha[order[n - 1]] > hi) {
    alpha[order[n - 1]] = hi;
    for (std::size_t k = n - 1; k-- > 0;) alpha[order[k]] = std::min(alpha[order[k]], alpha[order[k + 1]] - gap);
  }

  std::vector<double> beta(n);
  double total = 0.0;
  for (auto& b : beta) total += (b = 0.05 + unit(rng));
  const double target = lo + (hi - lo) * unit(rng);
  for (auto& b : beta) b *= target / total;

  return ChainParameters(kind, level, ProbabilityVector(alpha), ProbabilityVector(beta));
}

/// Random t with |t_j| < 1/n, so the 1-norm of t stays below one.
inline Eigen::VectorXd random_t(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0 / static_cast<double>(n), 1.0 / static_cast<double>(n));
  Eigen::VectorXd t(static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < t.size(); ++j) t(j) = dist(rng);
  return t;
}

/**
 * Max over m of max_y |sum_x P_m(x) K(x,y) - E(m) P_m(y)| / max_x |P_m(x)|.
 *
 * Normwise: P_m has zeros and the sum over x cancels, so a ratio against the
 * single entry E(m) P_m(y) measures the conditioning of that entry rather
 * than the accuracy of P_m. K is column stochastic, so this is the usual
 * backward error of the eigenpair.
 */
inline double left_eigen_residual(const Pipeline& p) {
  const Lattice& lat = p.kernel.lattice;
  const Eigen::MatrixXd left = p.table.values * p.kernel.entries;  // (m, y)
  double worst = 0.0;
  for (std::size_t m = 0; m < lat.size(); ++m) {
    const auto row = static_cast<Eigen::Index>(m);
    const double e = spectrum_value(lat[m], p.spectrum.lambda);
    const double scale = p.table.values.row(row).cwiseAbs().maxCoeff();
    worst = std::max(worst, (left.row(row) - e * p.table.values.row(row)).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

/// Entrywise variant of left_eigen_residual, relative_gap per (m, y). Diagnostic only.
inline double left_eigen_entrywise_residual(const Pipeline& p) {
  const Lattice& lat = p.kernel.lattice;
  const Eigen::MatrixXd left = p.table.values * p.kernel.entries;
  double worst = 0.0;
  for (std::size_t m = 0; m < lat.size(); ++m) {
    const double e = spectrum_value(lat[m], p.spectrum.lambda);
    for (std::size_t y = 0; y < lat.size(); ++y)
      worst = std::max(worst, relative_gap(left(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(y)),
                                           e * p.table(m, y)));
  }
  return worst;
}

/// Max over m, x of |sum_y K(x,y) P_m(y) pi(y) - E(m) P_m(x) pi(x)|.
inline double weighted_right_eigen_residual(const Pipeline& p) {
  const Lattice& lat = p.kernel.lattice;
  double worst = 0.0;
  for (std::size_t m = 0; m < lat.size(); ++m) {
    const Eigen::VectorXd v = p.table.values.row(static_cast<Eigen::Index>(m)).transpose().cwiseProduct(p.weights.values);
    const Eigen::VectorXd image = p.kernel.entries * v;
    const double e = spectrum_value(lat[m], p.spectrum.lambda);
    worst = std::max(worst, (image - e * v).cwiseAbs().maxCoeff());
  }
  return worst;
}

struct FullSpectrumComparison {
  Eigen::VectorXd observed;  // eigenvalues of the symmetrized kernel, descending
  Eigen::VectorXd expected;  // prod lambda_i^m_i over the lattice, descending
  double worst_gap = 0.0;
  double second_largest = 0.0;
};

inline FullSpectrumComparison compare_full_spectrum(const Pipeline& p) {
  const Eigen::MatrixXd T = symmetrize(p.kernel, p.weights);
  const Eigen::MatrixXd sym = 0.5 * (T + T.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  FullSpectrumComparison out;
  out.observed = solver.eigenvalues().reverse();
  const Lattice& lat = p.kernel.lattice;
  std::vector<double> expected;
  for (const auto& m : lat) expected.push_back(spectrum_value(m, p.spectrum.lambda));
  std::sort(expected.begin(), expected.end(), std::greater<>());
  out.expected = Eigen::Map<Eigen::VectorXd>(expected.data(), static_cast<Eigen::Index>(expected.size()));
  out.worst_gap = (out.observed - out.expected).cwiseAbs().maxCoeff();
  out.second_largest = out.observed.size() > 1 ? out.observed(1) : -1.0;
  return out;
}

namespace detail {

class ReportBuilder {
 public:
  explicit ReportBuilder(VerificationReport& report) : report_(report) {}

  void check(const std::string& name, double tolerance, const std::function<double()>& residual) {
    const auto start = std::chrono::steady_clock::now();
    const double r = residual();
    const auto stop = std::chrono::steady_clock::now();
    report_.checks.push_back(CheckResult{name, r, tolerance, std::isfinite(r) && r <= tolerance,
                                         std::chrono::duration<double>(stop - start).count()});
  }

 private:
  VerificationReport& report_;
};

}  // namespace detail

inline void verify_left_eigen(const Pipeline& p, VerificationReport& report, const Tolerances& tol = {}) {
  detail::ReportBuilder(report).check("left_eigen", tol(tol.left_eigen), [&] { return left_eigen_residual(p); });
}

inline void verify_weighted_right_eigen(const Pipeline& p, VerificationReport& report, const Tolerances& tol = {}) {
  detail::ReportBuilder(report).check("weighted_right_eigen", tol(tol.spectral),
                                      [&] { return weighted_right_eigen_residual(p); });
}

inline void verify_full_spectrum(const Pipeline& p, VerificationReport& report, const Tolerances& tol = {}) {
  detail::ReportBuilder b(report);
  FullSpectrumComparison cmp;
  b.check("full_spectrum", tol(tol.full_spectrum), [&] {
    cmp = compare_full_spectrum(p);
    return cmp.worst_gap;
  });
  // Residual is |top - 1|, or 1 when a second eigenvalue reaches 1 within tolerance.
  b.check("unit_eigenvalue_simple", tol(tol.full_spectrum), [&] {
    const double top = cmp.observed(0);
    if (cmp.second_largest >= 1.0 - tol(tol.full_spectrum)) return 1.0;
    return std::abs(top - 1.0);
  });
}

/// Closed forms for n = 1: lambda, u and eta.
inline double one_variable_closed_form_residual(const Pipeline& p) {
  const double a = p.params.alpha[0];
  const double b = p.params.beta[0];
  const bool t1 = p.params.kind == ChainKind::Type1;
  const double lambda = t1 ? a * (1.0 - b) : a - b;
  const double u = t1 ? (1.0 - a + a * b) / b : (1.0 - a + b) / b;
  const double eta = t1 ? b / (1.0 - a + a * b) : b / (1.0 - a + b);
  const double computed_eta = reversible_eta(p.params)[0];
  return std::max({std::abs(p.spectrum.lambda(0) - lambda), relative_gap(p.spectrum.u(0, 0), u),
                   std::abs(computed_eta - eta), relative_gap(p.spectrum.u(0, 0), 1.0 / computed_eta)});
}

inline VerificationReport run_all(const RawParameters& raw, std::uint64_t seed = 0, const Tolerances& tol = {},
                                  int random_t_count = 20) {
  VerificationReport report;
  report.parameters = raw;
  report.seed = seed;
  try {
    const ChainParameters params = raw.validated();
    const Pipeline p(params);
    detail::ReportBuilder b(report);
    const std::size_t n = params.dimension();
    const int N = params.level;

    b.check("conservation", tol(tol.construction), [&] { return conservation_residual(p.kernel); });
    b.check("reversibility", tol(tol.construction), [&] { return check_reversibility(p.kernel, p.weights); });
    b.check("stationarity", tol(tol.construction), [&] {
      return max_abs_distance(evolve_distribution(p.kernel, p.weights, 1), p.weights);
    });
    b.check("degree_one_sum_formulas", tol(tol.moments),
            [&] { return verify_degree_one_sum_formulas(params, p.kernel); });
    b.check("sum_rule", tol(tol.spectral), [&] { return sum_rule_residual(params, p.spectrum); });
    b.check("beta_u_sum_rule", tol(tol.moments), [&] { return beta_u_residual(params, p.spectrum); });
    b.check("eigenvalue_product", tol(tol.moments), [&] { return spectral_identities(params, p.spectrum).product; });
    b.check("eigenvalue_sum", tol(tol.moments), [&] { return spectral_identities(params, p.spectrum).sum; });
    if (n == 1)
      b.check("one_variable_closed_forms", tol(tol.closed_form), [&] { return one_variable_closed_form_residual(p); });
    b.check("degree_one_orthogonality", tol(tol.spectral),
            [&] { return degree_one_orthogonality(p.spectrum, p.weights); });
    b.check("gram_orthogonality", tol(tol.gram),
            [&] { return normalized_offdiagonal(gram_matrix(p.table, p.weights)); });
    b.check("duality", tol(tol.spectral), [&] { return duality_check(p.spectrum.u, N); });
    b.check("genfun_vs_direct", tol(tol.spectral), [&] {
      const PolynomialTable gf = polynomial_table(p.spectrum.u, N, EvaluationMethod::GeneratingFunction);
      double worst = 0.0;
      for (Eigen::Index i = 0; i < gf.values.rows(); ++i)
        for (Eigen::Index j = 0; j < gf.values.cols(); ++j)
          worst = std::max(worst, relative_gap(gf.values(i, j), p.table.values(i, j)));
      return worst;
    });

    std::mt19937_64 rng(seed);
    std::vector<Eigen::VectorXd> ts;
    for (int k = 0; k < random_t_count; ++k) ts.push_back(random_t(n, rng));
    b.check("genfun_master_identity", tol(tol.spectral), [&] {
      double worst = 0.0;
      for (const auto& t : ts) worst = std::max(worst, generating_function_identity_residual(p.kernel, p.spectrum, t));
      return worst;
    });
    b.check("batch_factor_identity", tol(tol.construction), [&] {
      double worst = 0.0;
      for (const auto& t : ts) worst = std::max(worst, batch_factor_residual(params, p.spectrum, t));
      return worst;
    });
    b.check("thinning_factor_identity", tol(tol.construction), [&] {
      double worst = 0.0;
      for (const auto& t : ts) worst = std::max(worst, thinning_factor_residual(params, p.spectrum, t));
      return worst;
    });

    verify_left_eigen(p, report, tol);
    verify_weighted_right_eigen(p, report, tol);
    verify_full_spectrum(p, report, tol);
  } catch (const DegenerateParameters& e) {
    report.error = VerificationError{"DegenerateParameters", e.what()};
  } catch (const SingularU& e) {
    report.error = VerificationError{"SingularU", e.what()};
  } catch (const NonGenericSpectrum& e) {
    report.error = VerificationError{"NonGenericSpectrum", e.what()};
  } catch (const DomainError& e) {
    report.error = VerificationError{"DomainError", e.what()};
  }
  return report;
}

inline VerificationReport run_all(const ChainParameters& params, std::uint64_t seed = 0, const Tolerances& tol = {}) {
  return run_all(RawParameters::from(params), seed, tol);
}

}  // namespace rahman
