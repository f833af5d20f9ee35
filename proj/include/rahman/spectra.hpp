/**
 * @file spectra.hpp
 * @brief Degree-one eigenproblem: characteristic matrix, its eigenvalues
 *        lambda_j and the Rahman parameter matrix u derived from them.
 *
 * Plugging P(x) = 1 + (1/N) sum_i a_i x_i into the left eigenvalue equation
 * and using the first-moment formulas of the kernels reduces the problem to
 * the n x n matrix
 *
 *   Type1:  F_ij = -alpha_i beta_j + alpha_i delta_ij
 *   Type2:  F_ij = -beta_j         + alpha_i delta_ij
 *
 * Each eigenvalue lambda_j of F gives one degree-one left eigenpolynomial with
 * a_ij = -u_ij, where
 *
 *   Type1:  u_ij = alpha_i (lambda_j - 1) / (lambda_j - alpha_i)
 *   Type2:  u_ij =         (lambda_j - 1) / (lambda_j - alpha_i)
 */
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "rahman/combinatorics.hpp"
#include "rahman/distributions.hpp"
#include "rahman/errors.hpp"
#include "rahman/kernels.hpp"

namespace rahman {

inline constexpr double kImaginaryTolerance = 1e-10;
inline constexpr double kSingularUTolerance = 1e-8;
inline constexpr double kEigenvalueSeparation = 1e-8;

struct SpectralData {
  ChainKind kind = ChainKind::Type1;
  Eigen::VectorXd lambda;  // sorted descending unless permuted
  Eigen::MatrixXd u;
  Eigen::MatrixXd b;  // 1 - u
  Eigen::MatrixXd a;  // -u; column j holds the coefficients of P_{e_j}

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(lambda.size()); }
};

inline Eigen::MatrixXd characteristic_matrix(const ChainParameters& params) {
  const auto n = static_cast<Eigen::Index>(params.dimension());
  Eigen::MatrixXd F(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double off = params.kind == ChainKind::Type1 ? -params.alpha[i] * params.beta[j] : -params.beta[j];
      F(i, j) = off + (i == j ? params.alpha[i] : 0.0);
    }
  }
  return F;
}

namespace detail {

// Residue weights w_i of the secular equation 1 + sum_i w_i / (lambda - alpha_i) = 0,
// which is det(lambda - F) / prod(lambda - alpha_i).
inline std::vector<double> secular_weights(const ChainParameters& params) {
  std::vector<double> w(params.dimension());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = params.kind == ChainKind::Type1 ? params.alpha[i] * params.beta[i] : params.beta[i];
  return w;
}

inline double secular(const std::vector<double>& w, const ProbabilityVector& alpha, double lambda) {
  double s = 1.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] / (lambda - alpha[i]);
  return s;
}

// A couple of Newton steps on the secular function; a step is kept only if it
// reduces the residual.
inline double polish_root(const std::vector<double>& w, const ProbabilityVector& alpha, double lambda) {
  for (int it = 0; it < 3; ++it) {
    const double f = secular(w, alpha, lambda);
    double df = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) df -= w[i] / ((lambda - alpha[i]) * (lambda - alpha[i]));
    if (df == 0.0 || !std::isfinite(df)) break;
    const double next = lambda - f / df;
    if (!(std::abs(secular(w, alpha, next)) < std::abs(f))) break;
    lambda = next;
  }
  return lambda;
}

inline std::size_t closest_alpha(const ProbabilityVector& alpha, double lambda) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < alpha.size(); ++i)
    if (std::abs(alpha[i] - lambda) < std::abs(alpha[best] - lambda)) best = i;
  return best;
}

}  // namespace detail

/// u, b and a for a given ordered set of eigenvalues.
inline SpectralData spectral_data_from_eigenvalues(const ChainParameters& params, const Eigen::VectorXd& lambda) {
  const auto n = static_cast<Eigen::Index>(params.dimension());
  if (lambda.size() != n) throw DomainError("eigenvalue count does not match the dimension");
  SpectralData s;
  s.kind = params.kind;
  s.lambda = lambda;
  s.u.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double gap = lambda(j) - params.alpha[i];
      if (std::abs(gap) < kSingularUTolerance)
        throw SingularU(static_cast<std::size_t>(i), static_cast<std::size_t>(j), std::abs(gap));
      const double numer = params.kind == ChainKind::Type1 ? params.alpha[i] * (lambda(j) - 1.0) : lambda(j) - 1.0;
      s.u(i, j) = numer / gap;
    }
  }
  s.b = Eigen::MatrixXd::Ones(n, n) - s.u;
  s.a = -s.u;
  return s;
}

/**
 * Solves the characteristic eigenproblem and fills u, b and a.
 *
 * Eigenvalues come from a dense nonsymmetric solver, are checked to be real
 * (imaginary parts up to 1e-10 are dropped), refined on the secular equation
 * and sorted in descending order; ties go to the eigenvalue whose closest
 * alpha has the smaller index.
 */
inline SpectralData solve_spectrum(const ChainParameters& params) {
  params.validate();
  const Eigen::MatrixXd F = characteristic_matrix(params);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(F, false);
  if (solver.info() != Eigen::Success) throw NonGenericSpectrum("eigensolver did not converge");
  const Eigen::VectorXcd ev = solver.eigenvalues();
  const auto weights = detail::secular_weights(params);

  std::vector<double> roots;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (std::abs(ev(k).imag()) > kImaginaryTolerance)
      throw NonGenericSpectrum("complex eigenvalue " + std::to_string(ev(k).real()) + " + " +
                               std::to_string(ev(k).imag()) + "i");
    roots.push_back(detail::polish_root(weights, params.alpha, ev(k).real()));
  }
  std::sort(roots.begin(), roots.end(), [&](double l, double r) {
    if (l != r) return l > r;
    return detail::closest_alpha(params.alpha, l) < detail::closest_alpha(params.alpha, r);
  });
  for (std::size_t k = 0; k < roots.size(); ++k) {
    if (!(std::abs(roots[k]) < 1.0))
      throw NonGenericSpectrum("eigenvalue " + std::to_string(roots[k]) + " outside (-1, 1)");
    if (k > 0 && roots[k - 1] - roots[k] < kEigenvalueSeparation)
      throw NonGenericSpectrum("repeated eigenvalue " + std::to_string(roots[k]));
  }
  return spectral_data_from_eigenvalues(params, Eigen::Map<const Eigen::VectorXd>(roots.data(), static_cast<Eigen::Index>(roots.size())));
}

/// Reorders eigenvalues as lambda'_k = lambda_{perm[k]} (and the columns of u, b, a with them).
inline SpectralData permute_spectrum(const SpectralData& s, std::span<const std::size_t> perm) {
  const auto n = static_cast<Eigen::Index>(s.dimension());
  if (static_cast<Eigen::Index>(perm.size()) != n) throw DomainError("permutation size mismatch");
  SpectralData out = s;
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto src = static_cast<Eigen::Index>(perm[static_cast<std::size_t>(k)]);
    out.lambda(k) = s.lambda(src);
    out.u.col(k) = s.u.col(src);
    out.b.col(k) = s.b.col(src);
    out.a.col(k) = s.a.col(src);
  }
  return out;
}

struct SpectralIdentityResiduals {
  double product = 0.0;  // |prod lambda - closed form|
  double sum = 0.0;      // |sum lambda - closed form|
  double product_expected = 0.0;
  double sum_expected = 0.0;
};

/// Checks the eigenvalue product and sum against their rational closed forms
/// (determinant and trace of F).
inline SpectralIdentityResiduals spectral_identities(const ChainParameters& params, const SpectralData& s) {
  const std::size_t n = params.dimension();
  double prod_alpha = 1.0;
  double sum_expected = 0.0;
  for (std::size_t i = 0; i < n; ++i) prod_alpha *= params.alpha[i];
  double prod_expected = 0.0;
  if (params.kind == ChainKind::Type1) {
    prod_expected = prod_alpha * (1.0 - params.beta.total());
    for (std::size_t i = 0; i < n; ++i) sum_expected += params.alpha[i] * (1.0 - params.beta[i]);
  } else {
    // prod alpha minus, for each j, the product with alpha_j replaced by beta_j.
    prod_expected = prod_alpha;
    for (std::size_t j = 0; j < n; ++j) {
      double term = params.beta[j];
      for (std::size_t i = 0; i < n; ++i)
        if (i != j) term *= params.alpha[i];
      prod_expected -= term;
    }
    for (std::size_t i = 0; i < n; ++i) sum_expected += params.alpha[i] - params.beta[i];
  }
  SpectralIdentityResiduals r;
  r.product_expected = prod_expected;
  r.sum_expected = sum_expected;
  r.product = std::abs(s.lambda.prod() - prod_expected);
  r.sum = std::abs(s.lambda.sum() - sum_expected);
  return r;
}

/// max_j |1 + sum_i w_i / (lambda_j - alpha_i)| with the kind-specific weights.
inline double sum_rule_residual(const ChainParameters& params, const SpectralData& s) {
  const auto w = detail::secular_weights(params);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < s.lambda.size(); ++j)
    worst = std::max(worst, std::abs(detail::secular(w, params.alpha, s.lambda(j))));
  return worst;
}

/// max_j |sum_i beta_i u_ij - (1 - lambda_j)|.
inline double beta_u_residual(const ChainParameters& params, const SpectralData& s) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < s.lambda.size(); ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.u.rows(); ++i) acc += params.beta[static_cast<std::size_t>(i)] * s.u(i, j);
    worst = std::max(worst, std::abs(acc - (1.0 - s.lambda(j))));
  }
  return worst;
}

/// P_{e_j}(x) = 1 - (1/N) sum_i u_ij x_i, with j 0-based.
inline double degree_one_polynomial(const SpectralData& s, std::size_t j, const MultiIndex& x, int level) {
  if (j >= s.dimension()) throw DomainError("direction out of range");
  if (x.size() != s.dimension()) throw DomainError("degree_one_polynomial: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    acc += s.u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[i];
  return 1.0 - acc / level;
}

/// First moment sum_x x_i K(x,y) predicted by the kernel's affine formula.
inline double predicted_first_moment(const ChainParameters& params, const MultiIndex& y, std::size_t i) {
  const int N = params.level;
  if (params.kind == ChainKind::Type1) {
    double drift = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) drift += params.alpha[j] * y[j];
    return params.beta[i] * N - params.beta[i] * drift + params.alpha[i] * y[i];
  }
  return params.beta[i] * (N - y.degree()) + params.alpha[i] * y[i];
}

/// max over columns y and directions i of |sum_x x_i K(x,y) - predicted moment|.
inline double verify_degree_one_sum_formulas(const ChainParameters& params, const KernelMatrix& K) {
  const Lattice& lat = K.lattice;
  double worst = 0.0;
  for (std::size_t y = 0; y < lat.size(); ++y) {
    for (std::size_t i = 0; i < params.dimension(); ++i) {
      double moment = 0.0;
      for (std::size_t x = 0; x < lat.size(); ++x) moment += lat[x][i] * K(x, y);
      worst = std::max(worst, std::abs(moment - predicted_first_moment(params, lat[y], i)));
    }
  }
  return worst;
}

inline double verify_degree_one_sum_formulas(const ChainParameters& params) {
  return verify_degree_one_sum_formulas(params, build_kernel(params));
}

/// Max over j, k (j != k) of |sum_x W P_{e_j}| and |sum_x W P_{e_j} P_{e_k}|.
inline double degree_one_orthogonality(const SpectralData& s, const WeightVector& weights) {
  const Lattice& lat = weights.lattice;
  const std::size_t n = s.dimension();
  Eigen::MatrixXd values(lat.size(), n);
  for (std::size_t x = 0; x < lat.size(); ++x)
    for (std::size_t j = 0; j < n; ++j)
      values(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(j)) =
          degree_one_polynomial(s, j, lat[x], lat.level());
  const Eigen::VectorXd mean = values.transpose() * weights.values;
  const Eigen::MatrixXd gram = values.transpose() * weights.values.asDiagonal() * values;
  double worst = mean.cwiseAbs().maxCoeff();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      if (j != k) worst = std::max(worst, std::abs(gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k))));
  return worst;
}

}  // namespace rahman
