/**
 * @file polynomials.hpp
 * @brief Rahman polynomials P_m(x; u) as terminating Aomoto-Gelfand sums,
 *        their generating function and the multiplicative spectrum.
 *
 *   P_m(x; u) = sum_c  prod_i (-x_i)_{r_i(c)} prod_j (-m_j)_{s_j(c)} / (-N)_{|c|}
 *                      * prod_ij u_ij^c_ij / c_ij!
 *
 * where c runs over n x n matrices over N_0 with row sums r_i, column sums s_j
 * and total |c| <= N. Independently,
 *
 *   G(x; u, t) = (1 + |t|)^(N - |x|) prod_i T_i(t)^x_i,  T_i(t) = 1 + sum_j b_ij t_j,
 *
 * has t^m coefficient C(N; m) P_m(x; u) with b = 1 - u. The two routes share
 * nothing but the u matrix and check each other.
 */
#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rahman/combinatorics.hpp"
#include "rahman/errors.hpp"
#include "rahman/kernels.hpp"
#include "rahman/parallel.hpp"
#include "rahman/spectra.hpp"

namespace rahman {

enum class EvaluationMethod { Direct, GeneratingFunction };

inline std::string to_string(EvaluationMethod m) {
  return m == EvaluationMethod::Direct ? "direct" : "genfun";
}

inline EvaluationMethod parse_evaluation_method(const std::string& s) {
  if (s == "direct") return EvaluationMethod::Direct;
  if (s == "genfun") return EvaluationMethod::GeneratingFunction;
  throw DomainError("unknown evaluation method '" + s + "' (expected direct or genfun)");
}

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {

inline void require_square(const Eigen::MatrixXd& u, std::size_t n) {
  if (u.rows() != static_cast<Eigen::Index>(n) || u.cols() != static_cast<Eigen::Index>(n))
    throw DomainError("parameter matrix must be n x n");
}

}  // namespace detail

/// Direct evaluation of the hypergeometric sum.
///
/// The sum cancels heavily when P_m(x) is small next to its terms, so terms
/// and partial sums are carried in 113-bit binary floating point and rounded
/// to double once.
inline double rahman_polynomial(const MultiIndex& m, const MultiIndex& x, const Eigen::MatrixXd& u, int level) {
  using Extended = boost::multiprecision::cpp_bin_float_quad;
  const std::size_t n = x.size();
  if (m.size() != n) throw DomainError("rahman_polynomial: dimension mismatch");
  if (m.degree() > level || x.degree() > level) throw DomainError("rahman_polynomial: index outside the lattice");
  detail::require_square(u, n);

  auto rising = [](int a, int k) {
    Extended r = 1;
    for (int i = 0; i < k; ++i) r *= a + i;
    return r;
  };
  // scaled[(i * n + j) * (level + 1) + k] = u_ij^k / k!
  const auto width = static_cast<std::size_t>(level) + 1;
  std::vector<Extended> scaled(n * n * width);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Extended* row = &scaled[(i * n + j) * width];
      row[0] = 1;
      const Extended uij = u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      for (std::size_t k = 1; k < width; ++k) row[k] = row[k - 1] * uij / static_cast<int>(k);
    }

  Extended sum = 0;
  for_each_coefficient_matrix(x, m, level, [&](const CoefficientMatrix& c) {
    Extended term = 1;
    for (std::size_t i = 0; i < n; ++i) term *= rising(-x[i], c.row_sums[i]);
    for (std::size_t j = 0; j < n; ++j) term *= rising(-m[j], c.col_sums[j]);
    term /= rising(-level, c.total);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) term *= scaled[(i * n + j) * width + static_cast<std::size_t>(c(i, j))];
    sum += term;
  });
  return sum.convert_to<double>();
}

/// T_i(t) = 1 + sum_j b_ij t_j for each i.
inline Eigen::VectorXd linear_forms(const Eigen::MatrixXd& b, const Eigen::VectorXd& t) {
  return Eigen::VectorXd::Ones(b.rows()) + b * t;
}

/// G(x; u, t) = (1 + |t|)^(N - |x|) prod_i T_i(t)^x_i.
inline double generating_function_value(const MultiIndex& x, const Eigen::MatrixXd& b, const Eigen::VectorXd& t,
                                        int level) {
  detail::require_square(b, x.size());
  if (t.size() != static_cast<Eigen::Index>(x.size())) throw DomainError("t has the wrong dimension");
  if (x.degree() > level) throw DomainError("generating_function_value: x outside the lattice");
  const Eigen::VectorXd T = linear_forms(b, t);
  double g = std::pow(1.0 + t.sum(), level - x.degree());
  for (std::size_t i = 0; i < x.size(); ++i) g *= std::pow(T(static_cast<Eigen::Index>(i)), x[i]);
  return g;
}

/// Coefficients of a polynomial in t_1..t_n of total degree <= N, indexed by
/// position in Lattice(n, N).
struct GeneratingExpansion {
  Lattice lattice;
  std::vector<double> coefficients;

  double coefficient(const MultiIndex& m) const { return coefficients[lattice.position_of(m)]; }
};

/// Expands G(x; u, t) in t by multiplying out its N linear factors.
inline GeneratingExpansion expand_generating_function(const MultiIndex& x, const Eigen::MatrixXd& b, int level) {
  const std::size_t n = x.size();
  detail::require_square(b, n);
  if (x.degree() > level) throw DomainError("expand_generating_function: x outside the lattice");
  Lattice lattice(n, level);
  std::vector<double> poly(lattice.size(), 0.0);
  poly[0] = 1.0;
  std::vector<double> next(lattice.size());

  // Multiply by (c0 + sum_j c_j t_j). Every factor is linear and there are
  // exactly N of them, so the result never leaves the lattice.
  auto multiply = [&](double c0, const std::vector<double>& c) {
    for (std::size_t k = 0; k < lattice.size(); ++k) {
      double v = c0 * poly[k];
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t lower = lattice.lower_neighbor(k, j);
        if (lower != Lattice::npos) v += c[j] * poly[lower];
      }
      next[k] = v;
    }
    poly.swap(next);
  };

  const std::vector<double> ones(n, 1.0);
  for (int r = 0; r < level - x.degree(); ++r) multiply(1.0, ones);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row[j] = b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    for (int r = 0; r < x[i]; ++r) multiply(1.0, row);
  }
  return GeneratingExpansion{std::move(lattice), std::move(poly)};
}

/// P_m(x; u) for every m (rows) and x (columns) of Lattice(n, N).
struct PolynomialTable {
  Lattice lattice;
  Eigen::MatrixXd values;
  EvaluationMethod method = EvaluationMethod::Direct;

  double operator()(std::size_t m, std::size_t x) const {
    return values(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(x));
  }
};

inline PolynomialTable polynomial_table(const Eigen::MatrixXd& u, int level,
                                        EvaluationMethod method = EvaluationMethod::Direct) {
  const auto n = static_cast<std::size_t>(u.rows());
  detail::require_square(u, n);
  Lattice lattice(n, level);
  const auto size = static_cast<Eigen::Index>(lattice.size());
  Eigen::MatrixXd values(size, size);

  if (method == EvaluationMethod::Direct) {
    parallel_for(lattice.size(), [&](std::size_t m) {
      for (std::size_t x = 0; x < lattice.size(); ++x)
        values(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(x)) =
            rahman_polynomial(lattice[m], lattice[x], u, level);
    });
  } else {
    const Eigen::MatrixXd b = Eigen::MatrixXd::Ones(u.rows(), u.cols()) - u;
    parallel_for(lattice.size(), [&](std::size_t x) {
      const GeneratingExpansion g = expand_generating_function(lattice[x], b, level);
      for (std::size_t m = 0; m < lattice.size(); ++m)
        values(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(x)) =
            g.coefficients[m] / to_double(multinomial_coefficient(lattice[m], level));
    });
  }
  return PolynomialTable{std::move(lattice), std::move(values), method};
}

/// Eigenvalue of P_m: prod_i lambda_i^m_i.
inline double spectrum_value(const MultiIndex& m, const Eigen::VectorXd& lambda) {
  if (static_cast<Eigen::Index>(m.size()) != lambda.size()) throw DomainError("spectrum_value: dimension mismatch");
  double e = 1.0;
  for (std::size_t i = 0; i < m.size(); ++i) e *= std::pow(lambda(static_cast<Eigen::Index>(i)), m[i]);
  return e;
}

/// max over (m, x) of |P_m(x; u) - P_x(m; u^T)|.
inline double duality_check(const Eigen::MatrixXd& u, int level) {
  const PolynomialTable forward = polynomial_table(u, level);
  const PolynomialTable dual = polynomial_table(u.transpose(), level);
  return (forward.values - dual.values.transpose()).cwiseAbs().maxCoeff();
}

/// Gram matrix sum_x w(x) P_m(x) P_m'(x).
inline Eigen::MatrixXd gram_matrix(const PolynomialTable& table, const WeightVector& weights) {
  return table.values * weights.values.asDiagonal() * table.values.transpose();
}

/// max over m != m' of |G_mm'| / sqrt(G_mm G_m'm').
inline double normalized_offdiagonal(const Eigen::MatrixXd& gram) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    for (Eigen::Index j = 0; j < gram.cols(); ++j)
      if (i != j) worst = std::max(worst, std::abs(gram(i, j)) / std::sqrt(std::abs(gram(i, i) * gram(j, j))));
  return worst;
}

/// |a - b| relative to max(|a|, |b|); absolute when both are below floor.
inline double relative_gap(double a, double b, double floor = 1e-8) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale < floor ? std::abs(a - b) : std::abs(a - b) / scale;
}

namespace detail {

// lhs(y) = sum_x K(x,y) G(x; u, t) and rhs(y) = G(y; u, lambda t).
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> master_identity_sides(const KernelMatrix& K, const SpectralData& s,
                                                                         const Eigen::VectorXd& t) {
  const Lattice& lat = K.lattice;
  const int N = lat.level();
  const Eigen::VectorXd scaled = s.lambda.cwiseProduct(t);
  const auto size = static_cast<Eigen::Index>(lat.size());
  Eigen::VectorXd g(size), lhs(size), rhs(size);
  for (std::size_t x = 0; x < lat.size(); ++x) g(static_cast<Eigen::Index>(x)) = generating_function_value(lat[x], s.b, t, N);
  for (std::size_t y = 0; y < lat.size(); ++y) {
    CompensatedSum sum;
    for (std::size_t x = 0; x < lat.size(); ++x) sum.add(K(x, y) * g(static_cast<Eigen::Index>(x)));
    lhs(static_cast<Eigen::Index>(y)) = sum.value();
    rhs(static_cast<Eigen::Index>(y)) = generating_function_value(lat[y], s.b, scaled, N);
  }
  return {std::move(lhs), std::move(rhs)};
}

}  // namespace detail

/// max_y |sum_x K(x,y) G(x; u, t) - G(y; u, lambda t)| / max_x |G(x; u, t)|.
/// Normwise for the same reason as the left-eigenvector residual: T_i may
/// vanish, so single entries can be zero while their sums cancel.
inline double generating_function_identity_residual(const KernelMatrix& K, const SpectralData& s,
                                                    const Eigen::VectorXd& t) {
  const auto [lhs, rhs] = detail::master_identity_sides(K, s, t);
  const Lattice& lat = K.lattice;
  double scale = 0.0;
  for (const auto& x : lat) scale = std::max(scale, std::abs(generating_function_value(x, s.b, t, lat.level())));
  return (lhs - rhs).cwiseAbs().maxCoeff() / scale;
}

/// Entrywise variant, relative_gap per y. Diagnostic only.
inline double generating_function_identity_entrywise_residual(const KernelMatrix& K, const SpectralData& s,
                                                              const Eigen::VectorXd& t) {
  const auto [lhs, rhs] = detail::master_identity_sides(K, s, t);
  double worst = 0.0;
  for (Eigen::Index y = 0; y < lhs.size(); ++y) worst = std::max(worst, relative_gap(lhs(y), rhs(y)));
  return worst;
}

/// |(1 - |beta|)(1 + |t|) + sum_i beta_i T_i(t) - (1 + |lambda t|)|.
inline double batch_factor_residual(const ChainParameters& params, const SpectralData& s, const Eigen::VectorXd& t) {
  const Eigen::VectorXd T = linear_forms(s.b, t);
  double lhs = (1.0 - params.beta.total()) * (1.0 + t.sum());
  for (std::size_t i = 0; i < params.dimension(); ++i) lhs += params.beta[i] * T(static_cast<Eigen::Index>(i));
  return std::abs(lhs - (1.0 + s.lambda.dot(t)));
}

/**
 * Max over i of the per-coordinate factor identity
 *
 *   Type1:  (1 - alpha_i)(1 + |lambda t|) + alpha_i T_i(t) = T_i(lambda t)
 *   Type2:  (1 - alpha_i)(1 + |t|)        + alpha_i T_i(t) = T_i(lambda t)
 *
 * The thinned coordinates of a Type2 step carry the (1 + |t|) weight of the
 * unscaled generating function, hence the different constant factor.
 */
inline double thinning_factor_residual(const ChainParameters& params, const SpectralData& s,
                                       const Eigen::VectorXd& t) {
  const Eigen::VectorXd T = linear_forms(s.b, t);
  const Eigen::VectorXd T_scaled = linear_forms(s.b, s.lambda.cwiseProduct(t));
  const double base = params.kind == ChainKind::Type1 ? 1.0 + s.lambda.dot(t) : 1.0 + t.sum();
  double worst = 0.0;
  for (std::size_t i = 0; i < params.dimension(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double lhs = (1.0 - params.alpha[i]) * base + params.alpha[i] * T(k);
    worst = std::max(worst, std::abs(lhs - T_scaled(k)));
  }
  return worst;
}

}  // namespace rahman
