/**
 * @file kernels.hpp
 * @brief The two convolution Markov kernels on the simplex lattice, their
 *        reversible distributions, symmetrization and time evolution.
 *
 * Both kernels move a state y to x by first thinning each coordinate
 * (z_i ~ Binomial(y_i, alpha_i)) and then adding a multinomial(beta) batch:
 *
 *   Type1:  K(x,y) = sum_z W_n(x-z; N-|z|, beta) prod_i W_1(z_i; y_i, alpha_i)
 *   Type2:  K(x,y) = sum_z W_n(x-z; N-|y|, beta) prod_i W_1(z_i; y_i, alpha_i)
 *
 * Matrices are stored with row = destination x and column = source y, so every
 * column is a probability distribution.
 */
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rahman/combinatorics.hpp"
#include "rahman/distributions.hpp"
#include "rahman/errors.hpp"
#include "rahman/parallel.hpp"

namespace rahman {

enum class ChainKind { Type1, Type2 };

inline std::string to_string(ChainKind kind) { return kind == ChainKind::Type1 ? "type1" : "type2"; }

inline ChainKind parse_chain_kind(const std::string& s) {
  if (s == "type1") return ChainKind::Type1;
  if (s == "type2") return ChainKind::Type2;
  throw DomainError("unknown chain kind '" + s + "' (expected type1 or type2)");
}

/// Minimum admissible |alpha_i - alpha_j|.
inline constexpr double kAlphaSeparation = 1e-8;

struct ChainParameters {
  ChainKind kind = ChainKind::Type1;
  int level = 1;
  ProbabilityVector alpha;
  ProbabilityVector beta;

  ChainParameters(ChainKind k, int N, ProbabilityVector a, ProbabilityVector b)
      : kind(k), level(N), alpha(std::move(a)), beta(std::move(b)) {
    validate();
  }

  std::size_t dimension() const noexcept { return alpha.size(); }

  void validate() const {
    if (level < 1) throw DomainError("level N must be a positive integer");
    if (alpha.size() != beta.size()) throw DomainError("alpha and beta must have the same length");
    beta.require_subprobability();
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      for (std::size_t j = i + 1; j < alpha.size(); ++j) {
        const double gap = std::abs(alpha[i] - alpha[j]);
        if (gap < kAlphaSeparation) throw DegenerateParameters(i, j, gap);
      }
    }
  }
};

struct KernelMatrix {
  Lattice lattice;
  Eigen::MatrixXd entries;  // (x, y) in lattice order

  std::size_t size() const noexcept { return lattice.size(); }
  double operator()(std::size_t x, std::size_t y) const { return entries(x, y); }
  double min_entry() const { return entries.minCoeff(); }
};

/// Distribution on the lattice: nonnegative, summing to one.
struct WeightVector {
  Lattice lattice;
  Eigen::VectorXd values;

  std::size_t size() const noexcept { return lattice.size(); }
  double operator[](std::size_t k) const { return values(static_cast<Eigen::Index>(k)); }
};

namespace detail {

// Multinomial masses W_n(.; L, beta) on Lattice(n, L), for L = 0..N.
struct MultinomialTables {
  std::vector<Lattice> lattices;
  std::vector<std::vector<double>> mass;

  MultinomialTables(std::size_t n, int level, const ProbabilityVector& beta) {
    lattices.reserve(level + 1);
    mass.reserve(level + 1);
    for (int L = 0; L <= level; ++L) {
      lattices.emplace_back(n, L);
      std::vector<double> w;
      w.reserve(lattices.back().size());
      for (const auto& v : lattices.back()) w.push_back(multinomial_pmf(v, L, beta));
      mass.push_back(std::move(w));
    }
  }
};

// Calls f(z) for every z with 0 <= z <= y componentwise, in lexicographic order.
template <class F>
void for_each_below(const MultiIndex& y, F&& f) {
  std::vector<int> z(y.size(), 0);
  while (true) {
    f(MultiIndex(z));
    std::size_t i = z.size();
    while (i > 0) {
      --i;
      if (z[i] < y[i]) {
        ++z[i];
        break;
      }
      z[i] = 0;
      if (i == 0) return;
    }
  }
}

}  // namespace detail

/// Assembles the kernel column by column; columns are independent convolutions.
inline KernelMatrix build_kernel(const ChainParameters& params) {
  params.validate();
  const std::size_t n = params.dimension();
  const int N = params.level;
  Lattice lattice(n, N);
  const detail::MultinomialTables tables(n, N, params.beta);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(lattice.size(), lattice.size());

  parallel_for(lattice.size(), [&](std::size_t col) {
    const MultiIndex& y = lattice[col];
    detail::for_each_below(y, [&](const MultiIndex& z) {
      double thin = 1.0;
      for (std::size_t i = 0; i < n; ++i) thin *= binomial_pmf(z[i], y[i], params.alpha[i]);
      const int batch = params.kind == ChainKind::Type1 ? N - z.degree() : N - y.degree();
      const Lattice& sub = tables.lattices[batch];
      const auto& mass = tables.mass[batch];
      std::vector<int> x(n);
      for (std::size_t k = 0; k < sub.size(); ++k) {
        for (std::size_t i = 0; i < n; ++i) x[i] = z[i] + sub[k][i];
        // Type1 keeps |x| <= N automatically; Type2 too since |z| <= |y|.
        K(static_cast<Eigen::Index>(lattice.position_of(MultiIndex(x))), static_cast<Eigen::Index>(col)) +=
            thin * mass[k];
      }
    });
  });
  return KernelMatrix{std::move(lattice), std::move(K)};
}

/// Normalizing constant D_n of the reversible parameters.
inline double reversible_normalizer(const ChainParameters& params) {
  double d = 1.0;
  for (std::size_t k = 0; k < params.dimension(); ++k) {
    const double a = params.alpha[k];
    const double b = params.beta[k];
    d += params.kind == ChainKind::Type1 ? a * b / (1.0 - a) : b / (1.0 - a);
  }
  return d;
}

/// Reversible multinomial parameters eta_i = beta_i / ((1 - alpha_i) D_n).
inline ProbabilityVector reversible_eta(const ChainParameters& params) {
  const double d = reversible_normalizer(params);
  std::vector<double> eta(params.dimension());
  for (std::size_t i = 0; i < eta.size(); ++i) eta[i] = params.beta[i] / (1.0 - params.alpha[i]) / d;
  return ProbabilityVector(std::move(eta)).require_subprobability();
}

/// W_n(x; N, eta) on the state lattice.
inline WeightVector reversible_weights(const ChainParameters& params) {
  const ProbabilityVector eta = reversible_eta(params);
  Lattice lattice(params.dimension(), params.level);
  Eigen::VectorXd w(lattice.size());
  for (std::size_t k = 0; k < lattice.size(); ++k)
    w(static_cast<Eigen::Index>(k)) = multinomial_pmf(lattice[k], params.level, eta);
  return WeightVector{std::move(lattice), std::move(w)};
}

/// T(x,y) = K(x,y) sqrt(pi(y) / pi(x)).
inline Eigen::MatrixXd symmetrize(const KernelMatrix& K, const WeightVector& pi) {
  if (K.size() != pi.size()) throw DomainError("symmetrize: size mismatch");
  if ((pi.values.array() <= 0.0).any()) throw DomainError("symmetrize needs strictly positive weights");
  const Eigen::ArrayXd root = pi.values.array().sqrt();
  Eigen::MatrixXd T = K.entries;
  for (Eigen::Index x = 0; x < T.rows(); ++x)
    for (Eigen::Index y = 0; y < T.cols(); ++y) T(x, y) *= root(y) / root(x);
  return T;
}

/// max |A - A^T|.
inline double asymmetry(const Eigen::MatrixXd& A) { return (A - A.transpose()).cwiseAbs().maxCoeff(); }

/// max over (x,y) of |K(x,y) pi(y) - K(y,x) pi(x)|.
inline double check_reversibility(const KernelMatrix& K, const WeightVector& pi) {
  if (K.size() != pi.size()) throw DomainError("check_reversibility: size mismatch");
  const Eigen::MatrixXd flow = K.entries * pi.values.asDiagonal();
  return (flow - flow.transpose()).cwiseAbs().maxCoeff();
}

/// max over columns of |sum_x K(x,y) - 1|.
inline double conservation_residual(const KernelMatrix& K) {
  return (K.entries.colwise().sum().array() - 1.0).abs().maxCoeff();
}

/// K^steps p0 by repeated matrix-vector products.
inline WeightVector evolve_distribution(const KernelMatrix& K, const WeightVector& p0, int steps) {
  if (K.size() != p0.size()) throw DomainError("evolve_distribution: size mismatch");
  if (steps < 0) throw DomainError("evolve_distribution needs steps >= 0");
  Eigen::VectorXd p = p0.values;
  for (int s = 0; s < steps; ++s) p = K.entries * p;
  return WeightVector{p0.lattice, std::move(p)};
}

/// sqrt(sum (p - pi)^2 / pi): the Euclidean distance after symmetrization.
/// It is nonincreasing under a kernel that is reversible with respect to pi.
inline double symmetrized_distance(const WeightVector& p, const WeightVector& pi) {
  return std::sqrt(((p.values - pi.values).array().square() / pi.values.array()).sum());
}

inline double max_abs_distance(const WeightVector& p, const WeightVector& q) {
  return (p.values - q.values).cwiseAbs().maxCoeff();
}

inline WeightVector point_mass(const Lattice& lattice, std::size_t k) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(lattice.size());
  v(static_cast<Eigen::Index>(k)) = 1.0;
  return WeightVector{lattice, std::move(v)};
}

inline WeightVector uniform_distribution(const Lattice& lattice) {
  const double w = 1.0 / static_cast<double>(lattice.size());
  return WeightVector{lattice, Eigen::VectorXd::Constant(lattice.size(), w)};
}

}  // namespace rahman
