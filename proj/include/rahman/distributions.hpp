#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rahman/combinatorics.hpp"
#include "rahman/errors.hpp"

namespace rahman {

// Cell probabilities (beta_1, ..., beta_n) of a multinomial law, each in the
// open interval (0,1) with 0 < |beta| < 1 so that beta_0 = 1 - |beta| > 0.
class ProbabilityVector {
 public:
  ProbabilityVector() = default;

  explicit ProbabilityVector(std::vector<double> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw DomainError("probability vector must be nonempty");
    for (double e : entries_) {
      if (!(e > 0.0 && e < 1.0)) throw DomainError("probabilities must lie in (0,1), got " + std::to_string(e));
    }
  }

  ProbabilityVector(std::initializer_list<double> e) : ProbabilityVector(std::vector<double>(e)) {}

  std::size_t size() const noexcept { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<double>& entries() const noexcept { return entries_; }
  double total() const noexcept { return std::accumulate(entries_.begin(), entries_.end(), 0.0); }

  /// Throws unless |beta| < 1 as well (multinomial parameters).
  const ProbabilityVector& require_subprobability() const {
    if (!(total() < 1.0)) throw DomainError("multinomial parameters need |beta| < 1");
    return *this;
  }

 private:
  std::vector<double> entries_;
};

// Odds parameterization q_i > 0 of the multinomial law.
class OddsVector {
 public:
  OddsVector() = default;

  explicit OddsVector(std::vector<double> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw DomainError("odds vector must be nonempty");
    for (double e : entries_) {
      if (!(e > 0.0) || !std::isfinite(e)) throw DomainError("odds must be positive and finite");
    }
  }

  OddsVector(std::initializer_list<double> e) : OddsVector(std::vector<double>(e)) {}

  std::size_t size() const noexcept { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<double>& entries() const noexcept { return entries_; }
  double total() const noexcept { return std::accumulate(entries_.begin(), entries_.end(), 0.0); }

 private:
  std::vector<double> entries_;
};

/// C(y,x) alpha^x (1-alpha)^(y-x).
inline double binomial_pmf(int x, int y, double alpha) {
  if (x < 0 || x > y) throw DomainError("binomial pmf needs 0 <= x <= y");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("binomial pmf needs 0 < alpha < 1");
  return to_double(binomial(y, x)) * std::pow(alpha, x) * std::pow(1.0 - alpha, y - x);
}

/// C(N; x) (1-|beta|)^(N-|x|) prod beta_i^x_i.
inline double multinomial_pmf(const MultiIndex& x, int level, const ProbabilityVector& beta) {
  if (x.size() != beta.size()) throw DomainError("multinomial pmf: dimension mismatch");
  beta.require_subprobability();
  const int rest = level - x.degree();
  if (rest < 0) throw DomainError("multinomial pmf needs |x| <= N");
  double p = to_double(multinomial_coefficient(x, level)) * std::pow(1.0 - beta.total(), rest);
  for (std::size_t i = 0; i < x.size(); ++i) p *= std::pow(beta[i], x[i]);
  return p;
}

/// C(N; x) prod q_i^x_i (1+|q|)^(-N).
inline double multinomial_alt_pmf(const MultiIndex& x, int level, const OddsVector& q) {
  if (x.size() != q.size()) throw DomainError("multinomial pmf: dimension mismatch");
  if (x.degree() > level) throw DomainError("multinomial pmf needs |x| <= N");
  double p = to_double(multinomial_coefficient(x, level)) * std::pow(1.0 + q.total(), -level);
  for (std::size_t i = 0; i < x.size(); ++i) p *= std::pow(q[i], x[i]);
  return p;
}

/// q_i = beta_i / (1 - |beta|).
inline OddsVector prob_to_odds(const ProbabilityVector& beta) {
  beta.require_subprobability();
  const double rest = 1.0 - beta.total();
  std::vector<double> q(beta.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = beta[i] / rest;
  return OddsVector(std::move(q));
}

/// beta_i = q_i / (1 + |q|).
inline ProbabilityVector odds_to_prob(const OddsVector& q) {
  const double denom = 1.0 + q.total();
  std::vector<double> beta(q.size());
  for (std::size_t i = 0; i < beta.size(); ++i) beta[i] = q[i] / denom;
  return ProbabilityVector(std::move(beta));
}

/// Binomial odds p = alpha / (1 - alpha), one per coordinate.
inline OddsVector binomial_odds(const ProbabilityVector& alpha) {
  std::vector<double> p(alpha.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = alpha[i] / (1.0 - alpha[i]);
  return OddsVector(std::move(p));
}

/// Inverse of binomial_odds: alpha = p / (1 + p).
inline ProbabilityVector binomial_prob(const OddsVector& p) {
  std::vector<double> a(p.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = p[i] / (1.0 + p[i]);
  return ProbabilityVector(std::move(a));
}

}  // namespace rahman
