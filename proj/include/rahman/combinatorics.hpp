/**
 * @file combinatorics.hpp
 * @brief Simplex lattice, exact multinomials, rising factorials and the
 *        coefficient-matrix enumeration behind the Aomoto-Gelfand sum.
 *
 * The state space of an n-variable chain at level N is the simplex lattice
 * {x in N_0^n : |x| <= N}, stored here in graded lexicographic order. The same
 * lattice doubles as the index set of the polynomial degrees m.
 */
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rahman/errors.hpp"

namespace rahman {

using BigInt = boost::multiprecision::cpp_int;

/// Point of N_0^n. Used for states x, y, z and degrees m.
class MultiIndex {
 public:
  MultiIndex() = default;

  explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
    for (int e : entries_) {
      if (e < 0) throw DomainError("MultiIndex entries must be nonnegative");
    }
  }

  MultiIndex(std::initializer_list<int> entries) : MultiIndex(std::vector<int>(entries)) {}

  static MultiIndex zero(std::size_t n) { return MultiIndex(std::vector<int>(n, 0)); }

  /// Unit vector e_j (0-based direction).
  static MultiIndex unit(std::size_t n, std::size_t j) {
    std::vector<int> e(n, 0);
    e.at(j) = 1;
    return MultiIndex(std::move(e));
  }

  std::size_t size() const noexcept { return entries_.size(); }
  int operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<int>& entries() const noexcept { return entries_; }

  /// |x| = sum of entries.
  int degree() const noexcept { return std::accumulate(entries_.begin(), entries_.end(), 0); }

  bool is_zero() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(), [](int e) { return e == 0; });
  }

  /// "x1:x2:...:xn", the serialization used in CSV headers.
  std::string to_string(char sep = ':') const {
    std::string out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (i) out += sep;
      out += std::to_string(entries_[i]);
    }
    return out;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex& a, const MultiIndex& b) { return a.entries_ <=> b.entries_; }

  friend std::ostream& operator<<(std::ostream& os, const MultiIndex& m) {
    return os << '(' << m.to_string(',') << ')';
  }

 private:
  std::vector<int> entries_;
};

/// The simplex lattice {x in N_0^n : |x| <= N} in graded lexicographic order.
class Lattice {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Lattice(std::size_t n, int level) : n_(n), level_(level) {
    if (n == 0) throw DomainError("lattice dimension must be positive");
    if (level < 0) throw DomainError("lattice level must be nonnegative");
    std::vector<int> current(n, 0);
    for (int d = 0; d <= level; ++d) fill_degree(current, 0, d);
    for (std::size_t k = 0; k < points_.size(); ++k) position_.emplace(points_[k].entries(), k);

    lower_.assign(points_.size() * n_, npos);
    for (std::size_t k = 0; k < points_.size(); ++k) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (points_[k][j] == 0) continue;
        auto e = points_[k].entries();
        --e[j];
        lower_[k * n_ + j] = position_.at(e);
      }
    }
  }

  std::size_t dimension() const noexcept { return n_; }
  int level() const noexcept { return level_; }
  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<MultiIndex>& points() const noexcept { return points_; }
  const MultiIndex& operator[](std::size_t k) const { return points_[k]; }

  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

  bool contains(const MultiIndex& x) const { return position_.contains(x.entries()); }

  std::size_t position_of(const MultiIndex& x) const {
    auto it = position_.find(x.entries());
    if (it == position_.end()) throw DomainError("point " + x.to_string() + " is not in the lattice");
    return it->second;
  }

  /// Position of points[k] - e_j, or npos when that entry is already zero.
  std::size_t lower_neighbor(std::size_t k, std::size_t j) const { return lower_[k * n_ + j]; }

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.n_ == b.n_ && a.level_ == b.level_;
  }

 private:
  void fill_degree(std::vector<int>& current, std::size_t i, int remaining) {
    if (i + 1 == n_) {
      current[i] = remaining;
      points_.emplace_back(current);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      current[i] = v;
      fill_degree(current, i + 1, remaining - v);
    }
    current[i] = 0;
  }

  std::size_t n_;
  int level_;
  std::vector<MultiIndex> points_;
  std::map<std::vector<int>, std::size_t> position_;
  std::vector<std::size_t> lower_;
};

inline Lattice enumerate_lattice(std::size_t n, int level) { return Lattice(n, level); }

inline BigInt factorial(int k) {
  BigInt r = 1;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

/// Exact binomial coefficient C(n, k); zero outside 0 <= k <= n.
inline BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

/// N! / (x_1! ... x_n! (N-|x|)!), exact.
inline BigInt multinomial_coefficient(const MultiIndex& x, int level) {
  const int rest = level - x.degree();
  if (rest < 0) throw DomainError("multinomial coefficient needs |x| <= N");
  // Product of binomials avoids the full N! / prod division.
  BigInt r = 1;
  int used = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    used += x[i];
    r *= binomial(used, x[i]);
  }
  return r * binomial(level, rest);
}

inline double to_double(const BigInt& v) { return v.convert_to<double>(); }

/// Rising factorial (a)_k = a (a+1) ... (a+k-1); (a)_0 = 1.
inline double shifted_factorial(double a, int k) {
  if (k < 0) throw DomainError("shifted factorial needs k >= 0");
  // Nonpositive integer a terminates the product once a + i hits zero.
  if (a <= 0.0 && a == static_cast<double>(static_cast<long long>(a)) && k > -a) return 0.0;
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= a + i;
  return r;
}

/// Nonnegative integer n x n matrix c with cached marginals.
struct CoefficientMatrix {
  std::size_t n = 0;
  std::vector<int> entries;  // row-major
  std::vector<int> row_sums;
  std::vector<int> col_sums;
  int total = 0;

  int operator()(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
};

namespace detail {

template <class Visitor>
void visit_cells(CoefficientMatrix& c, std::size_t cell, std::vector<int>& row_left,
                 std::vector<int>& col_left, int& total_left, Visitor& visit) {
  if (cell == c.n * c.n) {
    visit(static_cast<const CoefficientMatrix&>(c));
    return;
  }
  const std::size_t i = cell / c.n;
  const std::size_t j = cell % c.n;
  const int cap = std::min({row_left[i], col_left[j], total_left});
  for (int v = 0; v <= cap; ++v) {
    c.entries[cell] = v;
    c.row_sums[i] += v;
    c.col_sums[j] += v;
    c.total += v;
    row_left[i] -= v;
    col_left[j] -= v;
    total_left -= v;
    visit_cells(c, cell + 1, row_left, col_left, total_left, visit);
    row_left[i] += v;
    col_left[j] += v;
    total_left += v;
    c.row_sums[i] -= v;
    c.col_sums[j] -= v;
    c.total -= v;
  }
  c.entries[cell] = 0;
}

}  // namespace detail

/**
 * Calls visit(c) for every n x n matrix c over N_0 with row sums bounded by
 * row_bound, column sums bounded by col_bound and total at most level.
 *
 * These are exactly the matrices with a nonzero weight in the hypergeometric
 * sum: any other c hits a vanishing (-x_i)_k or (-m_j)_k. Enumeration is a
 * depth-first walk over the cells in row-major order with running budgets.
 */
template <class Visitor>
void for_each_coefficient_matrix(const MultiIndex& row_bound, const MultiIndex& col_bound, int level,
                                 Visitor&& visit) {
  const std::size_t n = row_bound.size();
  if (col_bound.size() != n) throw DomainError("row and column bounds differ in dimension");
  CoefficientMatrix c;
  c.n = n;
  c.entries.assign(n * n, 0);
  c.row_sums.assign(n, 0);
  c.col_sums.assign(n, 0);
  std::vector<int> row_left = row_bound.entries();
  std::vector<int> col_left = col_bound.entries();
  int total_left = level;
  detail::visit_cells(c, 0, row_left, col_left, total_left, visit);
}

/// Materialized form of for_each_coefficient_matrix, in the same order.
inline std::vector<CoefficientMatrix> enumerate_coefficient_matrices(const MultiIndex& x,
                                                                     const MultiIndex& m, int level) {
  std::vector<CoefficientMatrix> out;
  for_each_coefficient_matrix(x, m, level, [&](const CoefficientMatrix& c) { out.push_back(c); });
  return out;
}

}  // namespace rahman
