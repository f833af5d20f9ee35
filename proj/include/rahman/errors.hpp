#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace rahman {

// Argument outside the mathematical domain of an operation (|x| > N, x > y,
// probabilities on the boundary of the open simplex, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Two entries of alpha collide within the separation tolerance. The general
// u-matrix formula breaks down in that case.
class DegenerateParameters : public std::invalid_argument {
  static std::string format_gap(double gap) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", gap);
    return buf;
  }

 public:
  DegenerateParameters(std::size_t first, std::size_t second, double gap)
      : std::invalid_argument("degenerate parameters: alpha[" + std::to_string(first) +
                              "] and alpha[" + std::to_string(second) +
                              "] differ by " + format_gap(gap)),
        first_(first),
        second_(second),
        gap_(gap) {}

  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }
  double gap() const noexcept { return gap_; }

 private:
  std::size_t first_;
  std::size_t second_;
  double gap_;
};

// The characteristic matrix has a complex or repeated eigenvalue.
class NonGenericSpectrum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Some eigenvalue coincides with some alpha_i, so u_ij has a vanishing denominator.
class SingularU : public std::runtime_error {
 public:
  SingularU(std::size_t alpha_index, std::size_t lambda_index, double gap)
      : std::runtime_error("singular u: lambda[" + std::to_string(lambda_index) +
                           "] is within " + std::to_string(gap) + " of alpha[" +
                           std::to_string(alpha_index) + "]"),
        alpha_index_(alpha_index),
        lambda_index_(lambda_index) {}

  std::size_t alpha_index() const noexcept { return alpha_index_; }
  std::size_t lambda_index() const noexcept { return lambda_index_; }

 private:
  std::size_t alpha_index_;
  std::size_t lambda_index_;
};

}  // namespace rahman
