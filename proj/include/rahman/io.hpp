#pragma once

// File formats: parameter JSON, kernel CSV, spectrum JSON, polynomial table
// CSV with its JSON sidecar, and the evolution trace CSV.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rahman/errors.hpp"
#include "rahman/kernels.hpp"
#include "rahman/polynomials.hpp"
#include "rahman/spectra.hpp"
#include "rahman/verifier.hpp"

namespace rahman::io {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<double> vector_to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// {kind: "type1"|"type2", n, N, alpha: [...], beta: [...]}; n is optional but must match.
inline RawParameters parse_parameters(const nlohmann::json& j) {
  RawParameters p;
  try {
    p.kind = j.at("kind").get<std::string>();
    p.level = j.at("N").get<int>();
    p.alpha = j.at("alpha").get<std::vector<double>>();
    p.beta = j.at("beta").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed parameter file: ") + e.what());
  }
  if (j.contains("n") && j.at("n").get<std::size_t>() != p.alpha.size())
    throw DomainError("parameter file: n does not match the length of alpha");
  return p;
}

inline RawParameters read_parameters(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open parameter file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("parameter file " + path + " is not valid JSON: " + e.what());
  }
  return parse_parameters(j);
}

/// Row-major CSV; the header row and the first column carry "x1:...:xn" labels.
inline void write_kernel_csv(std::ostream& out, const KernelMatrix& K) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "x\\y";
  for (const auto& y : K.lattice) out << ',' << y.to_string();
  out << '\n';
  for (std::size_t x = 0; x < K.size(); ++x) {
    out << K.lattice[x].to_string();
    for (std::size_t y = 0; y < K.size(); ++y) out << ',' << K(x, y);
    out << '\n';
  }
}

inline MultiIndex parse_label(const std::string& label) {
  std::vector<int> entries;
  std::stringstream ss(label);
  std::string part;
  while (std::getline(ss, part, ':')) entries.push_back(std::stoi(part));
  return MultiIndex(std::move(entries));
}

/// Reads back a square labeled table written by write_kernel_csv or write_polynomial_csv.
struct LabeledTable {
  std::vector<MultiIndex> row_labels;
  std::vector<MultiIndex> col_labels;
  Eigen::MatrixXd values;
};

inline LabeledTable read_labeled_csv(std::istream& in) {
  LabeledTable t;
  std::string line;
  if (!std::getline(in, line)) throw DomainError("empty CSV");
  {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    while (std::getline(ss, cell, ',')) t.col_labels.push_back(parse_label(cell));
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    t.row_labels.push_back(parse_label(cell));
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != t.col_labels.size()) throw DomainError("ragged CSV row");
    rows.push_back(std::move(row));
  }
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.col_labels.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return t;
}

/// {lambda, u, b, residuals: {...}}.
inline nlohmann::json spectrum_report(const ChainParameters& params, const SpectralData& s) {
  const auto ids = spectral_identities(params, s);
  return {{"kind", to_string(params.kind)},
          {"lambda", vector_to_std(s.lambda)},
          {"u", matrix_to_json(s.u)},
          {"b", matrix_to_json(s.b)},
          {"residuals",
           {{"sum_rule", sum_rule_residual(params, s)},
            {"beta_u_sum_rule", beta_u_residual(params, s)},
            {"eigenvalue_product", ids.product},
            {"eigenvalue_sum", ids.sum}}}};
}

/// Rows labeled by m, columns by x.
inline void write_polynomial_csv(std::ostream& out, const PolynomialTable& table) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "m\\x";
  for (const auto& x : table.lattice) out << ',' << x.to_string();
  out << '\n';
  for (std::size_t m = 0; m < table.lattice.size(); ++m) {
    out << table.lattice[m].to_string();
    for (std::size_t x = 0; x < table.lattice.size(); ++x) out << ',' << table(m, x);
    out << '\n';
  }
}

inline nlohmann::json polynomial_sidecar(const SpectralData& s, EvaluationMethod method) {
  return {{"u", matrix_to_json(s.u)}, {"lambda", vector_to_std(s.lambda)}, {"method", to_string(method)}};
}

/// step, symmetrized distance, max-abs distance, then p(x) for each lattice point.
inline void write_evolution_csv(std::ostream& out, const KernelMatrix& K, const WeightVector& start,
                                const WeightVector& stationary, int steps) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "step,sym_distance,max_distance";
  for (const auto& x : K.lattice) out << ",p[" << x.to_string() << ']';
  out << '\n';
  WeightVector p = start;
  for (int s = 0; s <= steps; ++s) {
    if (s > 0) p = evolve_distribution(K, p, 1);
    out << s << ',' << symmetrized_distance(p, stationary) << ',' << max_abs_distance(p, stationary);
    for (std::size_t k = 0; k < p.size(); ++k) out << ',' << p[k];
    out << '\n';
  }
}

}  // namespace rahman::io
