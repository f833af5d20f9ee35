#include <gtest/gtest.h>

#include <set>

#include "rahman/verifier.hpp"
#include "test_support.hpp"

using namespace rahman;

TEST(RunAll, GenericBivariatePasses) {
  for (auto kind : {ChainKind::Type1, ChainKind::Type2}) {
    const VerificationReport r = run_all(rahman::fixtures::generic2(kind, 4), 1234);
    EXPECT_TRUE(r.passed());
    EXPECT_FALSE(r.error.has_value());
    for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << c.name << " residual " << c.residual;
    for (const char* name : {"conservation", "reversibility", "stationarity", "degree_one_sum_formulas", "sum_rule",
                             "beta_u_sum_rule", "eigenvalue_product", "eigenvalue_sum", "degree_one_orthogonality",
                             "gram_orthogonality", "duality", "genfun_vs_direct", "genfun_master_identity",
                             "batch_factor_identity", "thinning_factor_identity", "left_eigen",
                             "weighted_right_eigen", "full_spectrum", "unit_eigenvalue_simple"})
      EXPECT_NE(r.find(name), nullptr) << name;
  }
}

TEST(RunAll, OneVariableClosedForms) {
  for (auto p : {rahman::fixtures::hand_type1(), rahman::fixtures::hand_type2()}) {
    const VerificationReport r = run_all(p);
    ASSERT_NE(r.find("one_variable_closed_forms"), nullptr);
    EXPECT_TRUE(r.find("one_variable_closed_forms")->passed);
    EXPECT_TRUE(r.passed());
  }
}

TEST(RunAll, DegenerateAlphaIsStructuredFailure) {
  const RawParameters raw{"type1", 3, {0.5, 0.5}, {0.2, 0.1}};
  const VerificationReport r = run_all(raw);
  ASSERT_TRUE(r.error.has_value());
  EXPECT_EQ(r.error->type, "DegenerateParameters");
  EXPECT_TRUE(r.checks.empty());
  EXPECT_FALSE(r.passed());
  const auto j = to_json(r);
  EXPECT_EQ(j.at("error").at("type"), "DegenerateParameters");
  EXPECT_FALSE(j.at("pass").get<bool>());
}

TEST(RunAll, BadKindIsStructuredFailure) {
  const VerificationReport r = run_all(RawParameters{"type3", 2, {0.5}, {0.2}});
  ASSERT_TRUE(r.error.has_value());
  EXPECT_EQ(r.error->type, "DomainError");
}

TEST(RunAll, DeterministicReport) {
  const auto p = rahman::fixtures::generic2(ChainKind::Type2, 3);
  setenv("RAHMAN_THREADS", "1", 1);
  const VerificationReport a = run_all(p, 99);
  setenv("RAHMAN_THREADS", "3", 1);
  const VerificationReport b = run_all(p, 99);
  unsetenv("RAHMAN_THREADS");
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    EXPECT_EQ(a.checks[i].name, b.checks[i].name);
    EXPECT_EQ(a.checks[i].residual, b.checks[i].residual) << a.checks[i].name;
  }
}

TEST(RunAll, OverallPassIffAllResidualsWithinTolerance) {
  const auto p = rahman::fixtures::generic2(ChainKind::Type1, 3);
  Tolerances tight;
  tight.scale = 1e-9;
  const VerificationReport r = run_all(p, 1, tight);
  bool all = true;
  for (const auto& c : r.checks) {
    EXPECT_EQ(c.passed, c.residual <= c.tolerance);
    all = all && c.passed;
  }
  EXPECT_EQ(r.passed(), all);
  EXPECT_FALSE(r.passed());
}

TEST(FullSpectrum, MatchesMultiplicativeSpectrum) {
  const Pipeline hand(rahman::fixtures::hand_type2());
  const FullSpectrumComparison c = compare_full_spectrum(hand);
  EXPECT_NEAR(c.observed(0), 1.0, 1e-15);
  EXPECT_NEAR(c.observed(1), 0.4, 1e-15);

  std::mt19937_64 rng(2024);
  for (auto kind : {ChainKind::Type1, ChainKind::Type2}) {
    const Pipeline p(random_parameters(kind, 2, 3, rng));
    const FullSpectrumComparison cmp = compare_full_spectrum(p);
    EXPECT_EQ(cmp.observed.size(), 10);
    EXPECT_LE(cmp.worst_gap, 1e-9);
    EXPECT_LT(cmp.second_largest, 1.0 - 1e-6);
  }
}

TEST(RightEigen, HandInstanceExact) {
  const Pipeline p(rahman::fixtures::hand_type2());
  EXPECT_LE(weighted_right_eigen_residual(p), 1e-15);
  EXPECT_LE(left_eigen_residual(p), 1e-15);
}

TEST(RandomParameters, RespectSeparationAndRanges) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + k % 6;
    const ChainParameters p = random_parameters(k % 2 ? ChainKind::Type1 : ChainKind::Type2, n, 2, rng);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GE(p.alpha[i], 0.1 - 1e-12);
      EXPECT_LE(p.alpha[i], 0.9 + 1e-12);
      for (std::size_t j = i + 1; j < n; ++j) EXPECT_GE(std::abs(p.alpha[i] - p.alpha[j]), 0.05 - 1e-12);
    }
    EXPECT_GT(p.beta.total(), 0.1 - 1e-12);
    EXPECT_LT(p.beta.total(), 0.9 + 1e-12);
  }
}
