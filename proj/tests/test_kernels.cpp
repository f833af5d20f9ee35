#include <gtest/gtest.h>

#include <cstdlib>

#include "rahman/kernels.hpp"
#include "test_support.hpp"

using namespace rahman;
using rahman::fixtures::generic2;
using rahman::fixtures::hand_type1;
using rahman::fixtures::hand_type2;

TEST(Kernel, HandCheckedTwoStateChains) {
  const KernelMatrix k2 = build_kernel(hand_type2());
  EXPECT_NEAR(k2(0, 0), 0.8, 1e-15);
  EXPECT_NEAR(k2(1, 0), 0.2, 1e-15);
  EXPECT_NEAR(k2(0, 1), 0.4, 1e-15);
  EXPECT_NEAR(k2(1, 1), 0.6, 1e-15);

  const KernelMatrix k1 = build_kernel(hand_type1());
  EXPECT_NEAR(k1(0, 0), 0.8, 1e-15);
  EXPECT_NEAR(k1(1, 0), 0.2, 1e-15);
  EXPECT_NEAR(k1(0, 1), 0.32, 1e-15);
  EXPECT_NEAR(k1(1, 1), 0.68, 1e-15);
}

// Exact rationals from tests/oracle/exact_values.py.
TEST(Kernel, FrozenBivariateEntries) {
  const ChainParameters t1(ChainKind::Type1, 2, {0.5, 0.25}, {0.2, 0.1});
  const ChainParameters t2(ChainKind::Type2, 2, {0.5, 0.25}, {0.2, 0.1});
  const KernelMatrix k1 = build_kernel(t1);
  const KernelMatrix k2 = build_kernel(t2);
  const Lattice& l = k1.lattice;
  auto at = [&](const KernelMatrix& k, MultiIndex x, MultiIndex y) { return k(l.position_of(x), l.position_of(y)); };
  EXPECT_NEAR(at(k1, {0, 0}, {0, 0}), 49.0 / 100, 1e-15);
  EXPECT_NEAR(at(k1, {1, 0}, {1, 1}), 147.0 / 400, 1e-15);
  EXPECT_NEAR(at(k1, {0, 2}, {1, 1}), 13.0 / 800, 1e-15);
  EXPECT_NEAR(at(k1, {2, 0}, {2, 0}), 9.0 / 25, 1e-15);
  EXPECT_NEAR(at(k1, {0, 1}, {2, 0}), 7.0 / 200, 1e-15);
  EXPECT_NEAR(at(k1, {1, 1}, {0, 2}), 39.0 / 400, 1e-15);
  EXPECT_NEAR(at(k2, {0, 0}, {0, 0}), 49.0 / 100, 1e-15);
  EXPECT_NEAR(at(k2, {1, 0}, {1, 1}), 3.0 / 8, 1e-15);
  EXPECT_EQ(at(k2, {0, 2}, {1, 1}), 0.0);
  EXPECT_NEAR(at(k2, {2, 0}, {2, 0}), 1.0 / 4, 1e-15);
  EXPECT_EQ(at(k2, {0, 1}, {2, 0}), 0.0);
  EXPECT_EQ(at(k2, {1, 1}, {0, 2}), 0.0);
}

TEST(Kernel, MatchesExplicitZRangeOracle) {
  for (auto kind : {ChainKind::Type1, ChainKind::Type2}) {
    for (std::size_t n = 1; n <= 3; ++n) {
      for (const auto& p : rahman::fixtures::seeded_parameter_sets(kind, n, 4, 3, 100 + n)) {
        const KernelMatrix K = build_kernel(p);
        for (std::size_t x = 0; x < K.size(); ++x)
          for (std::size_t y = 0; y < K.size(); ++y)
            EXPECT_NEAR(K(x, y), rahman::fixtures::oracle_kernel_entry(p, K.lattice[x], K.lattice[y]), 1e-14);
      }
    }
  }
}

TEST(Kernel, ColumnStochastic) {
  for (auto kind : {ChainKind::Type1, ChainKind::Type2})
    for (std::size_t n = 1; n <= 3; ++n)
      for (int N = 1; N <= 5; ++N)
        for (const auto& p : rahman::fixtures::seeded_parameter_sets(kind, n, N, 2, 7 * N + n))
          EXPECT_LE(conservation_residual(build_kernel(p)), 1e-12);
}

TEST(Kernel, Type1StrictlyPositive) {
  for (const auto& p : rahman::fixtures::seeded_parameter_sets(ChainKind::Type1, 3, 5, 4, 3))
    EXPECT_GT(build_kernel(p).min_entry(), 0.0);
}

// Type2 vanishes exactly when some coordinate has an empty z range
// max(0, x_i + |y| - N) > min(x_i, y_i).
TEST(Kernel, Type2ZerosAreStructural) {
  const ChainParameters p = generic2(ChainKind::Type2, 4);
  const KernelMatrix K = build_kernel(p);
  for (std::size_t x = 0; x < K.size(); ++x) {
    for (std::size_t y = 0; y < K.size(); ++y) {
      const auto& xs = K.lattice[x];
      const auto& ys = K.lattice[y];
      bool empty = false;
      for (std::size_t i = 0; i < 2; ++i)
        empty = empty || std::max(0, xs[i] + ys.degree() - p.level) > std::min(xs[i], ys[i]);
      if (empty)
        EXPECT_EQ(K(x, y), 0.0);
      else
        EXPECT_GT(K(x, y), 0.0);
    }
  }
  EXPECT_GT(build_kernel(hand_type2()).min_entry(), 0.0);
}

TEST(Kernel, DegenerateAlphaRejected) {
  try {
    ChainParameters(ChainKind::Type1, 3, {0.5, 0.3, 0.5 + 1e-10}, {0.2, 0.1, 0.1});
    FAIL() << "expected DegenerateParameters";
  } catch (const DegenerateParameters& e) {
    EXPECT_EQ(e.first(), 0u);
    EXPECT_EQ(e.second(), 2u);
    EXPECT_LT(e.gap(), 1e-8);
  }
  EXPECT_THROW(ChainParameters(ChainKind::Type2, 2, {0.5, 0.5}, {0.2, 0.1}), DegenerateParameters);
  EXPECT_NO_THROW(ChainParameters(ChainKind::Type2, 2, {0.5, 0.5 + 1e-6}, {0.2, 0.1}));
  EXPECT_THROW(ChainParameters(ChainKind::Type1, 0, {0.5}, {0.2}), DomainError);
  EXPECT_THROW(ChainParameters(ChainKind::Type1, 2, {0.5, 0.3}, {0.6, 0.5}), DomainError);
}

TEST(Kernel, ParallelAssemblyIsBitwiseDeterministic) {
  const ChainParameters p(ChainKind::Type1, 5, {0.7, 0.3, 0.5}, {0.2, 0.15, 0.1});
  setenv("RAHMAN_THREADS", "1", 1);
  const KernelMatrix serial = build_kernel(p);
  setenv("RAHMAN_THREADS", "4", 1);
  const KernelMatrix parallel = build_kernel(p);
  unsetenv("RAHMAN_THREADS");
  EXPECT_TRUE((serial.entries.array() == parallel.entries.array()).all());
}

TEST(ReversibleWeights, OneVariableClosedForms) {
  for (double a : {0.2, 0.6, 0.85}) {
    for (double b : {0.1, 0.2, 0.7}) {
      const ChainParameters t1(ChainKind::Type1, 3, {a}, {b});
      const ChainParameters t2(ChainKind::Type2, 3, {a}, {b});
      EXPECT_NEAR(reversible_eta(t1)[0], b / (1 - a + a * b), 1e-15);
      EXPECT_NEAR(reversible_eta(t2)[0], b / (1 - a + b), 1e-15);
    }
  }
  const WeightVector w = reversible_weights(hand_type2());
  EXPECT_NEAR(reversible_eta(hand_type2())[0], 1.0 / 3, 1e-15);
  EXPECT_NEAR(w[0], 2.0 / 3, 1e-15);
  EXPECT_NEAR(w[1], 1.0 / 3, 1e-15);
}

// Type1 weights satisfy the chain of equalities
// (1-a_i) eta_i / b_i = (1-|eta|)/(1-|beta|) = 1 - sum a_k eta_k = 1/D_n.
TEST(ReversibleWeights, Type1ParameterRelations) {
  for (const auto& p : rahman::fixtures::seeded_parameter_sets(ChainKind::Type1, 3, 2, 5, 17)) {
    const ProbabilityVector eta = reversible_eta(p);
    const double inv_d = 1.0 / reversible_normalizer(p);
    double drift = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_NEAR((1 - p.alpha[i]) * eta[i] / p.beta[i], inv_d, 1e-14);
      drift += p.alpha[i] * eta[i];
    }
    EXPECT_NEAR((1 - eta.total()) / (1 - p.beta.total()), inv_d, 1e-14);
    EXPECT_NEAR(1 - drift, inv_d, 1e-14);
  }
}

// Odds-space route: r_i = q_i (1 + p_i) (Type1) or r_i = beta_i / (1 - alpha_i)
// (Type2), then eta = r / (1 + |r|).
TEST(ReversibleWeights, OddsSpaceRouteAgrees) {
  for (auto kind : {ChainKind::Type1, ChainKind::Type2}) {
    for (const auto& p : rahman::fixtures::seeded_parameter_sets(kind, 2, 3, 5, 23)) {
      const OddsVector q = prob_to_odds(p.beta);
      const OddsVector po = binomial_odds(p.alpha);
      std::vector<double> r(2);
      for (std::size_t i = 0; i < 2; ++i)
        r[i] = kind == ChainKind::Type1 ? q[i] * (1 + po[i]) : p.beta[i] / (1 - p.alpha[i]);
      const ProbabilityVector via_odds = odds_to_prob(OddsVector(r));
      const ProbabilityVector eta = reversible_eta(p);
      for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(via_odds[i], eta[i], 1e-15);
    }
  }
}

TEST(Reversibility, HandInstanceAndPerturbation) {
  const ChainParameters p = hand_type2();
  const KernelMatrix K = build_kernel(p);
  const WeightVector pi = reversible_weights(p);
  EXPECT_NEAR(K(1, 0) * pi[0], 2.0 / 15, 1e-16);
  EXPECT_NEAR(K(0, 1) * pi[1], 2.0 / 15, 1e-16);
  EXPECT_LE(check_reversibility(K, pi), 1e-16);

  const ChainParameters p2 = generic2(ChainKind::Type1, 4);
  const KernelMatrix K2 = build_kernel(p2);
  const ProbabilityVector eta = reversible_eta(p2);
  const ProbabilityVector bumped({eta[0] + 0.05, eta[1]});
  Eigen::VectorXd wrong(K2.size());
  for (std::size_t k = 0; k < K2.size(); ++k) wrong(static_cast<Eigen::Index>(k)) = multinomial_pmf(K2.lattice[k], 4, bumped);
  EXPECT_GT(check_reversibility(K2, WeightVector{K2.lattice, wrong}), 1e-3);
}

TEST(Reversibility, RandomInstances) {
  for (auto kind : {ChainKind::Type1, ChainKind::Type2}) {
    for (const auto& p : rahman::fixtures::seeded_parameter_sets(kind, 2, 4, 10, 31)) {
      const KernelMatrix K = build_kernel(p);
      const WeightVector pi = reversible_weights(p);
      EXPECT_LE(check_reversibility(K, pi), 1e-12);
      EXPECT_NEAR(pi.values.sum(), 1.0, 1e-12);
      EXPECT_LE(asymmetry(symmetrize(K, pi)), 1e-11);
    }
  }
}

TEST(Symmetrize, Examples) {
  const ChainParameters p = hand_type2();
  const KernelMatrix K = build_kernel(p);
  const Eigen::MatrixXd T = symmetrize(K, reversible_weights(p));
  EXPECT_NEAR(T(0, 1), 0.2 * std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(T(1, 0), 0.2 * std::sqrt(2.0), 1e-15);

  const Lattice l(2, 2);
  const KernelMatrix identity{l, Eigen::MatrixXd::Identity(l.size(), l.size())};
  const Eigen::MatrixXd Ti = symmetrize(identity, uniform_distribution(l));
  EXPECT_TRUE(Ti.isApprox(Eigen::MatrixXd::Identity(l.size(), l.size())));

  const ChainParameters q = generic2(ChainKind::Type1, 3);
  const KernelMatrix Kq = build_kernel(q);
  EXPECT_GT(asymmetry(symmetrize(Kq, uniform_distribution(Kq.lattice))), 1e-3);
  EXPECT_THROW(symmetrize(Kq, point_mass(Kq.lattice, 0)), DomainError);
}

TEST(Spectrum, SymmetrizedKernelEigenvalues) {
  for (auto kind : {ChainKind::Type1, ChainKind::Type2}) {
    for (const auto& p : rahman::fixtures::seeded_parameter_sets(kind, 2, 4, 4, 41)) {
      const KernelMatrix K = build_kernel(p);
      const Eigen::MatrixXd T = symmetrize(K, reversible_weights(p));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (T + T.transpose()));
      const Eigen::VectorXd ev = es.eigenvalues();  // ascending
      EXPECT_GT(ev(0), -1.0);
      EXPECT_NEAR(ev(ev.size() - 1), 1.0, 1e-12);
      EXPECT_LT(ev(ev.size() - 2), 1.0 - 1e-6);
      // The constant is a left eigenvector with eigenvalue 1.
      const Eigen::RowVectorXd ones = Eigen::RowVectorXd::Ones(K.size());
      EXPECT_LE((ones * K.entries - ones).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Evolve, StationaryAndTrivialSteps) {
  const ChainParameters p = generic2(ChainKind::Type2, 4);
  const KernelMatrix K = build_kernel(p);
  const WeightVector pi = reversible_weights(p);
  WeightVector cur = pi;
  for (int s = 0; s < 10; ++s) {
    cur = evolve_distribution(K, cur, 1);
    EXPECT_LE(max_abs_distance(cur, pi), 1e-12);
  }
  const WeightVector start = point_mass(K.lattice, 3);
  EXPECT_EQ(evolve_distribution(K, start, 0).values, start.values);
  EXPECT_THROW(evolve_distribution(K, start, -1), DomainError);
}

TEST(Evolve, PointMassConvergesMonotonically) {
  for (auto kind : {ChainKind::Type1, ChainKind::Type2}) {
    for (const auto& p : rahman::fixtures::seeded_parameter_sets(kind, 2, 4, 5, 53)) {
      const KernelMatrix K = build_kernel(p);
      const WeightVector pi = reversible_weights(p);
      WeightVector cur = point_mass(K.lattice, 0);
      double prev = symmetrized_distance(cur, pi);
      for (int s = 0; s < 200; ++s) {
        cur = evolve_distribution(K, cur, 1);
        const double d = symmetrized_distance(cur, pi);
        EXPECT_LE(d, prev * (1 + 1e-12) + 1e-15);
        EXPECT_NEAR(cur.values.sum(), 1.0, 1e-12);
        prev = d;
      }
      EXPECT_LE(max_abs_distance(cur, pi), 1e-8);
    }
  }
}
