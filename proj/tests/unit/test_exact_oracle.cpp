#include "oracles.hpp"

#include <npg/exact_oracle.hpp>

#include <gtest/gtest.h>

namespace npg {
namespace {

using testing::random_policy;
using testing::random_simplex;

class ExactOracle : public ::testing::TestWithParam<std::uint64_t> {
 protected:
  void SetUp() override {
    gen_.seed(GetParam());
    const int S = 3 + static_cast<int>(GetParam() % 4);
    const int A = 2 + static_cast<int>(GetParam() % 3);
    mdp_ = generate_random_mdp(S, A, 0.85, GetParam());
    pi_ = random_policy(S, A, gen_);
  }
  std::mt19937_64 gen_;
  FiniteMdp mdp_;
  PolicyTable pi_;
};

TEST_P(ExactOracle, ValuesMatchPowerSeries) {
  const ValueBundle values = evaluate_policy(mdp_, pi_);
  const Vector v = testing::series_values(mdp_, pi_);
  EXPECT_LT((values.v - v).cwiseAbs().maxCoeff(), 1e-10);
  const Matrix q = testing::q_from_values(mdp_, v);
  EXPECT_LT((values.q - q).cwiseAbs().maxCoeff(), 1e-10);
  for (int s = 0; s < mdp_.n_states; ++s) {
    EXPECT_NEAR(values.adv.row(s).dot(pi_.probs().row(s)), 0.0, 1e-12);
    EXPECT_NEAR(values.q.row(s).dot(pi_.probs().row(s)), values.v[s], 1e-12);
  }
}

TEST_P(ExactOracle, ValuesBoundedByHorizon) {
  const ValueBundle values = evaluate_policy(mdp_, pi_);
  EXPECT_GE(values.v.minCoeff(), 0.0);
  EXPECT_LE(values.v.maxCoeff(), 1.0 / (1.0 - mdp_.gamma) + 1e-12);
}

TEST_P(ExactOracle, StateVisitationMatchesSeries) {
  const Vector rho = random_simplex(mdp_.n_states, gen_);
  const StateDistribution d = state_visitation(mdp_, pi_, StateDistribution(rho));
  const Vector expected = testing::series_visitation(mdp_, pi_, rho);
  EXPECT_LT((d.probs() - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(d.probs().sum(), 1.0, 1e-12);
  // d >= (1 - gamma) rho componentwise.
  EXPECT_GE((d.probs() - (1.0 - mdp_.gamma) * rho).minCoeff(), -1e-15);
}

TEST_P(ExactOracle, BarVisitationIsStateTimesPolicy) {
  const StateDistribution rho = StateDistribution::uniform(mdp_.n_states);
  const StateDistribution d = state_visitation(mdp_, pi_, rho);
  const StateActionDistribution bar = state_action_visitation_bar(mdp_, pi_, rho);
  for (int s = 0; s < mdp_.n_states; ++s) {
    for (int a = 0; a < mdp_.n_actions; ++a) {
      EXPECT_NEAR(bar[mdp_.pair(s, a)], d[s] * pi_(s, a), 1e-15);
    }
  }
}

TEST_P(ExactOracle, TildeVisitationMatchesSeries) {
  const Vector nu = random_simplex(mdp_.n_pairs(), gen_);
  const StateActionDistribution d =
      state_action_visitation_tilde(mdp_, pi_, StateActionDistribution(nu));
  const Vector expected = testing::series_pair_visitation(mdp_, pi_, nu);
  EXPECT_LT((d.probs() - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST_P(ExactOracle, OptimalPolicyMatchesValueIteration) {
  const PolicyTable star = optimal_policy(mdp_);
  const Vector v_star = testing::value_iteration(mdp_);
  const ValueBundle values = evaluate_policy(mdp_, star);
  EXPECT_LT((values.v - v_star).cwiseAbs().maxCoeff(), 1e-9);
  // No policy does better anywhere.
  const ValueBundle other = evaluate_policy(mdp_, pi_);
  EXPECT_GE((other.v - values.v).minCoeff(), -1e-12);
  // The optimal advantage is nonnegative.
  EXPECT_GE(values.adv.minCoeff(), -1e-12);
}

TEST_P(ExactOracle, PerformanceDifferenceHolds) {
  const PolicyTable other = random_policy(mdp_.n_states, mdp_.n_actions, gen_);
  const StateDistribution rho(random_simplex(mdp_.n_states, gen_));
  const PerformanceDifference pd = performance_difference(mdp_, pi_, other, rho);
  const double direct = expected_value(evaluate_policy(mdp_, pi_), rho) -
                        expected_value(evaluate_policy(mdp_, other), rho);
  EXPECT_NEAR(pd.value_gap, direct, 1e-12);
  // Advantage form from the series oracles.
  const Vector d = testing::series_visitation(mdp_, pi_, rho.probs());
  const Vector v_other = testing::series_values(mdp_, other);
  const Matrix q_other = testing::q_from_values(mdp_, v_other);
  double adv_form = 0.0;
  for (int s = 0; s < mdp_.n_states; ++s) {
    for (int a = 0; a < mdp_.n_actions; ++a) {
      adv_form += d[s] * pi_(s, a) * (q_other(s, a) - v_other[s]);
    }
  }
  adv_form /= 1.0 - mdp_.gamma;
  EXPECT_NEAR(pd.advantage_form, adv_form, 1e-10);
  EXPECT_NEAR(pd.value_gap, pd.advantage_form, 1e-10);
}

TEST_P(ExactOracle, StationaryDistributionIsFixedPoint) {
  const PolicyTable star = optimal_policy(mdp_);
  const StateDistribution rho = stationary_distribution(mdp_, star);
  const Matrix p = policy_transition(mdp_, star);
  EXPECT_LT((rho.probs().transpose() * p - rho.probs().transpose()).cwiseAbs().maxCoeff(), 1e-13);
  const StateDistribution d = state_visitation(mdp_, star, rho);
  EXPECT_LT((d.probs() - rho.probs()).cwiseAbs().maxCoeff(), 1e-13);
}

INSTANTIATE_TEST_SUITE_P(Seeds, ExactOracle, ::testing::Range<std::uint64_t>(1, 9));

TEST(ExactOracle, PolicyTransitionRowsAreStochastic) {
  const FiniteMdp mdp = generate_random_mdp(5, 3, 0.9, 3);
  const Matrix p = policy_transition(mdp, PolicyTable::uniform(5, 3));
  for (int s = 0; s < 5; ++s) EXPECT_NEAR(p.row(s).sum(), 1.0, 1e-14);
}

TEST(ExactOracle, ChainOptimalValuesClosedForm) {
  // Cost 1 per step until the goal: V*(s) = (1 - gamma^dist) / (1 - gamma).
  const int n = 6;
  const double gamma = 0.9;
  const FiniteMdp mdp = generate_chain_mdp(n, gamma);
  const ValueBundle values = evaluate_policy(mdp, optimal_policy(mdp));
  for (int s = 0; s < n; ++s) {
    const int dist = n - 1 - s;
    EXPECT_NEAR(values.v[s], (1.0 - std::pow(gamma, dist)) / (1.0 - gamma), 1e-12);
  }
}

TEST(ExactOracle, ZeroDiscountValueIsImmediateCost) {
  const FiniteMdp mdp = generate_random_mdp(4, 3, 0.0, 11);
  const PolicyTable pi = PolicyTable::uniform(4, 3);
  const ValueBundle values = evaluate_policy(mdp, pi);
  EXPECT_LT((values.q - mdp.cost).cwiseAbs().maxCoeff(), 1e-15);
  const StateDistribution rho(Vector::Constant(4, 0.25));
  EXPECT_LT((state_visitation(mdp, pi, rho).probs() - rho.probs()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ExactOracle, GreedyTieBreaksToLowestIndex) {
  Matrix q(2, 3);
  q << 1.0, 0.5, 0.5, 0.3, 0.3 * (1 + 1e-14), 0.2;
  const Eigen::VectorXi greedy = greedy_actions(q);
  EXPECT_EQ(greedy[0], 1);
  EXPECT_EQ(greedy[1], 2);
  Matrix tie(1, 3);
  tie << 0.7, 0.7 * (1 + 5e-13), 0.9;
  EXPECT_EQ(greedy_actions(tie)[0], 0);
}

TEST(ExactOracle, PolicyTableValidates) {
  Matrix bad(1, 2);
  bad << 0.7, 0.7;
  EXPECT_THROW(PolicyTable{bad}, InvariantError);
  Eigen::VectorXi actions(2);
  actions << 1, 0;
  const PolicyTable det = PolicyTable::deterministic(actions, 3);
  EXPECT_DOUBLE_EQ(det(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(det(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(det.flattened()[1], 1.0);
}

TEST(ExactOracle, PerformanceDifferenceWithSelfIsZero) {
  const FiniteMdp mdp = generate_random_mdp(5, 2, 0.7, 2);
  const PolicyTable pi = PolicyTable::uniform(5, 2);
  const auto pd = performance_difference(mdp, pi, pi, StateDistribution::uniform(5));
  EXPECT_NEAR(pd.value_gap, 0.0, 1e-15);
  EXPECT_NEAR(pd.advantage_form, 0.0, 1e-14);
}

}  // namespace
}  // namespace npg
