#include "oracles.hpp"

#include <npg/cfa_regression.hpp>

#include <gtest/gtest.h>

namespace npg {
namespace {

using testing::random_normal;
using testing::random_simplex;

RegressionProblem random_problem(int rows, int cols, std::mt19937_64& gen) {
  RegressionProblem p;
  p.design = Matrix(rows, cols);
  for (int c = 0; c < cols; ++c) p.design.col(c) = random_normal(rows, gen);
  p.target = random_normal(rows, gen);
  p.weights = StateActionDistribution(random_simplex(rows, gen));
  return p;
}

double direct_loss(const RegressionProblem& p, const Vector& w) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.target.size(); ++i) {
    const double r = p.design.row(i).dot(w) - p.target[i];
    total += p.weights[i] * r * r;
  }
  return total;
}

TEST(Regression, LossIsWeightedSquaredResidual) {
  std::mt19937_64 gen(1);
  const RegressionProblem p = random_problem(8, 3, gen);
  const Vector w = random_normal(3, gen);
  EXPECT_NEAR(loss(p, w), direct_loss(p, w), 1e-14);
}

TEST(Regression, FullRankSolutionSolvesNormalEquations) {
  std::mt19937_64 gen(2);
  const RegressionProblem p = random_problem(12, 4, gen);
  const RegressionSolution sol = solve_exact(p);
  const Matrix sigma = weighted_covariance(p.design, p.weights.probs());
  const Vector rhs = p.design.transpose() * p.weights.probs().asDiagonal() * p.target;
  const Vector expected = sigma.llt().solve(rhs);
  EXPECT_LT((sol.w - expected).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(sol.loss_at_opt, direct_loss(p, expected), 1e-12);
}

TEST(Regression, RankDeficientGivesMinimumNorm) {
  std::mt19937_64 gen(3);
  RegressionProblem p = random_problem(10, 3, gen);
  Matrix design(10, 5);
  design << p.design, p.design.col(0) + p.design.col(1), 2.0 * p.design.col(2);
  p.design = design;
  const RegressionSolution sol = solve_exact(p);
  const Vector sqrt_w = p.weights.probs().cwiseSqrt();
  const Vector expected = (sqrt_w.asDiagonal() * p.design)
                              .completeOrthogonalDecomposition()
                              .solve(sqrt_w.cwiseProduct(p.target));
  EXPECT_LT((sol.w - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Regression, GradientMatchesFiniteDifferences) {
  std::mt19937_64 gen(4);
  const RegressionProblem p = random_problem(9, 4, gen);
  const Vector w = random_normal(4, gen);
  const Vector grad = loss_gradient(p, w);
  for (int i = 0; i < 4; ++i) {
    Vector up = w, down = w;
    up[i] += 1e-6;
    down[i] -= 1e-6;
    EXPECT_NEAR(grad[i], (direct_loss(p, up) - direct_loss(p, down)) / 2e-6, 1e-7);
  }
  EXPECT_LT(loss_gradient(p, solve_exact(p).w).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Regression, SecondMomentIdentity) {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 50; ++t) {
    const RegressionProblem p = random_problem(6 + t % 10, 1 + t % 7, gen);
    const auto [excess, norm] = second_moment_identity_check(p, random_normal(1 + t % 7, gen));
    EXPECT_NEAR(excess, norm, 1e-8 * std::max(1.0, excess));
    EXPECT_GE(excess, -1e-12);
  }
}

TEST(Regression, RejectsMismatchedShapes) {
  std::mt19937_64 gen(6);
  RegressionProblem p = random_problem(5, 2, gen);
  p.target = Vector::Zero(4);
  EXPECT_THROW(p.check(), InvariantError);
}

TEST(Compatible, OneHotQRegressionRecoversQ) {
  const FiniteMdp mdp = generate_random_mdp(4, 3, 0.9, 1);
  const FeatureMap f = FeatureMap::one_hot(4, 3);
  std::mt19937_64 gen(7);
  const PolicyTable pi = testing::random_policy(4, 3, gen);
  const StateActionDistribution weights = uniform_state_action(4, 3);
  const RegressionProblem p = compatible_problem(mdp, pi, f, CompatibleLoss::kQ, weights);
  const RegressionSolution sol = solve_exact(p);
  const Matrix q = testing::q_from_values(mdp, testing::series_values(mdp, pi));
  EXPECT_LT((sol.w - flatten_pairs(q)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(sol.loss_at_opt, 0.0, 1e-20);
}

TEST(Compatible, AdvantageProblemUsesCenteredDesign) {
  const FiniteMdp mdp = generate_random_mdp(3, 2, 0.8, 2);
  const FeatureMap f = FeatureMap::gaussian(3, 2, 2, 3);
  std::mt19937_64 gen(8);
  const PolicyTable pi = testing::random_policy(3, 2, gen);
  const RegressionProblem p =
      compatible_problem(mdp, pi, f, CompatibleLoss::kAdvantage, uniform_state_action(3, 2));
  EXPECT_LT((p.design - centered_features(pi, f)).cwiseAbs().maxCoeff(), 1e-15);
  const Vector v = testing::series_values(mdp, pi);
  const Matrix q = testing::q_from_values(mdp, v);
  for (int s = 0; s < 3; ++s) {
    for (int a = 0; a < 2; ++a) EXPECT_NEAR(p.target[s * 2 + a], q(s, a) - v[s], 1e-10);
  }
}

TEST(ErrorReport, TabularErrorsVanishAtOptimum) {
  const FiniteMdp mdp = generate_random_mdp(5, 3, 0.9, 3);
  const FeatureMap f = FeatureMap::one_hot(5, 3);
  const PolicyTable pi = PolicyTable::uniform(5, 3);
  const StateActionDistribution nu = uniform_state_action(5, 3);
  const StateDistribution rho = StateDistribution::uniform(5);
  const PolicyTable star = optimal_policy(mdp);
  const Vector w = flatten_pairs(evaluate_policy(mdp, pi).q);
  const ErrorReport report = error_report(mdp, pi, f, nu, rho, star, w);
  EXPECT_NEAR(report.eps_stat, 0.0, 1e-20);
  EXPECT_NEAR(report.eps_approx, 0.0, 1e-20);
  EXPECT_NEAR(report.eps_bias, 0.0, 1e-20);
}

TEST(ErrorReport, DecompositionMatchesDirectLosses) {
  const FiniteMdp mdp = generate_random_mdp(5, 3, 0.9, 4);
  const FeatureMap f = FeatureMap::reduced(5, 3, 4, 2);
  const PolicyTable pi = PolicyTable::uniform(5, 3);
  const StateActionDistribution nu = uniform_state_action(5, 3);
  const StateDistribution rho = StateDistribution::uniform(5);
  const PolicyTable star = optimal_policy(mdp);
  std::mt19937_64 gen(9);
  const Vector w = random_normal(4, gen);
  const ErrorReport report = error_report(mdp, pi, f, nu, rho, star, w);

  const Vector d_tilde = testing::series_pair_visitation(mdp, pi, nu.probs());
  const Vector d_star = testing::series_visitation(mdp, star, rho.probs());
  RegressionProblem on_run = compatible_problem(mdp, pi, f, CompatibleLoss::kQ,
                                                StateActionDistribution::normalized(d_tilde));
  const Vector w_star = solve_exact(on_run).w;
  EXPECT_NEAR(report.eps_stat, direct_loss(on_run, w) - direct_loss(on_run, w_star), 1e-9);
  EXPECT_NEAR(report.eps_approx, direct_loss(on_run, w_star), 1e-9);
  RegressionProblem comparator = on_run;
  Vector tilde_star(15);
  for (int s = 0; s < 5; ++s) {
    for (int a = 0; a < 3; ++a) tilde_star[s * 3 + a] = d_star[s] / 3.0;
  }
  comparator.weights = StateActionDistribution::normalized(tilde_star);
  EXPECT_NEAR(report.eps_bias, direct_loss(comparator, w_star), 1e-9);
  EXPECT_GT(report.eps_approx, 0.0);
}

TEST(ComparatorMeasure, SpreadsUniformlyOverActions) {
  Vector d(2);
  d << 0.25, 0.75;
  const StateActionDistribution m = comparator_measure(StateDistribution(d), 3);
  EXPECT_DOUBLE_EQ(m[0], 0.25 / 3);
  EXPECT_DOUBLE_EQ(m[5], 0.75 / 3);
}

}  // namespace
}  // namespace npg
