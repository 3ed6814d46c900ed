#include "oracles.hpp"

#include <npg/npg_driver.hpp>

#include <gtest/gtest.h>

namespace npg {
namespace {

RunOptions exact_options(int S, int A, double gamma, int iterations) {
  RunOptions options;
  options.rho = StateDistribution::uniform(S);
  options.nu = uniform_state_action(S, A);
  options.schedule = StepSchedule::geometric(default_eta0(A, gamma), gamma);
  options.iterations = iterations;
  return options;
}

TEST(StepSchedule, GeometricAndConstant) {
  const StepSchedule g = StepSchedule::geometric(0.2, 0.9);
  for (int k = 0; k < 10; ++k) EXPECT_NEAR(g.eta(k), 0.2 / std::pow(0.9, k), 1e-12 * g.eta(k));
  EXPECT_NEAR(g.log_eta(5000), std::log(0.2) - 5000 * std::log(0.9), 1e-9);
  EXPECT_DOUBLE_EQ(g.eta0(), 0.2);
  const StepSchedule c = StepSchedule::constant(3.0);
  EXPECT_EQ(c.eta(0), 3.0);
  EXPECT_EQ(c.eta(77), 3.0);
  EXPECT_THROW(StepSchedule::geometric(0.0, 0.9), InvariantError);
}

TEST(StepSchedule, DefaultEta0) {
  EXPECT_NEAR(default_eta0(5, 0.9), (0.1 / 0.9) * std::log(5.0), 1e-15);
  EXPECT_EQ(default_eta0(1, 0.9), 1e-8);
}

TEST(Driver, TraceShapeAndFinalRow) {
  const FiniteMdp mdp = generate_random_mdp(5, 3, 0.9, 11);
  const RunTrace trace = run(mdp, FeatureMap::one_hot(5, 3), exact_options(5, 3, 0.9, 7));
  ASSERT_EQ(trace.records.size(), 8u);
  for (int k = 0; k <= 7; ++k) EXPECT_EQ(trace.records[k].k, k);
  EXPECT_TRUE(std::isnan(trace.records.back().eps_stat));
  EXPECT_TRUE(std::isnan(trace.records.back().coefficients.c_nu));
  EXPECT_TRUE(std::isnan(trace.records.front().running_average_gap));
  EXPECT_EQ(trace.headline_bound, TheoremId::kT1);
}

TEST(Driver, ValuesMatchSeriesOracle) {
  const FiniteMdp mdp = generate_random_mdp(4, 3, 0.8, 12);
  const FeatureMap f = FeatureMap::gaussian(4, 3, 5, 3);
  const RunOptions options = exact_options(4, 3, 0.8, 5);
  const RunTrace trace = run(mdp, f, options);
  const double v_star = options.rho.probs().dot(testing::value_iteration(mdp));
  for (const IterationRecord& r : trace.records) {
    const PolicyTable pi(testing::brute_softmax(f, r.theta));
    const double v = options.rho.probs().dot(testing::series_values(mdp, pi));
    EXPECT_NEAR(r.value, v, 1e-9);
    EXPECT_NEAR(r.gap, v - v_star, 1e-9);
  }
}

TEST(Driver, RunningAverageIsMeanOfEarlierGaps) {
  const FiniteMdp mdp = generate_random_mdp(4, 2, 0.9, 13);
  const RunTrace trace = run(mdp, FeatureMap::one_hot(4, 2), exact_options(4, 2, 0.9, 6));
  double total = 0.0;
  for (std::size_t k = 1; k < trace.records.size(); ++k) {
    total += trace.records[k - 1].gap;
    EXPECT_NEAR(trace.records[k].running_average_gap, total / k, 1e-13);
  }
}

class TabularRun : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(TabularRun, ExactUpdatesImproveMonotonically) {
  const FiniteMdp mdp = generate_random_mdp(6, 4, 0.9, GetParam());
  for (Algorithm alg : {Algorithm::kQnpg, Algorithm::kNpg}) {
    RunOptions options = exact_options(6, 4, 0.9, 15);
    options.algorithm = alg;
    const RunTrace trace = run(mdp, FeatureMap::one_hot(6, 4), options);
    for (std::size_t k = 1; k < trace.records.size(); ++k) {
      EXPECT_LE(trace.records[k].gap, trace.records[k - 1].gap + 1e-12);
    }
    for (const IterationRecord& r : trace.records) EXPECT_GE(r.gap, -1e-12);
    for (std::size_t k = 0; k + 1 < trace.records.size(); ++k) {
      EXPECT_LT(trace.records[k].pmd_deviation, 1e-10);
    }
    EXPECT_TRUE(std::isnan(trace.records.back().pmd_deviation));
  }
}

TEST_P(TabularRun, BoundsDominateGaps) {
  const FiniteMdp mdp = generate_random_mdp(6, 4, 0.9, GetParam());
  const RunTrace trace = run(mdp, FeatureMap::one_hot(6, 4), exact_options(6, 4, 0.9, 10));
  for (const IterationRecord& r : trace.records) {
    EXPECT_GE(r.bounds.at("T1") + 1e-12, r.gap);
    EXPECT_GE(r.bounds.at("T3") + 1e-12, r.gap);
    EXPECT_EQ(r.bound, r.bounds.at("T1"));
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, TabularRun, ::testing::Values(1, 2, 3, 4));

TEST(Driver, ApplicableBoundsFollowConfiguration) {
  const FiniteMdp mdp = generate_random_mdp(3, 2, 0.9, 14);
  RunOptions options = exact_options(3, 2, 0.9, 2);
  options.schedule = StepSchedule::constant(2.0);
  RunTrace trace = run(mdp, FeatureMap::one_hot(3, 2), options);
  EXPECT_EQ(trace.headline_bound, TheoremId::kT2);
  EXPECT_EQ(trace.records.front().bounds.size(), 1u);
  EXPECT_TRUE(std::isinf(trace.records.front().bound));
  options.algorithm = Algorithm::kNpg;
  trace = run(mdp, FeatureMap::one_hot(3, 2), options);
  EXPECT_EQ(trace.headline_bound, TheoremId::kT5);
  for (std::size_t k = 1; k < trace.records.size(); ++k) {
    EXPECT_GE(trace.records[k].bound + 1e-12, trace.records[k].running_average_gap);
  }
}

TEST(Driver, RejectsMismatchedShapes) {
  const FiniteMdp mdp = generate_random_mdp(3, 2, 0.9, 15);
  EXPECT_THROW(run(mdp, FeatureMap::one_hot(3, 3), exact_options(3, 2, 0.9, 1)), InvariantError);
  RunOptions options = exact_options(3, 2, 0.9, 1);
  options.rho = StateDistribution::uniform(4);
  EXPECT_THROW(run(mdp, FeatureMap::one_hot(3, 2), options), InvariantError);
}

TEST(Driver, SgdRunsAreReproducibleAcrossWorkers) {
  const FiniteMdp mdp = generate_random_mdp(4, 2, 0.8, 16);
  RunOptions options = exact_options(4, 2, 0.8, 3);
  options.mode = SolveMode::kSgd;
  options.sgd.n_steps = 500;
  options.sgd.seed = 9;
  options.sgd.workers = 1;
  const RunTrace one = run(mdp, FeatureMap::one_hot(4, 2), options);
  options.sgd.workers = 3;
  const RunTrace three = run(mdp, FeatureMap::one_hot(4, 2), options);
  ASSERT_EQ(one.records.size(), three.records.size());
  for (std::size_t k = 0; k < one.records.size(); ++k) {
    EXPECT_EQ(one.records[k].theta, three.records[k].theta);
    EXPECT_EQ(one.records[k].samples, three.records[k].samples);
  }
  EXPECT_EQ(one.headline_bound, TheoremId::kT3);
  EXPECT_GT(one.records.front().samples, 0);
}

}  // namespace
}  // namespace npg
