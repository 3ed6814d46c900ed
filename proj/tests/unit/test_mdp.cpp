#include <npg/mdp.hpp>

#include <gtest/gtest.h>

namespace npg {
namespace {

FiniteMdp two_state() {
  FiniteMdp mdp;
  mdp.n_states = 2;
  mdp.n_actions = 2;
  mdp.gamma = 0.9;
  mdp.transition = Matrix(4, 2);
  mdp.transition << 1, 0, 0, 1, 0.5, 0.5, 0, 1;
  mdp.cost = Matrix(2, 2);
  mdp.cost << 0.2, 0.4, 1.0, 0.0;
  return mdp;
}

TEST(Validate, AcceptsWellFormed) { EXPECT_NO_THROW(validate(two_state())); }

TEST(Validate, RejectsRowNotSummingToOne) {
  FiniteMdp mdp = two_state();
  mdp.transition(1, 1) = 0.9;
  EXPECT_THROW(validate(mdp), InvariantError);
}

TEST(Validate, RejectsNegativeProbability) {
  FiniteMdp mdp = two_state();
  mdp.transition.row(2) << 1.5, -0.5;
  EXPECT_THROW(validate(mdp), InvariantError);
}

TEST(Validate, RejectsCostOutsideUnitInterval) {
  FiniteMdp mdp = two_state();
  mdp.cost(0, 0) = 1.5;
  EXPECT_THROW(validate(mdp), InvariantError);
  mdp.cost(0, 0) = -0.1;
  EXPECT_THROW(validate(mdp), InvariantError);
}

TEST(Validate, RejectsDiscountOutOfRange) {
  FiniteMdp mdp = two_state();
  mdp.gamma = 1.0;
  EXPECT_THROW(validate(mdp), InvariantError);
  mdp.gamma = -0.1;
  EXPECT_THROW(validate(mdp), InvariantError);
}

TEST(Validate, RejectsShapeMismatch) {
  FiniteMdp mdp = two_state();
  mdp.transition = Matrix::Constant(3, 2, 0.5);
  EXPECT_THROW(validate(mdp), InvariantError);
}

TEST(RandomMdp, DeterministicAndValid) {
  const FiniteMdp a = generate_random_mdp(20, 5, 0.9, 7);
  const FiniteMdp b = generate_random_mdp(20, 5, 0.9, 7);
  EXPECT_NO_THROW(validate(a));
  EXPECT_EQ(a.transition, b.transition);
  EXPECT_EQ(a.cost, b.cost);
  EXPECT_GT(a.transition.minCoeff(), 0.0);
  const FiniteMdp c = generate_random_mdp(20, 5, 0.9, 8);
  EXPECT_NE(a.cost, c.cost);
}

TEST(RandomMdp, ManySeedsValidate) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_NO_THROW(validate(generate_random_mdp(3 + seed % 5, 1 + seed % 4, 0.5, seed)));
  }
}

TEST(ChainMdp, Structure) {
  const FiniteMdp mdp = generate_chain_mdp(5, 0.8);
  EXPECT_NO_THROW(validate(mdp));
  EXPECT_EQ(mdp.n_actions, 2);
  EXPECT_DOUBLE_EQ(mdp.p(2, 0, 1), 1.0);
  EXPECT_DOUBLE_EQ(mdp.p(2, 1, 3), 1.0);
  EXPECT_DOUBLE_EQ(mdp.p(0, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(mdp.p(4, 0, 4), 1.0);
  EXPECT_DOUBLE_EQ(mdp.p(4, 1, 4), 1.0);
  EXPECT_DOUBLE_EQ(mdp.cost(4, 0), 0.0);
  EXPECT_DOUBLE_EQ(mdp.cost(1, 1), 1.0);
}

TEST(Simplex, ValidatesAndNormalizes) {
  EXPECT_THROW(StateDistribution(Vector::Constant(3, 0.5)), InvariantError);
  Vector v(3);
  v << 1.0, 2.0, 1.0;
  const auto d = StateDistribution::normalized(v);
  EXPECT_DOUBLE_EQ(d[1], 0.5);
  EXPECT_THROW(StateDistribution::normalized(Vector::Zero(3)), InvariantError);
  const auto point = StateActionDistribution::point_mass(4, 2);
  EXPECT_DOUBLE_EQ(point[2], 1.0);
  EXPECT_DOUBLE_EQ(uniform_state_action(2, 3)[5], 1.0 / 6.0);
}

}  // namespace
}  // namespace npg
