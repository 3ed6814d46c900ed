#include "support.hpp"

#include <cmath>
#include <random>

namespace npg::experiments {

namespace {

class Draws {
 public:
  Draws(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(rng_.uniform() * static_cast<double>(hi - lo + 1));
  }
  Vector normal(int n, double scale = 1.0) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = scale * normal_(rng_);
    return v;
  }
  /// Strictly positive simplex point.
  Vector simplex(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = 0.05 + rng_.uniform();
    return v / v.sum();
  }
  std::uint64_t seed() { return rng_.next_u64(); }

 private:
  RngStream rng_;
  std::normal_distribution<double> normal_;
};

double max_abs(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

double value_at(const FiniteMdp& mdp, const Vector& theta, const FeatureMap& features,
                const StateDistribution& rho) {
  return expected_value(evaluate_policy(mdp, policy_table(theta, features)), rho);
}

}  // namespace

RecipeResult recipe_identity_checks(const Config& config) {
  constexpr int kDifferenceTriples = 100;
  constexpr double kDifferenceTolerance = 1e-10;
  constexpr int kMirrorSteps = 50;
  constexpr double kMirrorTolerance = 1e-10;
  constexpr int kFisherInstances = 20;
  constexpr double kFisherTolerance = 1e-8;
  constexpr int kThreePointDraws = 1000;
  constexpr int kMomentProblems = 100;
  constexpr double kMomentTolerance = 1e-8;
  constexpr int kGradientInstances = 10;
  constexpr double kGradientStep = 1e-5;
  constexpr double kGradientTolerance = 1e-6;
  constexpr int kKappaInstances = 20;
  constexpr double kKappaTolerance = 1e-10;
  constexpr double kScaleTolerance = 1e-8;
  constexpr int kEquivalenceInstances = 5;
  constexpr double kEquivalenceTolerance = 1e-8;

  RecipeResult result;
  const std::uint64_t seed = config.get_uint64("seed");
  const std::uint64_t mdp_seed = config.get_uint64("mdp.seed");
  const double gamma = config.get_double("gamma");
  const int S = positive_int(config, "mdp.n_states");
  const int A = positive_int(config, "mdp.n_actions");

  {
    Draws draws(seed, 1);
    double worst = 0.0;
    for (int t = 0; t < kDifferenceTriples; ++t) {
      const int n_states = draws.integer(2, 8);
      const int n_actions = draws.integer(2, 5);
      const FiniteMdp mdp = generate_random_mdp(n_states, n_actions, draws.uniform(0.3, 0.97),
                                                mdp_seed + static_cast<std::uint64_t>(t));
      const FeatureMap tabular = FeatureMap::one_hot(n_states, n_actions);
      const PolicyTable pi = policy_table(draws.normal(tabular.dim(), 2.0), tabular);
      const PolicyTable pi_prime = policy_table(draws.normal(tabular.dim(), 2.0), tabular);
      const StateDistribution rho(draws.simplex(n_states));
      const PerformanceDifference pd = performance_difference(mdp, pi, pi_prime, rho);
      worst = std::max(worst, std::abs(pd.value_gap - pd.advantage_form));
    }
    result.assertions.push_back(make_assertion(
        8, "performance difference identity on 100 random triples (1e-10)",
        worst <= kDifferenceTolerance, "max error " + show(worst)));
  }

  {
    Draws draws(seed, 2);
    const int dim = std::max(2, S * A / 3);
    double worst = 0.0;
    for (int t = 0; t < kMirrorSteps; ++t) {
      const FeatureMap features = FeatureMap::gaussian(S, A, dim, draws.seed());
      const Vector theta = draws.normal(dim);
      const Vector w = draws.normal(dim);
      const double eta = draws.uniform(0.05, 3.0);
      const PolicyTable policy = policy_table(theta, features);
      const PolicyTable next = policy_table(theta - eta * w, features);
      const Matrix raw = pair_scores(features.phi(), w, S, A);
      const Matrix centered = pair_scores(centered_features(policy, features), w, S, A);
      worst = std::max(worst, max_abs(mirror_descent_policy_update(policy, raw, eta).probs(),
                                      next.probs()));
      worst = std::max(worst, max_abs(mirror_descent_policy_update(policy, centered, eta).probs(),
                                      next.probs()));
    }
    result.assertions.push_back(make_assertion(
        8, "parameter update equals mirror descent, raw and centered scores, 50 steps (1e-10)",
        worst <= kMirrorTolerance, "max entry difference " + show(worst)));
  }

  {
    Draws draws(seed, 3);
    double worst = 0.0;
    for (int t = 0; t < kFisherInstances; ++t) {
      const FiniteMdp mdp =
          generate_random_mdp(S, A, gamma, mdp_seed + 1000 + static_cast<std::uint64_t>(t));
      const int dim = draws.integer(2, std::max(2, S * A / 2));
      const FeatureMap features = FeatureMap::gaussian(S, A, dim, draws.seed());
      const Vector theta = draws.normal(dim, 0.5);
      const StateDistribution rho(draws.simplex(S));
      const PolicyTable policy = policy_table(theta, features);
      const Vector direction = npg_direction_fisher(mdp, theta, features, rho);
      const StateActionDistribution weights = state_action_visitation_bar(mdp, policy, rho);
      const Vector w_star = solve_exact(compatible_problem(mdp, policy, features,
                                                           CompatibleLoss::kAdvantage, weights))
                                .w;
      const Vector expected = w_star / (1.0 - gamma);
      const double scale = std::max(1.0, expected.cwiseAbs().maxCoeff());
      worst = std::max(worst, (direction - expected).cwiseAbs().maxCoeff() / scale);
    }
    result.assertions.push_back(make_assertion(
        8, "pinv(F) grad V = w*/(1-gamma) on 20 instances (1e-8)", worst <= kFisherTolerance,
        "max relative error " + show(worst)));
  }

  {
    Draws draws(seed, 4);
    int failures = 0;
    for (int t = 0; t < kThreePointDraws; ++t) {
      const int n = draws.integer(2, 8);
      const Vector q = draws.simplex(n);
      const Vector u = draws.simplex(n);
      const Vector g = draws.normal(n, draws.uniform(0.1, 10.0));
      if (!three_point_check(q, g, draws.uniform(0.01, 5.0), u)) ++failures;
    }
    result.assertions.push_back(make_assertion(8, "three-point descent inequality, 1000 draws",
                                               failures == 0,
                                               std::to_string(failures) + " violations"));
  }

  {
    Draws draws(seed, 5);
    double worst = 0.0;
    for (int t = 0; t < kMomentProblems; ++t) {
      const int rows = draws.integer(3, 30);
      const int cols = draws.integer(1, rows + 3);
      RegressionProblem problem;
      problem.design = Matrix(rows, cols);
      for (int c = 0; c < cols; ++c) problem.design.col(c) = draws.normal(rows);
      problem.target = draws.normal(rows);
      problem.weights = StateActionDistribution(draws.simplex(rows));
      const auto [excess, norm] = second_moment_identity_check(problem, draws.normal(cols));
      worst = std::max(worst, std::abs(excess - norm) / std::max(1.0, std::abs(excess)));
    }
    result.assertions.push_back(make_assertion(
        8, "L(w) - L(w*) = ||w - w*||^2_Sigma on 100 problems (1e-8)",
        worst <= kMomentTolerance, "max relative error " + show(worst)));
  }

  {
    Draws draws(seed, 6);
    double worst = 0.0;
    for (int t = 0; t < kGradientInstances; ++t) {
      const FiniteMdp mdp =
          generate_random_mdp(S, A, gamma, mdp_seed + 2000 + static_cast<std::uint64_t>(t));
      const int dim = draws.integer(2, S * A);
      const FeatureMap features = FeatureMap::gaussian(S, A, dim, draws.seed());
      const Vector theta = draws.normal(dim, 0.5);
      const StateDistribution rho(draws.simplex(S));
      const Vector grad = policy_gradient(mdp, theta, features, rho);
      Vector numeric(dim);
      for (int i = 0; i < dim; ++i) {
        Vector up = theta;
        Vector down = theta;
        up[i] += kGradientStep;
        down[i] -= kGradientStep;
        numeric[i] = (value_at(mdp, up, features, rho) - value_at(mdp, down, features, rho)) /
                     (2.0 * kGradientStep);
      }
      const double scale = std::max(1.0, grad.cwiseAbs().maxCoeff());
      worst = std::max(worst, (grad - numeric).cwiseAbs().maxCoeff() / scale);
    }
    result.assertions.push_back(make_assertion(
        8, "centered-feature gradient matches central differences (1e-6)",
        worst <= kGradientTolerance, "max relative error " + show(worst)));
  }

  {
    Draws draws(seed, 7);
    double worst = 0.0;
    double worst_scaled = 0.0;
    for (int t = 0; t < kKappaInstances; ++t) {
      const FiniteMdp mdp =
          generate_random_mdp(S, A, gamma, mdp_seed + 3000 + static_cast<std::uint64_t>(t));
      const StateActionDistribution nu(draws.simplex(S * A));
      const StateDistribution rho(draws.simplex(S));
      const StateDistribution d_star = state_visitation(mdp, optimal_policy(mdp), rho);
      const double kappa =
          relative_condition_number(FeatureMap::one_hot(S, A), d_star, nu, A);
      double closed = 0.0;
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) closed = std::max(closed, d_star[s] / A / nu[mdp.pair(s, a)]);
      }
      worst = std::max(worst, std::abs(kappa - closed) / closed);

      const FeatureMap features = FeatureMap::gaussian(S, A, draws.integer(1, S * A), draws.seed());
      const double base = relative_condition_number(features, d_star, nu, A);
      const double scaled =
          relative_condition_number(features.scaled(draws.uniform(0.1, 10.0)), d_star, nu, A);
      if (std::isfinite(base)) {
        worst_scaled = std::max(worst_scaled, std::abs(scaled - base) / base);
      } else if (std::isfinite(scaled)) {
        worst_scaled = std::numeric_limits<double>::infinity();
      }
    }
    result.assertions.push_back(make_assertion(
        9, "one-hot kappa_nu equals max d-tilde*/nu on 20 instances (1e-10)",
        worst <= kKappaTolerance, "max relative error " + show(worst)));
    result.assertions.push_back(make_assertion(
        0, "kappa_nu unchanged by rescaling the features", worst_scaled <= kScaleTolerance,
        "max relative change " + show(worst_scaled)));
  }

  {
    double worst = 0.0;
    for (int t = 0; t < kEquivalenceInstances; ++t) {
      const FiniteMdp mdp =
          generate_random_mdp(S, A, gamma, mdp_seed + 4000 + static_cast<std::uint64_t>(t));
      const FeatureMap features = FeatureMap::one_hot(S, A);
      RunOptions options;
      options.rho = StateDistribution::uniform(S);
      options.nu = uniform_state_action(S, A);
      options.schedule = StepSchedule::geometric(default_eta0(A, gamma), gamma);
      options.iterations = 10;
      const RunTrace q_trace = run_qnpg(mdp, features, options);
      const RunTrace a_trace = run_npg(mdp, features, options);
      for (std::size_t k = 0; k < q_trace.records.size(); ++k) {
        worst = std::max(worst, max_abs(q_trace.records[k].policy.probs(),
                                        a_trace.records[k].policy.probs()));
      }
    }
    result.assertions.push_back(make_assertion(
        0, "one-hot exact NPG and Q-NPG produce the same policies (1e-8)",
        worst <= kEquivalenceTolerance, "max entry difference " + show(worst)));
  }
  return result;
}

}  // namespace npg::experiments
