#include "support.hpp"

#include <npg/linalg.hpp>
#include <npg/serialization.hpp>

#include <cmath>
#include <random>
#include <sstream>

namespace npg::experiments {

namespace {

struct RunningMean {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  [[nodiscard]] double std_error() const {
    if (n < 2) return std::numeric_limits<double>::infinity();
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

Vector random_theta(int dim, std::uint64_t seed) {
  RngStream rng(seed, 0x7e7a);
  std::normal_distribution<double> normal;
  Vector theta(dim);
  for (int i = 0; i < dim; ++i) theta[i] = normal(rng);
  return theta;
}

}  // namespace

RecipeResult recipe_sampler_validation(const Config& config) {
  constexpr double kTvLimit = 0.01;
  constexpr double kStdErrors = 3.0;
  constexpr double kRuntimeLimitSeconds = 30.0;
  constexpr int kGeometricBins = 30;
  // 0.999 quantile of chi-square with kGeometricBins degrees of freedom.
  constexpr double kChiSquareCritical = 59.703;

  RecipeResult result;
  const Stopwatch clock;
  const Instance inst = build_instance(config, 0);
  const FiniteMdp& mdp = inst.mdp;
  const std::int64_t draws = config.get_int("sampler.draws");
  if (draws < 2) throw ConfigError("config key 'sampler.draws': expected at least 2");
  const std::uint64_t seed = config.get_uint64("seed");
  const int workers = positive_int(config, "workers");

  const Vector theta = random_theta(inst.features.dim(), seed);
  const PolicyTable policy = policy_table(theta, inst.features);
  const StateActionDistribution nu = build_nu(config, mdp);
  const StateActionDistribution d_tilde = state_action_visitation_tilde(mdp, policy, nu);
  const ValueBundle values = evaluate_policy(mdp, policy);
  const RolloutSampler sampler(mdp, policy, nu);

  const auto q_draws = draw_samples(sampler, false, seed, 0, 0, draws, workers);
  const auto a_draws = draw_samples(sampler, true, seed, 1, 0, draws, workers);

  const int pairs = mdp.n_pairs();
  std::vector<RunningMean> q_stats(static_cast<std::size_t>(pairs));
  std::vector<RunningMean> a_stats(static_cast<std::size_t>(pairs));
  RunningMean length;
  std::vector<double> bins(kGeometricBins + 1, 0.0);
  for (const RolloutSample& x : q_draws) {
    q_stats[static_cast<std::size_t>(mdp.pair(x.state, x.action))].add(x.q_hat);
    length.add(static_cast<double>(x.accept_time + 1));
    bins[static_cast<std::size_t>(std::min<std::int64_t>(x.accept_time, kGeometricBins))] += 1.0;
  }
  for (const RolloutSample& x : a_draws) {
    a_stats[static_cast<std::size_t>(mdp.pair(x.state, x.action))].add(x.estimate);
  }

  double tv = 0.0;
  int q_misses = 0;
  int a_misses = 0;
  double worst_q_z = 0.0;
  double worst_a_z = 0.0;
  std::ostringstream table;
  table << "state,action,d_tilde,empirical,q,q_hat_mean,q_hat_se,adv,a_hat_mean,a_hat_se\n";
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      const auto p = static_cast<std::size_t>(mdp.pair(s, a));
      const RunningMean& qs = q_stats[p];
      const RunningMean& as = a_stats[p];
      const double empirical = static_cast<double>(qs.n) / static_cast<double>(draws);
      tv += 0.5 * std::abs(empirical - d_tilde[mdp.pair(s, a)]);
      const double q_z = std::abs(qs.mean - values.q(s, a)) / qs.std_error();
      const double a_z = std::abs(as.mean - values.adv(s, a)) / as.std_error();
      worst_q_z = std::max(worst_q_z, q_z);
      worst_a_z = std::max(worst_a_z, a_z);
      if (!(q_z <= kStdErrors)) ++q_misses;
      if (!(a_z <= kStdErrors)) ++a_misses;
      table << s << ',' << a << ',' << format_double(d_tilde[mdp.pair(s, a)]) << ','
            << format_double(empirical) << ',' << format_double(values.q(s, a)) << ','
            << format_double(qs.mean) << ',' << format_double(qs.std_error()) << ','
            << format_double(values.adv(s, a)) << ',' << format_double(as.mean) << ','
            << format_double(as.std_error()) << '\n';
    }
  }
  result.tables.push_back({"sampler_pairs.csv", table.str()});

  const double gamma = mdp.gamma;
  const double expected_length = 1.0 / (1.0 - gamma);
  const double length_z = std::abs(length.mean - expected_length) / length.std_error();

  double chi_square = 0.0;
  const double n = static_cast<double>(draws);
  for (int k = 0; k <= kGeometricBins; ++k) {
    const double expected = k < kGeometricBins ? n * (1.0 - gamma) * std::pow(gamma, k)
                                               : n * std::pow(gamma, kGeometricBins);
    const double diff = bins[static_cast<std::size_t>(k)] - expected;
    chi_square += diff * diff / expected;
  }
  const double seconds = clock.seconds();

  result.assertions.push_back(make_assertion(4, "TV(empirical accepted pairs, d-tilde) <= 0.01",
                                             tv <= kTvLimit, "TV " + show(tv)));
  result.assertions.push_back(make_assertion(
      4, "mean acceptance length within 3 standard errors of 1/(1-gamma)",
      length_z <= kStdErrors,
      "mean " + show(length.mean) + ", expected " + show(expected_length) + ", z " +
          show(length_z)));
  result.assertions.push_back(make_assertion(
      4, "per-pair mean Q-hat within 3 standard errors of Q", q_misses == 0,
      std::to_string(q_misses) + " of " + std::to_string(pairs) + " outside, max z " +
          show(worst_q_z)));
  result.assertions.push_back(make_assertion(
      4, "per-pair mean A-hat within 3 standard errors of A", a_misses == 0,
      std::to_string(a_misses) + " of " + std::to_string(pairs) + " outside, max z " +
          show(worst_a_z)));
  result.assertions.push_back(make_assertion(4, "runtime < 30 s", seconds < kRuntimeLimitSeconds,
                                             show(seconds) + " s"));
  result.assertions.push_back(make_assertion(
      0, "acceptance time is geometric (chi-square, 30 bins plus tail, p = 0.001)",
      chi_square <= kChiSquareCritical, "statistic " + show(chi_square)));

  for (const double moment_gamma : {0.5, 0.9}) {
    FiniteMdp variant = mdp;
    variant.gamma = moment_gamma;
    const MomentEstimate m =
        estimate_q_hat_second_moment(variant, policy, nu, draws, seed + 1, workers);
    const double limit = 2.0 / ((1.0 - moment_gamma) * (1.0 - moment_gamma));
    result.assertions.push_back(make_assertion(
        5, "E[Q-hat^2] <= 2/(1-gamma)^2 + 3 stderr at gamma = " + show(moment_gamma),
        m.mean <= limit + kStdErrors * m.std_error,
        "estimate " + show(m.mean) + " +- " + show(m.std_error) + ", limit " + show(limit)));
  }
  return result;
}

RecipeResult recipe_sgd_rate(const Config& config) {
  constexpr double kRatioLow = 2.0;
  constexpr double kRatioHigh = 8.0;
  constexpr double kNpgRatioLow = 1.4;
  constexpr double kNpgRatioHigh = 2.9;
  constexpr std::int64_t kNpgFactor = 2;
  constexpr double kRuntimeLimitSeconds = 120.0;

  RecipeResult result;
  const Stopwatch clock;
  const Instance inst = build_instance(config, 0);
  const FiniteMdp& mdp = inst.mdp;
  const FeatureMap& features = inst.features;
  const int seeds = positive_int(config, "seeds");
  const std::int64_t steps = config.get_int("sgd.steps");
  const std::int64_t factor = config.get_int("sgd_rate.factor");
  if (steps < 1) throw ConfigError("config key 'sgd.steps': expected a positive integer");
  if (factor < 2) throw ConfigError("config key 'sgd_rate.factor': expected at least 2");
  const std::uint64_t seed = config.get_uint64("seed");
  const int workers = positive_int(config, "workers");

  const Vector theta = Vector::Zero(features.dim());
  const PolicyTable policy = policy_table(theta, features);
  const StateActionDistribution nu = build_nu(config, mdp);
  const StateActionDistribution d_tilde = state_action_visitation_tilde(mdp, policy, nu);
  const RegressionProblem q_problem =
      compatible_problem(mdp, policy, features, CompatibleLoss::kQ, d_tilde);
  const RegressionProblem a_problem =
      compatible_problem(mdp, policy, features, CompatibleLoss::kAdvantage, d_tilde);
  const RegressionSolution q_opt = solve_exact(q_problem);
  const RegressionSolution a_opt = solve_exact(a_problem);

  const double alpha = config.is_auto("sgd.step_size") ? default_qnpg_step_size(features)
                                                       : config.get_double("sgd.step_size");

  std::ostringstream table;
  table << "solver,seed,steps,excess\n";
  auto mean_excess = [&](bool advantage, std::int64_t n_steps, std::uint64_t iteration) {
    double total = 0.0;
    for (int i = 0; i < seeds; ++i) {
      SgdConfig sgd;
      sgd.n_steps = n_steps;
      sgd.seed = seed + static_cast<std::uint64_t>(i);
      sgd.iteration = iteration;
      sgd.workers = workers;
      sgd.step_size = advantage ? default_npg_step_size(features) : alpha;
      const SgdResult out = advantage ? npg_sgd(mdp, theta, features, nu, sgd)
                                      : qnpg_sgd(mdp, theta, features, nu, sgd);
      const double excess = advantage ? loss(a_problem, out.w) - a_opt.loss_at_opt
                                      : loss(q_problem, out.w) - q_opt.loss_at_opt;
      table << (advantage ? "npg" : "qnpg") << ',' << sgd.seed << ',' << n_steps << ','
            << format_double(excess) << '\n';
      total += excess;
    }
    return total / seeds;
  };

  const double q_short = mean_excess(false, steps, 0);
  const double q_long = mean_excess(false, steps * factor, 1);
  const double a_short = mean_excess(true, steps, 2);
  const double a_long = mean_excess(true, steps * kNpgFactor, 3);
  result.tables.push_back({"sgd_rate.csv", table.str()});

  const double mu = min_eigenvalue(weighted_covariance(features.phi(), nu.probs()));
  const SgdBoundConstants constants =
      qnpg_sgd_constants(mdp.gamma, features.b_norm(), mu, q_opt.w);
  const double bound_short = constants.excess_risk_bound(steps);
  const double bound_long = constants.excess_risk_bound(steps * factor);
  const double seconds = clock.seconds();

  const double q_ratio = q_short / q_long;
  const double a_ratio = a_short / a_long;
  const std::string horizon = "T = " + std::to_string(steps) + " vs " +
                              std::to_string(steps * factor);
  result.assertions.push_back(make_assertion(
      6, "Q-NPG SGD mean excess risk ratio in [2, 8] (" + horizon + ")",
      q_ratio >= kRatioLow && q_ratio <= kRatioHigh,
      "ratio " + show(q_ratio) + ", alpha " + show(alpha)));
  result.assertions.push_back(make_assertion(
      6, "mean excess risk <= (4/T)(sigma sqrt(m) + B ||w*||)^2 at both horizons",
      q_short <= bound_short && q_long <= bound_long,
      "T: " + show(q_short) + " <= " + show(bound_short) + ", longer: " + show(q_long) +
          " <= " + show(bound_long)));
  result.assertions.push_back(make_assertion(6, "runtime < 120 s",
                                             seconds < kRuntimeLimitSeconds,
                                             show(seconds) + " s"));
  result.assertions.push_back(make_assertion(
      0, "NPG SGD mean excess risk ratio in [1.4, 2.9] under doubled T",
      a_ratio >= kNpgRatioLow && a_ratio <= kNpgRatioHigh, "ratio " + show(a_ratio)));
  return result;
}

}  // namespace npg::experiments
