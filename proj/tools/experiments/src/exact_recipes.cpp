#include "support.hpp"

#include <cmath>
#include <cstdio>

namespace npg::experiments {

namespace {

constexpr double kBoundSlack = 1e-12;
constexpr double kMismatchSlack = 1e-12;

std::string instance_label(const std::string& prefix, int index) {
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%02d", index);
  return prefix + buffer;
}

// max over pairs of d-tilde*(s,a) / nu(s,a): the one-hot closed form of kappa_nu.
double one_hot_kappa(const FiniteMdp& mdp, const StateDistribution& d_star,
                     const StateActionDistribution& nu) {
  double best = 0.0;
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      best = std::max(best, d_star[s] / mdp.n_actions / nu[mdp.pair(s, a)]);
    }
  }
  return best;
}

bool is_one_hot(const Config& config) { return config.get_string("features.kind") == "one_hot"; }

}  // namespace

RecipeResult recipe_exact_tabular_linear(const Config& config) {
  constexpr double kFinalGapRatio = 1e-6;
  constexpr double kRuntimeLimitSeconds = 10.0;
  constexpr double kKappaTolerance = 1e-10;

  RecipeResult result;
  const int seeds = positive_int(config, "seeds");
  std::vector<Instance> instances;
  for (int i = 0; i < seeds; ++i) instances.push_back(build_instance(config, i));

  Domination domination;
  bool rate_holds = true;
  double rate_margin = std::numeric_limits<double>::infinity();
  double worst_ratio = 0.0;
  bool mismatch_holds = true;
  double kappa_error = 0.0;

  const Stopwatch clock;
  for (int i = 0; i < seeds; ++i) {
    const Instance& inst = instances[static_cast<std::size_t>(i)];
    const RunOptions options = build_options(config, inst, i);
    RunTrace trace = run(inst.mdp, inst.features, options);
    const double factor = 2.0 / (1.0 - inst.mdp.gamma);
    for (const IterationRecord& r : trace.records) {
      const double rhs = std::pow(1.0 - 1.0 / trace.vartheta_rho, r.k) * factor;
      rate_margin = std::min(rate_margin, rhs - r.gap);
      if (r.gap > rhs + kBoundSlack) rate_holds = false;
    }
    const double gap0 = trace.records.front().gap;
    const double ratio = gap0 > 0.0 ? trace.records.back().gap / gap0 : 0.0;
    worst_ratio = std::max(worst_ratio, ratio);
    merge(domination, check_domination(trace, kBoundSlack), instance_label("linear_", i));
    mismatch_holds = mismatch_holds && mismatch_ordered(trace, kMismatchSlack);
    if (is_one_hot(config)) {
      const StateDistribution d_star = state_visitation(inst.mdp, trace.comparator, options.rho);
      const double closed = one_hot_kappa(inst.mdp, d_star, options.nu);
      kappa_error = std::max(kappa_error, std::abs(trace.kappa_nu - closed) / closed);
    }
    result.traces.push_back({instance_label("linear_", i), std::move(trace)});
  }
  const double linear_seconds = clock.seconds();

  const int K = positive_int(config, "iterations");
  result.assertions.push_back(make_assertion(
      1, "gap_k <= (1 - 1/vartheta_rho)^k 2/(1-gamma) for all k <= " + std::to_string(K),
      rate_holds, "min margin " + show(rate_margin) + " over " + std::to_string(seeds) + " MDPs"));
  result.assertions.push_back(make_assertion(
      1, "gap_K <= 1e-6 gap_0", worst_ratio <= kFinalGapRatio,
      "worst gap_K/gap_0 " + show(worst_ratio)));
  result.assertions.push_back(make_assertion(1, "runtime < 10 s",
                                             linear_seconds < kRuntimeLimitSeconds,
                                             show(linear_seconds) + " s"));

  bool gamma_rate_holds = true;
  double gamma_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < seeds; ++i) {
    const Instance& inst = instances[static_cast<std::size_t>(i)];
    RunOptions options = build_options(config, inst, i);
    options.rho = stationary_distribution(inst.mdp, optimal_policy(inst.mdp));
    RunTrace trace = run(inst.mdp, inst.features, options);
    const double gamma = inst.mdp.gamma;
    for (const IterationRecord& r : trace.records) {
      const double rhs = std::pow(gamma, r.k) * 2.0 / (1.0 - gamma);
      gamma_margin = std::min(gamma_margin, rhs - r.gap);
      if (r.gap > rhs + kBoundSlack) gamma_rate_holds = false;
    }
    merge(domination, check_domination(trace, kBoundSlack), instance_label("stationary_", i));
    mismatch_holds = mismatch_holds && mismatch_ordered(trace, kMismatchSlack);
    result.traces.push_back({instance_label("stationary_", i), std::move(trace)});
  }
  result.assertions.push_back(make_assertion(
      2, "stationary rho: gap_k <= gamma^k 2/(1-gamma) + 1e-12", gamma_rate_holds,
      "min margin " + show(gamma_margin)));

  result.assertions.push_back(make_assertion(
      9, "every evaluated bound >= measured gap (linear and stationary runs)", domination.holds,
      "min margin " + show(domination.worst_margin) + " at " + domination.worst_where));
  result.assertions.push_back(
      make_assertion(9, "vartheta_k <= vartheta_rho at every iteration", mismatch_holds, ""));
  if (is_one_hot(config)) {
    result.assertions.push_back(make_assertion(
        9, "one-hot kappa_nu equals max d-tilde*/nu to 1e-10", kappa_error <= kKappaTolerance,
        "max relative error " + show(kappa_error)));
  }
  return result;
}

RecipeResult recipe_exact_constant_sublinear(const Config& config) {
  RecipeResult result;
  const int seeds = positive_int(config, "seeds");
  const int K = positive_int(config, "iterations");
  const double eta = config.get_double("schedule.eta");

  Domination domination;
  bool average_holds = true;
  double average_margin = std::numeric_limits<double>::infinity();
  bool mismatch_holds = true;
  for (int i = 0; i < seeds; ++i) {
    const Instance inst = build_instance(config, i);
    const RunOptions options = build_options(config, inst, i);
    RunTrace trace = run(inst.mdp, inst.features, options);
    const double gamma = inst.mdp.gamma;
    const double rhs = (trace.d0_star / eta + 2.0 * trace.vartheta_rho) / ((1.0 - gamma) * K);
    const double average = trace.records.back().running_average_gap;
    average_margin = std::min(average_margin, rhs - average);
    if (!(average <= rhs + kBoundSlack)) average_holds = false;
    merge(domination, check_domination(trace, kBoundSlack), instance_label("constant_", i));
    mismatch_holds = mismatch_holds && mismatch_ordered(trace, kMismatchSlack);
    result.traces.push_back({instance_label("constant_", i), std::move(trace)});
  }
  result.assertions.push_back(make_assertion(
      3,
      "mean of gap_0..gap_{K-1} <= (D_0*/eta + 2 vartheta_rho)/((1-gamma) K) at K = " +
          std::to_string(K),
      average_holds, "min margin " + show(average_margin)));
  result.assertions.push_back(make_assertion(
      9, "every evaluated bound >= measured quantity (constant-step runs)", domination.holds,
      "min margin " + show(domination.worst_margin) + " at " + domination.worst_where));
  result.assertions.push_back(
      make_assertion(9, "vartheta_k <= vartheta_rho at every iteration", mismatch_holds, ""));
  return result;
}

RecipeResult recipe_approx_features_linear(const Config& config) {
  constexpr double kBiasRelativeSlack = 1e-9;

  RecipeResult result;
  const int seeds = positive_int(config, "seeds");
  Domination domination;
  bool bias_holds = true;
  double max_eps_approx = 0.0;
  bool mismatch_holds = true;
  for (int i = 0; i < seeds; ++i) {
    const Instance inst = build_instance(config, i);
    for (const Algorithm algorithm : {Algorithm::kQnpg, Algorithm::kNpg}) {
      RunOptions options = build_options(config, inst, i);
      options.algorithm = algorithm;
      options.headline_bound.reset();
      RunTrace trace = run(inst.mdp, inst.features, options);

      const StateDistribution d_star = state_visitation(inst.mdp, trace.comparator, options.rho);
      double ratio = 0.0;
      for (int s = 0; s < inst.mdp.n_states; ++s) {
        for (int a = 0; a < inst.mdp.n_actions; ++a) {
          ratio = std::max(ratio, d_star[s] / inst.mdp.n_actions / options.nu[inst.mdp.pair(s, a)]);
        }
      }
      const double transfer = ratio / (1.0 - inst.mdp.gamma);
      for (const IterationRecord& r : trace.records) {
        if (std::isnan(r.eps_bias)) continue;
        max_eps_approx = std::max(max_eps_approx, r.eps_approx);
        if (r.eps_bias > transfer * r.eps_approx * (1.0 + kBiasRelativeSlack) + 1e-15) {
          bias_holds = false;
        }
      }
      const std::string label = instance_label(to_string(algorithm) + "_", i);
      merge(domination, check_domination(trace, kBoundSlack), label);
      mismatch_holds = mismatch_holds && mismatch_ordered(trace, kMismatchSlack);
      result.traces.push_back({label, std::move(trace)});
    }
  }
  result.assertions.push_back(make_assertion(
      0, "reduced features leave a nonzero approximation error", max_eps_approx > 0.0,
      "max eps_approx " + show(max_eps_approx)));
  result.assertions.push_back(make_assertion(
      0, "every evaluated bound >= measured gap with nonzero errors", domination.holds,
      "min margin " + show(domination.worst_margin) + " at " + domination.worst_where));
  result.assertions.push_back(make_assertion(
      0, "eps_bias <= max(d-tilde*/nu)/(1-gamma) eps_approx", bias_holds, ""));
  result.assertions.push_back(
      make_assertion(0, "vartheta_k <= vartheta_rho at every iteration", mismatch_holds, ""));
  return result;
}

}  // namespace npg::experiments
