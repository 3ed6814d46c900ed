#include "npg/npg_driver.hpp"

#include "npg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace npg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double max_abs_difference(const PolicyTable& a, const PolicyTable& b) {
  return (a.probs() - b.probs()).cwiseAbs().maxCoeff();
}

// Initial pair distribution whose d-tilde equals d-bar(rho): nu'_{s,a} = rho_s pi_{s,a}.
StateActionDistribution rho_times_policy(const StateDistribution& rho, const PolicyTable& policy) {
  Vector out(rho.size() * policy.n_actions());
  for (Eigen::Index s = 0; s < rho.size(); ++s) {
    for (int a = 0; a < policy.n_actions(); ++a) {
      out[s * policy.n_actions() + a] = rho[s] * policy(static_cast<int>(s), a);
    }
  }
  return StateActionDistribution::normalized(std::move(out));
}

double safe_divergence(const StateDistribution& d_star, const PolicyTable& comparator,
                       const PolicyTable& policy) {
  try {
    return comparator_divergence(d_star, comparator, policy);
  } catch (const std::domain_error&) {
    return kInf;
  }
}

TheoremId default_headline(Algorithm algorithm, StepSchedule::Kind schedule, SolveMode mode) {
  const bool geometric = schedule == StepSchedule::Kind::kGeometric;
  if (algorithm == Algorithm::kQnpg) {
    if (!geometric) return TheoremId::kT2;
    return mode == SolveMode::kExact ? TheoremId::kT1 : TheoremId::kT3;
  }
  return geometric ? TheoremId::kT4 : TheoremId::kT5;
}

}  // namespace

StepSchedule StepSchedule::geometric(double eta0, double gamma) {
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw InvariantError("eta0 must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw InvariantError("geometric schedule needs gamma in (0, 1)");
  }
  StepSchedule out;
  out.kind_ = Kind::kGeometric;
  out.eta0_ = eta0;
  out.log_eta0_ = std::log(eta0);
  out.log_growth_ = -std::log(gamma);
  return out;
}

StepSchedule StepSchedule::constant(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvariantError("eta must be positive");
  StepSchedule out;
  out.kind_ = Kind::kConstant;
  out.eta0_ = eta;
  out.log_eta0_ = std::log(eta);
  return out;
}

double StepSchedule::log_eta(int k) const {
  return log_eta0_ + static_cast<double>(k) * log_growth_;
}

double StepSchedule::eta(int k) const {
  if (k == 0 || kind_ == Kind::kConstant) return eta0_;
  return std::exp(log_eta(k));
}

double default_eta0(int n_actions, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw InvariantError("default_eta0 needs gamma in (0, 1)");
  }
  return std::max(1e-8, (1.0 - gamma) / gamma * std::log(static_cast<double>(n_actions)));
}

std::string to_string(Algorithm a) { return a == Algorithm::kQnpg ? "qnpg" : "npg"; }
std::string to_string(SolveMode m) { return m == SolveMode::kExact ? "exact" : "sgd"; }
std::string to_string(RegressionWeighting w) {
  return w == RegressionWeighting::kTilde ? "tilde" : "bar";
}

BoundInputs RunTrace::bound_inputs(int k) const {
  BoundInputs in;
  in.gamma = gamma;
  in.n_actions = n_actions;
  in.k = k;
  in.vartheta_rho = vartheta_rho;
  in.c_rho = sup_c_rho;
  in.c_nu = sup_c_nu;
  in.kappa_nu = kappa_nu;
  in.eps_stat = sup_eps_stat;
  in.eps_bias = sup_eps_bias;
  in.eps_approx = sup_eps_approx;
  in.d0_star = d0_star;
  in.eta = constant_eta;
  if (mode == SolveMode::kSgd) {
    in.sgd_steps = sgd_steps;
    in.b_norm = b_norm;
    in.mu = mu;
    in.dim = dim;
  }
  return in;
}

std::vector<TheoremId> RunTrace::applicable_bounds() const {
  const bool geometric = schedule == StepSchedule::Kind::kGeometric;
  const bool sgd = mode == SolveMode::kSgd;
  if (algorithm == Algorithm::kQnpg) {
    if (!geometric) return {TheoremId::kT2};
    if (sgd) return {TheoremId::kT1, TheoremId::kT3, TheoremId::kC1};
    return {TheoremId::kT1, TheoremId::kT3};
  }
  if (!geometric) return {TheoremId::kT5};
  if (sgd) return {TheoremId::kT4, TheoremId::kC2};
  return {TheoremId::kT4};
}

void fill_bounds(RunTrace& trace) {
  const auto applicable = trace.applicable_bounds();
  for (IterationRecord& rec : trace.records) {
    rec.bounds.clear();
    const BoundInputs in = trace.bound_inputs(rec.k);
    for (TheoremId id : applicable) rec.bounds[to_string(id)] = theorem_bound(id, in);
    rec.bound = theorem_bound(trace.headline_bound, in);
  }
}

RunTrace run(const FiniteMdp& mdp, const FeatureMap& features, const RunOptions& options) {
  validate(mdp);
  if (features.n_states() != mdp.n_states || features.n_actions() != mdp.n_actions) {
    throw InvariantError("feature map shape does not match the MDP");
  }
  if (options.rho.size() != mdp.n_states) throw InvariantError("rho has wrong size");
  if (options.nu.size() != mdp.n_pairs()) throw InvariantError("nu has wrong size");
  if (options.iterations < 0) throw InvariantError("iterations must be >= 0");

  const bool advantage = options.algorithm == Algorithm::kNpg;
  const CompatibleLoss kind = advantage ? CompatibleLoss::kAdvantage : CompatibleLoss::kQ;
  const auto variant = advantage ? ConcentrabilityVariant::kNpg : ConcentrabilityVariant::kQnpg;

  RunTrace trace;
  trace.algorithm = options.algorithm;
  trace.mode = options.mode;
  trace.schedule = options.schedule.kind();
  trace.headline_bound = options.headline_bound.value_or(
      default_headline(options.algorithm, options.schedule.kind(), options.mode));
  trace.gamma = mdp.gamma;
  trace.n_actions = mdp.n_actions;
  trace.b_norm = features.b_norm();
  trace.dim = features.dim();
  trace.sgd_steps = options.mode == SolveMode::kSgd ? options.sgd.n_steps : 0;
  if (options.schedule.kind() == StepSchedule::Kind::kConstant) {
    trace.constant_eta = options.schedule.eta(0);
  }
  trace.comparator = options.comparator ? *options.comparator : optimal_policy(mdp);

  const StateDistribution d_star = state_visitation(mdp, trace.comparator, options.rho);
  const StateActionDistribution d_tilde_star = comparator_measure(d_star, mdp.n_actions);
  trace.value_star = expected_value(evaluate_policy(mdp, trace.comparator), options.rho);
  trace.kappa_nu = relative_condition_number(features, d_star, options.nu, mdp.n_actions);
  const double mu_raw =
      min_eigenvalue(weighted_covariance(features.phi(), options.nu.probs()));
  trace.mu = advantage ? kInf : mu_raw;

  Vector theta = Vector::Zero(features.dim());
  double gap_sum = 0.0;
  for (int k = 0; k <= options.iterations; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.eta = options.schedule.eta(k);
    rec.theta = theta;
    rec.policy = policy_table(theta, features);
    const PolicyTable& policy = rec.policy;

    rec.value = expected_value(evaluate_policy(mdp, policy), options.rho);
    rec.gap = rec.value - trace.value_star;
    rec.running_average_gap = k == 0 ? kNaN : gap_sum / k;
    gap_sum += rec.gap;

    const StateDistribution d_k = state_visitation(mdp, policy, options.rho);
    const MismatchCoefficients mismatch =
        mismatch_coefficients(d_star, d_k, options.rho, mdp.gamma);
    rec.coefficients.vartheta_k = mismatch.vartheta_k;
    rec.coefficients.vartheta_rho = mismatch.vartheta_rho;
    rec.coefficients.c_rho = concentrability_rho(d_star, d_k);
    rec.coefficients.kappa_nu = trace.kappa_nu;
    rec.coefficients.b_norm = features.b_norm();
    rec.coefficients.d_kstar = safe_divergence(d_star, trace.comparator, policy);
    rec.d_kstar = rec.coefficients.d_kstar;
    trace.vartheta_rho = mismatch.vartheta_rho;
    trace.sup_c_rho = std::max(trace.sup_c_rho, rec.coefficients.c_rho);

    if (k == options.iterations) {
      rec.eps_stat = rec.eps_bias = rec.eps_approx = kNaN;
      rec.coefficients.c_nu = kNaN;
      rec.coefficients.sigma_nu_min_eig = advantage ? kNaN : mu_raw;
      rec.pmd_deviation = kNaN;
      trace.records.push_back(std::move(rec));
      break;
    }

    const StateActionDistribution weights =
        options.weighting == RegressionWeighting::kTilde
            ? state_action_visitation_tilde(mdp, policy, options.nu)
            : state_action_visitation_bar(mdp, policy, options.rho);
    const RegressionProblem problem = compatible_problem(mdp, policy, features, kind, weights);
    const RegressionSolution best = solve_exact(problem);

    Vector w;
    if (options.mode == SolveMode::kExact) {
      w = best.w;
    } else {
      SgdConfig config = options.sgd;
      config.iteration = static_cast<std::uint64_t>(k);
      const StateActionDistribution start = options.weighting == RegressionWeighting::kTilde
                                                ? options.nu
                                                : rho_times_policy(options.rho, policy);
      const SgdResult result = advantage ? npg_sgd(mdp, theta, features, start, config)
                                         : qnpg_sgd(mdp, theta, features, start, config);
      w = result.w;
      rec.samples = result.env_steps;
    }

    RegressionProblem transfer = problem;
    transfer.weights = d_tilde_star;
    rec.eps_approx = std::max(best.loss_at_w, 0.0);
    rec.eps_stat = std::max(loss(problem, w) - best.loss_at_w, 0.0);
    rec.eps_bias = std::max(loss(transfer, best.w), 0.0);

    if (advantage) {
      rec.coefficients.sigma_nu_min_eig =
          min_eigenvalue(weighted_covariance(problem.design, weights.probs()));
      trace.mu = std::min(trace.mu, rec.coefficients.sigma_nu_min_eig);
    } else {
      rec.coefficients.sigma_nu_min_eig = mu_raw;
    }

    Vector theta_next = theta - rec.eta * w;
    if (!theta_next.allFinite()) {
      throw NumericalError("non-finite theta at iteration " + std::to_string(k + 1));
    }
    PolicyTable next;
    try {
      next = policy_table(theta_next, features);
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(k + 1) + ": " + e.what());
    }

    const Matrix raw_scores = pair_scores(features.phi(), w, mdp.n_states, mdp.n_actions);
    const Matrix centered_scores = pair_scores(centered_features(policy, features), w,
                                               mdp.n_states, mdp.n_actions);
    rec.pmd_deviation = std::max(
        max_abs_difference(mirror_descent_policy_update(policy, raw_scores, rec.eta), next),
        max_abs_difference(mirror_descent_policy_update(policy, centered_scores, rec.eta), next));

    rec.coefficients.c_nu = concentrability_nu(mdp, trace.comparator, policy, next, options.nu,
                                               options.rho, variant);

    trace.sup_eps_stat = std::max(trace.sup_eps_stat, rec.eps_stat);
    trace.sup_eps_bias = std::max(trace.sup_eps_bias, rec.eps_bias);
    trace.sup_eps_approx = std::max(trace.sup_eps_approx, rec.eps_approx);
    trace.sup_c_nu = std::max(trace.sup_c_nu, rec.coefficients.c_nu);

    theta = std::move(theta_next);
    trace.records.push_back(std::move(rec));
  }

  trace.d0_star = trace.records.front().d_kstar;
  if (trace.schedule == StepSchedule::Kind::kGeometric) {
    trace.step_condition_holds =
        options.schedule.eta(0) >= (1.0 - mdp.gamma) / mdp.gamma * trace.d0_star * (1.0 - 1e-12);
  }
  if (options.iterations == 0 && advantage) trace.mu = kNaN;
  fill_bounds(trace);
  return trace;
}

RunTrace run_qnpg(const FiniteMdp& mdp, const FeatureMap& features, RunOptions options) {
  options.algorithm = Algorithm::kQnpg;
  return run(mdp, features, options);
}

RunTrace run_npg(const FiniteMdp& mdp, const FeatureMap& features, RunOptions options) {
  options.algorithm = Algorithm::kNpg;
  return run(mdp, features, options);
}

}  // namespace npg
