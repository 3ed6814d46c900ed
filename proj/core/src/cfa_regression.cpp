#include "npg/cfa_regression.hpp"

#include "npg/linalg.hpp"

#include <cmath>

namespace npg {

void RegressionProblem::check() const {
  if (design.rows() != target.size() || design.rows() != weights.size()) {
    throw InvariantError("regression problem: design, target and weights disagree in size");
  }
}

double loss(const RegressionProblem& problem, const Vector& w) {
  problem.check();
  if (w.size() != problem.design.cols()) throw InvariantError("loss: w has wrong dimension");
  const Vector residual = problem.design * w - problem.target;
  return problem.weights.probs().dot(residual.cwiseAbs2());
}

Vector loss_gradient(const RegressionProblem& problem, const Vector& w) {
  problem.check();
  const Vector residual = problem.design * w - problem.target;
  return 2.0 * problem.design.transpose() *
         (problem.weights.probs().array() * residual.array()).matrix();
}

Matrix weighted_covariance(const Matrix& design, const Vector& weights) {
  const Matrix sigma = design.transpose() * weights.asDiagonal() * design;
  return 0.5 * (sigma + sigma.transpose());
}

RegressionSolution solve_exact(const RegressionProblem& problem) {
  problem.check();
  const Vector root = problem.weights.probs().cwiseSqrt();
  const Matrix scaled_design = root.asDiagonal() * problem.design;
  const Vector scaled_target = root.cwiseProduct(problem.target);
  RegressionSolution out;
  out.w = min_norm_least_squares(scaled_design, scaled_target);
  out.loss_at_w = loss(problem, out.w);
  out.loss_at_opt = out.loss_at_w;
  return out;
}

RegressionSolution evaluate_solution(const RegressionProblem& problem, const Vector& w) {
  RegressionSolution out = solve_exact(problem);
  out.w = w;
  out.loss_at_w = loss(problem, w);
  return out;
}

std::pair<double, double> second_moment_identity_check(const RegressionProblem& problem,
                                                       const Vector& w) {
  const RegressionSolution best = solve_exact(problem);
  const Vector delta = w - best.w;
  const Matrix sigma = weighted_covariance(problem.design, problem.weights.probs());
  return {loss(problem, w) - best.loss_at_w, delta.dot(sigma * delta)};
}

Vector flatten_pairs(const Matrix& table) {
  Vector out(table.size());
  for (Eigen::Index s = 0; s < table.rows(); ++s) {
    out.segment(s * table.cols(), table.cols()) = table.row(s).transpose();
  }
  return out;
}

RegressionProblem compatible_problem(const FiniteMdp& mdp, const PolicyTable& policy,
                                     const FeatureMap& features, CompatibleLoss kind,
                                     const StateActionDistribution& weights) {
  const ValueBundle values = evaluate_policy(mdp, policy);
  if (kind == CompatibleLoss::kQ) {
    return {features.phi(), flatten_pairs(values.q), weights};
  }
  return {centered_features(policy, features), flatten_pairs(values.adv), weights};
}

StateActionDistribution comparator_measure(const StateDistribution& d_star, int n_actions) {
  Vector out(d_star.size() * n_actions);
  for (Eigen::Index s = 0; s < d_star.size(); ++s) {
    out.segment(s * n_actions, n_actions).setConstant(d_star[s] / n_actions);
  }
  return StateActionDistribution::normalized(std::move(out));
}

ErrorReport error_report(const FiniteMdp& mdp, const PolicyTable& policy,
                         const FeatureMap& features, CompatibleLoss kind,
                         const StateActionDistribution& weights,
                         const StateDistribution& d_star, const Vector& w) {
  const RegressionProblem on_run = compatible_problem(mdp, policy, features, kind, weights);
  const RegressionSolution best = solve_exact(on_run);
  RegressionProblem transfer = on_run;
  transfer.weights = comparator_measure(d_star, mdp.n_actions);

  ErrorReport out;
  out.w_star = best.w;
  out.eps_approx = std::max(best.loss_at_w, 0.0);
  out.eps_stat = std::max(loss(on_run, w) - best.loss_at_w, 0.0);
  out.eps_bias = std::max(loss(transfer, best.w), 0.0);
  return out;
}

ErrorReport error_report(const FiniteMdp& mdp, const PolicyTable& policy,
                         const FeatureMap& features, const StateActionDistribution& nu,
                         const StateDistribution& rho, const PolicyTable& comparator,
                         const Vector& w, CompatibleLoss kind) {
  return error_report(mdp, policy, features, kind,
                      state_action_visitation_tilde(mdp, policy, nu),
                      state_visitation(mdp, comparator, rho), w);
}

}  // namespace npg
