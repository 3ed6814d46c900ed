#pragma once

#include "npg/loglinear_policy.hpp"

namespace npg {

/// Weighted least squares: minimize sum_i weights_i (<design_i, w> - target_i)^2.
struct RegressionProblem {
  Matrix design;                    // (S*A) x m
  Vector target;                    // S*A
  StateActionDistribution weights;  // S*A

  void check() const;
};

struct RegressionSolution {
  Vector w;
  double loss_at_w = 0.0;
  double loss_at_opt = 0.0;
};

/// The error decomposition. eps_stat and eps_approx are measured under the
/// on-run weighting, eps_bias under the comparator measure.
struct ErrorReport {
  double eps_stat = 0.0;
  double eps_bias = 0.0;
  double eps_approx = 0.0;
  Vector w_star;
};

/// Which compatible regression: Q against raw features, or the advantage
/// against centered features.
enum class CompatibleLoss { kQ, kAdvantage };

double loss(const RegressionProblem& problem, const Vector& w);

/// Exact gradient 2 Phi^T D (Phi w - t).
Vector loss_gradient(const RegressionProblem& problem, const Vector& w);

/// Sigma = Phi^T D Phi.
Matrix weighted_covariance(const Matrix& design, const Vector& weights);

/// Minimal-norm minimizer via an SVD of D^{1/2} Phi.
RegressionSolution solve_exact(const RegressionProblem& problem);

/// Loss at w and at the exact minimizer.
RegressionSolution evaluate_solution(const RegressionProblem& problem, const Vector& w);

/// (L(w) - L(w_star), ||w - w_star||^2_Sigma).
std::pair<double, double> second_moment_identity_check(const RegressionProblem& problem,
                                                       const Vector& w);

/// S x A table flattened in pair order.
Vector flatten_pairs(const Matrix& table);

/// Regression for `policy` under `weights`: design phi with target Q, or
/// design phi-bar(policy) with target A.
RegressionProblem compatible_problem(const FiniteMdp& mdp, const PolicyTable& policy,
                                     const FeatureMap& features, CompatibleLoss kind,
                                     const StateActionDistribution& weights);

/// d-tilde-star_{s,a} = d*_s / |A|.
StateActionDistribution comparator_measure(const StateDistribution& d_star, int n_actions);

/// Decomposition for a given w. `weights` is the on-run weighting (d-tilde^(k)
/// or d-bar^(k)); `d_star` is the comparator state visitation.
ErrorReport error_report(const FiniteMdp& mdp, const PolicyTable& policy,
                         const FeatureMap& features, CompatibleLoss kind,
                         const StateActionDistribution& weights,
                         const StateDistribution& d_star, const Vector& w);

/// Convenience form: weights = d-tilde^(k)(nu), d_star = d^{comparator}(rho).
ErrorReport error_report(const FiniteMdp& mdp, const PolicyTable& policy,
                         const FeatureMap& features, const StateActionDistribution& nu,
                         const StateDistribution& rho, const PolicyTable& comparator,
                         const Vector& w, CompatibleLoss kind = CompatibleLoss::kQ);

}  // namespace npg
