#pragma once

#include "npg/mdp.hpp"

namespace npg {

/// Stochastic policy: row s is the action distribution pi_s.
class PolicyTable {
 public:
  PolicyTable() = default;
  /// Throws InvariantError if any row leaves the simplex.
  explicit PolicyTable(Matrix probs);

  static PolicyTable uniform(int n_states, int n_actions);
  static PolicyTable deterministic(const Eigen::VectorXi& actions, int n_actions);

  [[nodiscard]] const Matrix& probs() const { return probs_; }
  [[nodiscard]] double operator()(int s, int a) const { return probs_(s, a); }
  [[nodiscard]] int n_states() const { return static_cast<int>(probs_.rows()); }
  [[nodiscard]] int n_actions() const { return static_cast<int>(probs_.cols()); }
  /// pi(s, a) flattened in pair order.
  [[nodiscard]] Vector flattened() const;

 private:
  Matrix probs_;
};

/// V, Q and A = Q - V of one policy.
struct ValueBundle {
  Vector v;    // |S|
  Matrix q;    // |S| x |A|
  Matrix adv;  // |S| x |A|
};

/// P^pi(s, s') = sum_a pi(s, a) P(s'|s, a).
Matrix policy_transition(const FiniteMdp& mdp, const PolicyTable& policy);

/// Solves (I - gamma P^pi) V = c^pi by dense LU.
ValueBundle evaluate_policy(const FiniteMdp& mdp, const PolicyTable& policy);

/// V_rho = <rho, V>.
double expected_value(const ValueBundle& values, const StateDistribution& rho);

/// d^pi(rho) = (1 - gamma) rho^T (I - gamma P^pi)^{-1}.
StateDistribution state_visitation(const FiniteMdp& mdp, const PolicyTable& policy,
                                   const StateDistribution& rho);

/// d-bar(s, a) = d^pi_s(rho) pi(s, a).
StateActionDistribution state_action_visitation_bar(const FiniteMdp& mdp,
                                                    const PolicyTable& policy,
                                                    const StateDistribution& rho);

/// d-tilde(nu) = (1 - gamma) nu^T (I - gamma P-tilde^pi)^{-1} on the pair chain
/// P-tilde((s,a) -> (s',a')) = P(s'|s,a) pi(s',a').
StateActionDistribution state_action_visitation_tilde(const FiniteMdp& mdp,
                                                      const PolicyTable& policy,
                                                      const StateActionDistribution& nu);

/// Stationary distribution of P^pi: solves rho = rho P^pi with sum(rho) = 1.
/// Such a rho is a fixed point of the visitation map, d^pi(rho) = rho.
/// Throws NumericalError when the chain has no unique stationary law.
StateDistribution stationary_distribution(const FiniteMdp& mdp, const PolicyTable& policy);

/// Greedy action per state; ties (within 1e-12 relative) go to the lowest index.
Eigen::VectorXi greedy_actions(const Matrix& q);

/// Deterministic optimal policy by exact policy iteration, started from
/// action 0 everywhere.
PolicyTable optimal_policy(const FiniteMdp& mdp);

/// Both sides of the performance difference identity:
///   V_rho(pi) - V_rho(pi') = 1/(1-gamma) E_{(s,a) ~ d-bar^pi(rho)} [A_{s,a}(pi')].
struct PerformanceDifference {
  double value_gap = 0.0;
  double advantage_form = 0.0;
};
PerformanceDifference performance_difference(const FiniteMdp& mdp, const PolicyTable& pi,
                                             const PolicyTable& pi_prime,
                                             const StateDistribution& rho);

}  // namespace npg
