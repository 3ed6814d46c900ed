#include "npg/exact_oracle.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace npg {

PolicyTable::PolicyTable(Matrix probs) : probs_(std::move(probs)) {
  for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
    detail::check_simplex(probs_.row(s).transpose(), "policy row " + std::to_string(s));
  }
}

PolicyTable PolicyTable::uniform(int n_states, int n_actions) {
  return PolicyTable(Matrix::Constant(n_states, n_actions, 1.0 / n_actions));
}

PolicyTable PolicyTable::deterministic(const Eigen::VectorXi& actions, int n_actions) {
  Matrix probs = Matrix::Zero(actions.size(), n_actions);
  for (Eigen::Index s = 0; s < actions.size(); ++s) probs(s, actions[s]) = 1.0;
  return PolicyTable(std::move(probs));
}

Vector PolicyTable::flattened() const {
  Vector out(probs_.size());
  for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
    out.segment(s * probs_.cols(), probs_.cols()) = probs_.row(s).transpose();
  }
  return out;
}

namespace {

void check_dimensions(const FiniteMdp& mdp, const PolicyTable& policy) {
  if (policy.n_states() != mdp.n_states || policy.n_actions() != mdp.n_actions) {
    throw InvariantError("policy shape does not match the MDP");
  }
}

Vector policy_cost(const FiniteMdp& mdp, const PolicyTable& policy) {
  return (mdp.cost.array() * policy.probs().array()).rowwise().sum();
}

// Full pair-to-pair kernel P-tilde, (S*A) x (S*A).
Matrix pair_transition(const FiniteMdp& mdp, const PolicyTable& policy) {
  const int n = mdp.n_pairs();
  Matrix kernel(n, n);
  for (int row = 0; row < n; ++row) {
    for (int next = 0; next < mdp.n_states; ++next) {
      const double p = mdp.transition(row, next);
      for (int a = 0; a < mdp.n_actions; ++a) kernel(row, mdp.pair(next, a)) = p * policy(next, a);
    }
  }
  return kernel;
}

}  // namespace

Matrix policy_transition(const FiniteMdp& mdp, const PolicyTable& policy) {
  check_dimensions(mdp, policy);
  Matrix out = Matrix::Zero(mdp.n_states, mdp.n_states);
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      out.row(s) += policy(s, a) * mdp.transition.row(mdp.pair(s, a));
    }
  }
  return out;
}

ValueBundle evaluate_policy(const FiniteMdp& mdp, const PolicyTable& policy) {
  check_dimensions(mdp, policy);
  const Matrix system =
      Matrix::Identity(mdp.n_states, mdp.n_states) - mdp.gamma * policy_transition(mdp, policy);
  Eigen::PartialPivLU<Matrix> lu(system);
  ValueBundle out;
  out.v = lu.solve(policy_cost(mdp, policy));
  if (!out.v.allFinite()) throw NumericalError("evaluate_policy: singular Bellman system");

  const Vector next_value = mdp.transition * out.v;  // indexed by pair
  out.q.resize(mdp.n_states, mdp.n_actions);
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      out.q(s, a) = mdp.cost(s, a) + mdp.gamma * next_value[mdp.pair(s, a)];
    }
  }
  out.adv = out.q.colwise() - out.v;
  return out;
}

double expected_value(const ValueBundle& values, const StateDistribution& rho) {
  return rho.probs().dot(values.v);
}

StateDistribution state_visitation(const FiniteMdp& mdp, const PolicyTable& policy,
                                   const StateDistribution& rho) {
  check_dimensions(mdp, policy);
  if (rho.size() != mdp.n_states) throw InvariantError("rho has wrong size");
  const Matrix system = Matrix::Identity(mdp.n_states, mdp.n_states) -
                        mdp.gamma * policy_transition(mdp, policy).transpose();
  Vector d = (1.0 - mdp.gamma) * Eigen::PartialPivLU<Matrix>(system).solve(rho.probs());
  if (!d.allFinite()) throw NumericalError("state_visitation: singular system");
  return StateDistribution::normalized(std::move(d));
}

StateActionDistribution state_action_visitation_bar(const FiniteMdp& mdp,
                                                    const PolicyTable& policy,
                                                    const StateDistribution& rho) {
  const StateDistribution d = state_visitation(mdp, policy, rho);
  Vector out(mdp.n_pairs());
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) out[mdp.pair(s, a)] = d[s] * policy(s, a);
  }
  return StateActionDistribution::normalized(std::move(out));
}

StateActionDistribution state_action_visitation_tilde(const FiniteMdp& mdp,
                                                      const PolicyTable& policy,
                                                      const StateActionDistribution& nu) {
  check_dimensions(mdp, policy);
  if (nu.size() != mdp.n_pairs()) throw InvariantError("nu has wrong size");
  const int n = mdp.n_pairs();
  const Matrix system =
      Matrix::Identity(n, n) - mdp.gamma * pair_transition(mdp, policy).transpose();
  Vector d = (1.0 - mdp.gamma) * Eigen::PartialPivLU<Matrix>(system).solve(nu.probs());
  if (!d.allFinite()) throw NumericalError("state_action_visitation_tilde: singular system");
  return StateActionDistribution::normalized(std::move(d));
}

StateDistribution stationary_distribution(const FiniteMdp& mdp, const PolicyTable& policy) {
  const int n = mdp.n_states;
  Matrix system = Matrix::Identity(n, n) - policy_transition(mdp, policy).transpose();
  system.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs[n - 1] = 1.0;
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) throw NumericalError("stationary_distribution: chain is not unichain");
  return StateDistribution::normalized(lu.solve(rhs));
}

Eigen::VectorXi greedy_actions(const Matrix& q) {
  Eigen::VectorXi out(q.rows());
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    const double best = q.row(s).minCoeff();
    const double tol = 1e-12 * std::max(1.0, std::abs(best));
    int choice = 0;
    while (q(s, choice) > best + tol) ++choice;
    out[s] = choice;
  }
  return out;
}

PolicyTable optimal_policy(const FiniteMdp& mdp) {
  constexpr int kMaxSweeps = 100000;
  Eigen::VectorXi actions = Eigen::VectorXi::Zero(mdp.n_states);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const PolicyTable current = PolicyTable::deterministic(actions, mdp.n_actions);
    const Eigen::VectorXi improved = greedy_actions(evaluate_policy(mdp, current).q);
    if (improved == actions) return current;
    actions = improved;
  }
  throw NumericalError("optimal_policy: policy iteration did not reach a fixed point");
}

PerformanceDifference performance_difference(const FiniteMdp& mdp, const PolicyTable& pi,
                                             const PolicyTable& pi_prime,
                                             const StateDistribution& rho) {
  const ValueBundle values = evaluate_policy(mdp, pi);
  const ValueBundle values_prime = evaluate_policy(mdp, pi_prime);
  const StateActionDistribution d_bar = state_action_visitation_bar(mdp, pi, rho);

  double weighted_adv = 0.0;
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      weighted_adv += d_bar[mdp.pair(s, a)] * values_prime.adv(s, a);
    }
  }
  return {expected_value(values, rho) - expected_value(values_prime, rho),
          weighted_adv / (1.0 - mdp.gamma)};
}

}  // namespace npg
