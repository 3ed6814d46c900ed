#pragma once

#include "npg/exact_oracle.hpp"

#include <cstdint>

namespace npg {

/// Feature map (s, a) -> phi_{s,a} in R^m, stored as a dense
/// (S*A) x m matrix with rows in pair order.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int n_states, int n_actions, Matrix phi);

  /// Tabular features: m = S*A, phi_{s,a} = e_{pair(s,a)}.
  static FeatureMap one_hot(int n_states, int n_actions);
  /// Entries i.i.d. standard normal.
  static FeatureMap gaussian(int n_states, int n_actions, int dim, std::uint64_t seed);
  /// One-hot composed with a random sign projection to `dim` columns; each
  /// row has unit norm.
  static FeatureMap reduced(int n_states, int n_actions, int dim, std::uint64_t seed);

  [[nodiscard]] const Matrix& phi() const { return phi_; }
  [[nodiscard]] auto row(int s, int a) const { return phi_.row(s * n_actions_ + a); }
  /// Rows of state s, an A x m block.
  [[nodiscard]] auto state_block(int s) const {
    return phi_.middleRows(static_cast<Eigen::Index>(s) * n_actions_, n_actions_);
  }
  [[nodiscard]] int dim() const { return static_cast<int>(phi_.cols()); }
  [[nodiscard]] int n_states() const { return n_states_; }
  [[nodiscard]] int n_actions() const { return n_actions_; }
  /// B = max_{s,a} ||phi_{s,a}||_2.
  [[nodiscard]] double b_norm() const { return b_norm_; }

  /// Copy with every feature multiplied by `factor`.
  [[nodiscard]] FeatureMap scaled(double factor) const;

 private:
  int n_states_ = 0;
  int n_actions_ = 0;
  Matrix phi_;
  double b_norm_ = 0.0;
};

/// pi(theta): row s is softmax(Phi_s theta) with per-row max subtraction.
/// Throws NumericalError on non-finite logits.
PolicyTable policy_table(const Vector& theta, const FeatureMap& features);

class LogLinearPolicy {
 public:
  LogLinearPolicy(Vector theta, const FeatureMap& features);

  [[nodiscard]] const Vector& theta() const { return theta_; }
  [[nodiscard]] const FeatureMap& features() const { return *features_; }
  [[nodiscard]] const PolicyTable& table() const { return table_; }

 private:
  Vector theta_;
  const FeatureMap* features_;
  PolicyTable table_;
};

/// phi-bar_{s,a}(theta) = phi_{s,a} - E_{a' ~ pi_s(theta)} phi_{s,a'}.
Matrix centered_features(const Vector& theta, const FeatureMap& features);
Matrix centered_features(const PolicyTable& policy, const FeatureMap& features);

/// F = E_{s ~ d^theta(rho), a ~ pi_s}[phi-bar phi-bar^T].
Matrix fisher_matrix(const FiniteMdp& mdp, const Vector& theta, const FeatureMap& features,
                     const StateDistribution& rho);

/// grad_theta V_rho(theta) = 1/(1-gamma) E_{d-bar}[Q_{s,a} phi-bar_{s,a}].
Vector policy_gradient(const FiniteMdp& mdp, const Vector& theta, const FeatureMap& features,
                       const StateDistribution& rho);

/// F^+ grad V. Throws NumericalError if grad V has a component outside
/// range(F) larger than `tolerance` relative to ||grad V||.
Vector npg_direction_fisher(const FiniteMdp& mdp, const Vector& theta,
                            const FeatureMap& features, const StateDistribution& rho,
                            double tolerance = 1e-6);

/// sum_a p_a log(p_a / q_a), with 0 log 0 = 0. Throws std::domain_error when
/// p_a > 0 and q_a = 0.
double kl_divergence(const Vector& p, const Vector& q);

/// p = q * exp(-eta g) / normalizer.
Vector mirror_descent_step(const Vector& q, const Vector& g, double eta);

/// Three-point descent inequality at x+ = mirror_descent_step(q, g, eta):
/// f(x+) + D(x+, q) <= f(u) + D(u, q) - D(u, x+) with f = eta <g, .>.
bool three_point_check(const Vector& q, const Vector& g, double eta, const Vector& u,
                       double slack = 1e-10);

/// Row-wise mirror_descent_step with g = scores.row(s).
PolicyTable mirror_descent_policy_update(const PolicyTable& policy, const Matrix& scores,
                                         double eta);

/// Per-state scores Phi_s w as an S x A matrix; `design` has rows in pair order.
Matrix pair_scores(const Matrix& design, const Vector& w, int n_states, int n_actions);

/// D(p, q) weighted by a state distribution: sum_s d_s KL(p_s, q_s).
double weighted_kl(const StateDistribution& d, const PolicyTable& p, const PolicyTable& q);

}  // namespace npg
