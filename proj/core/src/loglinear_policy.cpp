#include "npg/loglinear_policy.hpp"

#include "npg/linalg.hpp"
#include "npg/rng.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace npg {

namespace {

constexpr double kFlushToZero = 1e-300;

// Softmax of a logit row; max-subtracted, tiny entries flushed.
Vector softmax(const Vector& logits) {
  const double top = logits.maxCoeff();
  Vector p = (logits.array() - top).exp();
  p /= p.sum();
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] < kFlushToZero) p[i] = 0.0;
  }
  return p / p.sum();
}

}  // namespace

FeatureMap::FeatureMap(int n_states, int n_actions, Matrix phi)
    : n_states_(n_states), n_actions_(n_actions), phi_(std::move(phi)) {
  if (n_states < 1 || n_actions < 1) throw InvariantError("feature map needs S, A >= 1");
  if (phi_.rows() != static_cast<Eigen::Index>(n_states) * n_actions) {
    throw InvariantError("feature matrix must have S*A rows");
  }
  if (phi_.cols() < 1) throw InvariantError("feature dimension must be positive");
  if (!phi_.allFinite()) throw InvariantError("feature matrix has non-finite entries");
  b_norm_ = phi_.rowwise().norm().maxCoeff();
}

FeatureMap FeatureMap::one_hot(int n_states, int n_actions) {
  const int n = n_states * n_actions;
  return FeatureMap(n_states, n_actions, Matrix::Identity(n, n));
}

FeatureMap FeatureMap::gaussian(int n_states, int n_actions, int dim, std::uint64_t seed) {
  RngStream rng(seed, 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix phi(static_cast<Eigen::Index>(n_states) * n_actions, dim);
  for (Eigen::Index r = 0; r < phi.rows(); ++r) {
    for (Eigen::Index c = 0; c < phi.cols(); ++c) phi(r, c) = normal(rng);
  }
  return FeatureMap(n_states, n_actions, std::move(phi));
}

FeatureMap FeatureMap::reduced(int n_states, int n_actions, int dim, std::uint64_t seed) {
  RngStream rng(seed, 2);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  Matrix phi(static_cast<Eigen::Index>(n_states) * n_actions, dim);
  for (Eigen::Index r = 0; r < phi.rows(); ++r) {
    for (Eigen::Index c = 0; c < phi.cols(); ++c) {
      phi(r, c) = (rng.next_u64() >> 63) ? scale : -scale;
    }
  }
  return FeatureMap(n_states, n_actions, std::move(phi));
}

FeatureMap FeatureMap::scaled(double factor) const {
  return FeatureMap(n_states_, n_actions_, phi_ * factor);
}

PolicyTable policy_table(const Vector& theta, const FeatureMap& features) {
  if (theta.size() != features.dim()) throw InvariantError("theta has wrong dimension");
  const Vector logits = features.phi() * theta;
  if (!logits.allFinite()) throw NumericalError("policy_table: non-finite logits");
  Matrix probs(features.n_states(), features.n_actions());
  for (int s = 0; s < features.n_states(); ++s) {
    probs.row(s) = softmax(logits.segment(static_cast<Eigen::Index>(s) * features.n_actions(),
                                          features.n_actions()))
                       .transpose();
  }
  return PolicyTable(std::move(probs));
}

LogLinearPolicy::LogLinearPolicy(Vector theta, const FeatureMap& features)
    : theta_(std::move(theta)), features_(&features), table_(policy_table(theta_, features)) {}

Matrix centered_features(const PolicyTable& policy, const FeatureMap& features) {
  Matrix out(features.phi().rows(), features.dim());
  for (int s = 0; s < features.n_states(); ++s) {
    const auto block = features.state_block(s);
    const Eigen::RowVectorXd mean = policy.probs().row(s) * block;
    out.middleRows(static_cast<Eigen::Index>(s) * features.n_actions(), features.n_actions()) =
        block.rowwise() - mean;
  }
  return out;
}

Matrix centered_features(const Vector& theta, const FeatureMap& features) {
  return centered_features(policy_table(theta, features), features);
}

Matrix fisher_matrix(const FiniteMdp& mdp, const Vector& theta, const FeatureMap& features,
                     const StateDistribution& rho) {
  const PolicyTable policy = policy_table(theta, features);
  const Matrix phi_bar = centered_features(policy, features);
  const Vector weights = state_action_visitation_bar(mdp, policy, rho).probs();
  const Matrix fisher = phi_bar.transpose() * weights.asDiagonal() * phi_bar;
  return 0.5 * (fisher + fisher.transpose());
}

Vector policy_gradient(const FiniteMdp& mdp, const Vector& theta, const FeatureMap& features,
                       const StateDistribution& rho) {
  const PolicyTable policy = policy_table(theta, features);
  const Matrix phi_bar = centered_features(policy, features);
  const Vector weights = state_action_visitation_bar(mdp, policy, rho).probs();
  const Matrix q = evaluate_policy(mdp, policy).q;
  Vector q_flat(mdp.n_pairs());
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) q_flat[mdp.pair(s, a)] = q(s, a);
  }
  return phi_bar.transpose() * (weights.array() * q_flat.array()).matrix() /
         (1.0 - mdp.gamma);
}

Vector npg_direction_fisher(const FiniteMdp& mdp, const Vector& theta,
                            const FeatureMap& features, const StateDistribution& rho,
                            double tolerance) {
  const Matrix fisher = fisher_matrix(mdp, theta, features, rho);
  const Vector grad = policy_gradient(mdp, theta, features, rho);
  const Vector direction = pseudo_inverse(fisher) * grad;
  const double scale = std::max(grad.norm(), 1e-300);
  const double residual = (fisher * direction - grad).norm() / scale;
  if (grad.norm() > 0.0 && residual > tolerance) {
    throw NumericalError("npg_direction_fisher: gradient leaves range(F), relative residual " +
                         std::to_string(residual));
  }
  return direction;
}

double kl_divergence(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) throw InvariantError("kl_divergence: size mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) throw std::domain_error("kl_divergence: p > 0 where q = 0");
    total += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(total, 0.0);
}

Vector mirror_descent_step(const Vector& q, const Vector& g, double eta) {
  if (q.size() != g.size()) throw InvariantError("mirror_descent_step: size mismatch");
  Vector exponent = -eta * g;
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) top = std::max(top, exponent[i]);
  }
  Vector p = Vector::Zero(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) p[i] = q[i] * std::exp(exponent[i] - top);
  }
  p /= p.sum();
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] < kFlushToZero) p[i] = 0.0;
  }
  return p / p.sum();
}

bool three_point_check(const Vector& q, const Vector& g, double eta, const Vector& u,
                       double slack) {
  const Vector next = mirror_descent_step(q, g, eta);
  const double lhs = eta * g.dot(next) + kl_divergence(next, q);
  const double rhs = eta * g.dot(u) + kl_divergence(u, q) - kl_divergence(u, next);
  return lhs <= rhs + slack;
}

PolicyTable mirror_descent_policy_update(const PolicyTable& policy, const Matrix& scores,
                                         double eta) {
  if (scores.rows() != policy.n_states() || scores.cols() != policy.n_actions()) {
    throw InvariantError("mirror_descent_policy_update: score shape mismatch");
  }
  Matrix probs(policy.n_states(), policy.n_actions());
  for (int s = 0; s < policy.n_states(); ++s) {
    probs.row(s) = mirror_descent_step(policy.probs().row(s).transpose(),
                                       scores.row(s).transpose(), eta)
                       .transpose();
  }
  return PolicyTable(std::move(probs));
}

Matrix pair_scores(const Matrix& design, const Vector& w, int n_states, int n_actions) {
  const Vector flat = design * w;
  Matrix out(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) out(s, a) = flat[s * n_actions + a];
  }
  return out;
}

double weighted_kl(const StateDistribution& d, const PolicyTable& p, const PolicyTable& q) {
  double total = 0.0;
  for (int s = 0; s < p.n_states(); ++s) {
    if (d[s] == 0.0) continue;
    total += d[s] * kl_divergence(p.probs().row(s).transpose(), q.probs().row(s).transpose());
  }
  return total;
}

}  // namespace npg
