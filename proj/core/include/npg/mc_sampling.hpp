#pragma once

#include "npg/cfa_regression.hpp"
#include "npg/rng.hpp"

#include <cstdint>
#include <vector>

namespace npg {

/// One rollout. For Q-sampling `estimate` is q_hat; for A-sampling it is
/// q_hat - v_hat.
struct RolloutSample {
  int state = 0;
  int action = 0;
  double q_hat = 0.0;
  double v_hat = 0.0;
  double estimate = 0.0;
  std::int64_t accept_time = 0;
  std::int64_t trajectory_len = 0;
};

/// Hard cap on a single geometric phase.
inline constexpr std::int64_t kMaxRolloutSteps = 1'000'000;

/**
 * Geometric-horizon rollout sampler for a fixed policy.
 *
 * The accepted pair is distributed as d-tilde(nu); q_hat is an unbiased
 * estimate of Q at that pair and, for sample_a, v_hat is an independent
 * unbiased estimate of V at its state.
 */
class RolloutSampler {
 public:
  RolloutSampler(const FiniteMdp& mdp, const PolicyTable& policy,
                 const StateActionDistribution& nu);

  RolloutSample sample_q(RngStream& rng) const;
  RolloutSample sample_a(RngStream& rng) const;

 private:
  int draw(const std::vector<double>& cdf, std::size_t offset, std::size_t n, double u) const;
  int next_state(int s, int a, RngStream& rng) const;
  int next_action(int s, RngStream& rng) const;
  // Q phase from the accepted pair; returns the accumulated cost.
  double q_phase(int s, int a, RngStream& rng, std::int64_t& steps) const;

  const FiniteMdp* mdp_;
  std::vector<double> nu_cdf_;
  std::vector<double> transition_cdf_;  // per pair, S entries
  std::vector<double> policy_cdf_;      // per state, A entries
};

RolloutSample sample_q(const FiniteMdp& mdp, const Vector& theta, const FeatureMap& features,
                       const StateActionDistribution& nu, RngStream& rng);
RolloutSample sample_a(const FiniteMdp& mdp, const Vector& theta, const FeatureMap& features,
                       const StateActionDistribution& nu, RngStream& rng);

struct SgdConfig {
  std::int64_t n_steps = 1000;
  /// <= 0 selects the default for the solver.
  double step_size = 0.0;
  /// Empty means zero.
  Vector init;
  std::uint64_t seed = 0;
  /// Outer iteration index; part of every rollout's stream key.
  std::uint64_t iteration = 0;
  int workers = 1;
};

struct SgdResult {
  Vector w;                      // averaged iterate (w_1 + ... + w_T) / T
  double step_size = 0.0;        // the alpha actually used
  std::int64_t env_steps = 0;    // environment transitions consumed
  std::int64_t samples = 0;      // rollouts consumed (= T)
};

/// alpha = 1 / (2 B^2).
double default_qnpg_step_size(const FeatureMap& features);
/// alpha = 1 / (8 B^2).
double default_npg_step_size(const FeatureMap& features);

/// Averaged SGD on L_Q with w <- w - alpha * 2 (w.phi - q_hat) phi.
SgdResult qnpg_sgd(const FiniteMdp& mdp, const Vector& theta, const FeatureMap& features,
                   const StateActionDistribution& nu, const SgdConfig& config);

/// Averaged SGD on L_A with centered features and a_hat targets.
SgdResult npg_sgd(const FiniteMdp& mdp, const Vector& theta, const FeatureMap& features,
                  const StateActionDistribution& nu, const SgdConfig& config);

/// Draws `count` samples with stream keys (iteration, first + i), in parallel.
/// Output is independent of `workers`.
std::vector<RolloutSample> draw_samples(const RolloutSampler& sampler, bool advantage,
                                        std::uint64_t seed, std::uint64_t iteration,
                                        std::uint64_t first, std::int64_t count, int workers);

/// Single-sample gradient 2 (w.x - target) x.
Vector stochastic_gradient(const Eigen::Ref<const Eigen::RowVectorXd>& x, double target,
                           const Vector& w);

struct MomentEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Empirical E[q_hat^2] over n_draws rollouts.
MomentEstimate estimate_q_hat_second_moment(const FiniteMdp& mdp, const PolicyTable& policy,
                                            const StateActionDistribution& nu,
                                            std::int64_t n_draws, std::uint64_t seed,
                                            int workers = 1);

/// Constants of the averaged-SGD excess risk bound for one regression.
/// sigma is the noise level, radius the feature bound R, mu the smallest
/// eigenvalue of the feature covariance under nu.
struct SgdBoundConstants {
  double sigma = 0.0;
  double radius = 0.0;
  double mu = 0.0;
  double w_star_norm = 0.0;
  int dim = 0;

  /// (4/T)(sigma sqrt(m) + radius ||w_star||)^2.
  [[nodiscard]] double excess_risk_bound(std::int64_t n_steps) const;
};

/// sigma = sqrt(2)/(1-gamma) (B^2/(mu(1-gamma)) + 1), radius = B.
SgdBoundConstants qnpg_sgd_constants(double gamma, double b_norm, double mu,
                                     const Vector& w_star);
/// sigma = 2 sqrt(2)/(1-gamma) (2B^2/mu + 1), radius = 2B.
SgdBoundConstants npg_sgd_constants(double gamma, double b_norm, double mu,
                                    const Vector& w_star);

}  // namespace npg
