#include "npg/mc_sampling.hpp"

#include "npg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace npg {

namespace {

void append_cdf(std::vector<double>& out, const Eigen::Ref<const Eigen::RowVectorXd>& probs) {
  double running = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    running += probs[i];
    out.push_back(running);
  }
}

void check_steps(std::int64_t steps) {
  if (steps > kMaxRolloutSteps) {
    throw NumericalError("rollout exceeded " + std::to_string(kMaxRolloutSteps) + " steps");
  }
}

}  // namespace

RolloutSampler::RolloutSampler(const FiniteMdp& mdp, const PolicyTable& policy,
                               const StateActionDistribution& nu)
    : mdp_(&mdp) {
  if (policy.n_states() != mdp.n_states || policy.n_actions() != mdp.n_actions) {
    throw InvariantError("sampler: policy shape does not match the MDP");
  }
  if (nu.size() != mdp.n_pairs()) throw InvariantError("sampler: nu has wrong size");
  append_cdf(nu_cdf_, nu.probs().transpose());
  transition_cdf_.reserve(static_cast<std::size_t>(mdp.n_pairs()) * mdp.n_states);
  for (int row = 0; row < mdp.n_pairs(); ++row) append_cdf(transition_cdf_, mdp.transition.row(row));
  for (int s = 0; s < mdp.n_states; ++s) append_cdf(policy_cdf_, policy.probs().row(s));
}

int RolloutSampler::draw(const std::vector<double>& cdf, std::size_t offset, std::size_t n,
                         double u) const {
  const auto begin = cdf.begin() + static_cast<std::ptrdiff_t>(offset);
  const auto end = begin + static_cast<std::ptrdiff_t>(n);
  const double scaled = u * *(end - 1);
  auto it = std::upper_bound(begin, end, scaled);
  if (it == end) --it;
  // Skip zero-probability slots that share the previous cumulative value.
  while (it != begin && *(it - 1) == *it) --it;
  return static_cast<int>(it - begin);
}

int RolloutSampler::next_state(int s, int a, RngStream& rng) const {
  const auto n = static_cast<std::size_t>(mdp_->n_states);
  return draw(transition_cdf_, static_cast<std::size_t>(mdp_->pair(s, a)) * n, n, rng.uniform());
}

int RolloutSampler::next_action(int s, RngStream& rng) const {
  const auto n = static_cast<std::size_t>(mdp_->n_actions);
  return draw(policy_cdf_, static_cast<std::size_t>(s) * n, n, rng.uniform());
}

double RolloutSampler::q_phase(int s, int a, RngStream& rng, std::int64_t& steps) const {
  double total = mdp_->cost(s, a);
  std::int64_t local = 0;
  while (rng.bernoulli(mdp_->gamma)) {
    check_steps(++local);
    s = next_state(s, a, rng);
    a = next_action(s, rng);
    total += mdp_->cost(s, a);
  }
  steps += local;
  return total;
}

RolloutSample RolloutSampler::sample_q(RngStream& rng) const {
  const int first = draw(nu_cdf_, 0, nu_cdf_.size(), rng.uniform());
  int s = first / mdp_->n_actions;
  int a = first % mdp_->n_actions;
  std::int64_t h = 0;
  while (rng.bernoulli(mdp_->gamma)) {
    check_steps(++h);
    s = next_state(s, a, rng);
    a = next_action(s, rng);
  }
  RolloutSample out;
  out.state = s;
  out.action = a;
  out.accept_time = h;
  out.trajectory_len = h + 1;
  out.q_hat = q_phase(s, a, rng, out.trajectory_len);
  out.estimate = out.q_hat;
  return out;
}

RolloutSample RolloutSampler::sample_a(RngStream& rng) const {
  RolloutSample out = sample_q(rng);
  int s = out.state;
  std::int64_t local = 0;
  while (true) {
    check_steps(++local);
    const int a = next_action(s, rng);
    out.v_hat += mdp_->cost(s, a);
    if (!rng.bernoulli(mdp_->gamma)) break;
    s = next_state(s, a, rng);
  }
  out.trajectory_len += local;
  out.estimate = out.q_hat - out.v_hat;
  return out;
}

RolloutSample sample_q(const FiniteMdp& mdp, const Vector& theta, const FeatureMap& features,
                       const StateActionDistribution& nu, RngStream& rng) {
  const PolicyTable policy = policy_table(theta, features);
  return RolloutSampler(mdp, policy, nu).sample_q(rng);
}

RolloutSample sample_a(const FiniteMdp& mdp, const Vector& theta, const FeatureMap& features,
                       const StateActionDistribution& nu, RngStream& rng) {
  const PolicyTable policy = policy_table(theta, features);
  return RolloutSampler(mdp, policy, nu).sample_a(rng);
}

std::vector<RolloutSample> draw_samples(const RolloutSampler& sampler, bool advantage,
                                        std::uint64_t seed, std::uint64_t iteration,
                                        std::uint64_t first, std::int64_t count, int workers) {
  std::vector<RolloutSample> out(static_cast<std::size_t>(count));
  auto fill = [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      RngStream rng(seed, RngStream::stream_key(iteration, first + static_cast<std::uint64_t>(i)));
      out[static_cast<std::size_t>(i)] = advantage ? sampler.sample_a(rng) : sampler.sample_q(rng);
    }
  };
  const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (n_workers == 1) {
    fill(0, count);
    return out;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_workers));
  const std::int64_t chunk = (count + n_workers - 1) / n_workers;
  for (int w = 0; w < n_workers; ++w) {
    const std::int64_t begin = w * chunk;
    const std::int64_t end = std::min(count, begin + chunk);
    threads.emplace_back([&, w, begin, end] {
      try {
        fill(begin, end);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

Vector stochastic_gradient(const Eigen::Ref<const Eigen::RowVectorXd>& x, double target,
                           const Vector& w) {
  return 2.0 * (x.dot(w) - target) * x.transpose();
}

double default_qnpg_step_size(const FeatureMap& features) {
  return 1.0 / (2.0 * features.b_norm() * features.b_norm());
}

double default_npg_step_size(const FeatureMap& features) {
  return 1.0 / (8.0 * features.b_norm() * features.b_norm());
}

namespace {

constexpr std::int64_t kPrefetchBlock = 8192;

SgdResult averaged_sgd(const RolloutSampler& sampler, bool advantage, const Matrix& design,
                       int n_actions, double step_size, const SgdConfig& config) {
  if (config.n_steps < 1) throw InvariantError("SGD needs n_steps >= 1");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw InvariantError("SGD step size must be positive and finite");
  }
  const Eigen::Index m = design.cols();
  Vector w = config.init.size() == 0 ? Vector::Zero(m) : config.init;
  if (w.size() != m) throw InvariantError("SGD init has wrong dimension");

  SgdResult result;
  result.step_size = step_size;
  Vector sum = Vector::Zero(m);
  std::int64_t t = 0;
  while (t < config.n_steps) {
    const std::int64_t count = std::min(kPrefetchBlock, config.n_steps - t);
    const auto block = draw_samples(sampler, advantage, config.seed, config.iteration,
                                    static_cast<std::uint64_t>(t), count, config.workers);
    for (const RolloutSample& sample : block) {
      const auto x = design.row(static_cast<Eigen::Index>(sample.state) * n_actions + sample.action);
      w -= step_size * 2.0 * (x.dot(w) - sample.estimate) * x.transpose();
      if (!w.allFinite()) {
        throw NumericalError("SGD iterate became non-finite at step " + std::to_string(t + 1) +
                             "; step size too large for the feature scale");
      }
      sum += w;
      result.env_steps += sample.trajectory_len;
      ++t;
    }
  }
  result.w = sum / static_cast<double>(config.n_steps);
  result.samples = config.n_steps;
  return result;
}

}  // namespace

SgdResult qnpg_sgd(const FiniteMdp& mdp, const Vector& theta, const FeatureMap& features,
                   const StateActionDistribution& nu, const SgdConfig& config) {
  const PolicyTable policy = policy_table(theta, features);
  const RolloutSampler sampler(mdp, policy, nu);
  const double alpha = config.step_size > 0.0 ? config.step_size : default_qnpg_step_size(features);
  return averaged_sgd(sampler, false, features.phi(), mdp.n_actions, alpha, config);
}

SgdResult npg_sgd(const FiniteMdp& mdp, const Vector& theta, const FeatureMap& features,
                  const StateActionDistribution& nu, const SgdConfig& config) {
  const PolicyTable policy = policy_table(theta, features);
  const RolloutSampler sampler(mdp, policy, nu);
  const double alpha = config.step_size > 0.0 ? config.step_size : default_npg_step_size(features);
  return averaged_sgd(sampler, true, centered_features(policy, features), mdp.n_actions, alpha,
                      config);
}

MomentEstimate estimate_q_hat_second_moment(const FiniteMdp& mdp, const PolicyTable& policy,
                                            const StateActionDistribution& nu,
                                            std::int64_t n_draws, std::uint64_t seed,
                                            int workers) {
  if (n_draws < 2) throw InvariantError("second-moment estimate needs at least 2 draws");
  const RolloutSampler sampler(mdp, policy, nu);
  const auto samples = draw_samples(sampler, false, seed, 0, 0, n_draws, workers);
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& sample : samples) {
    const double x = sample.q_hat * sample.q_hat;
    sum += x;
    sum_sq += x * x;
  }
  const auto n = static_cast<double>(n_draws);
  MomentEstimate out;
  out.mean = sum / n;
  const double variance = std::max(0.0, (sum_sq - n * out.mean * out.mean) / (n - 1.0));
  out.std_error = std::sqrt(variance / n);
  return out;
}

double SgdBoundConstants::excess_risk_bound(std::int64_t n_steps) const {
  const double root = sigma * std::sqrt(static_cast<double>(dim)) + radius * w_star_norm;
  return 4.0 / static_cast<double>(n_steps) * root * root;
}

SgdBoundConstants qnpg_sgd_constants(double gamma, double b_norm, double mu,
                                     const Vector& w_star) {
  SgdBoundConstants out;
  out.mu = mu;
  out.radius = b_norm;
  out.w_star_norm = w_star.norm();
  out.dim = static_cast<int>(w_star.size());
  out.sigma = std::sqrt(2.0) / (1.0 - gamma) * (b_norm * b_norm / (mu * (1.0 - gamma)) + 1.0);
  return out;
}

SgdBoundConstants npg_sgd_constants(double gamma, double b_norm, double mu,
                                    const Vector& w_star) {
  SgdBoundConstants out;
  out.mu = mu;
  out.radius = 2.0 * b_norm;
  out.w_star_norm = w_star.norm();
  out.dim = static_cast<int>(w_star.size());
  out.sigma = 2.0 * std::sqrt(2.0) / (1.0 - gamma) * (2.0 * b_norm * b_norm / mu + 1.0);
  return out;
}

}  // namespace npg
