#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace npg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when an input violates a structural invariant (simplex rows,
/// cost range, discount range, dimension mismatch).
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot produce a finite answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kSimplexTolerance = 1e-12;

/**
 * Finite discounted MDP with costs.
 *
 * State-action pairs are flattened row-major by state: pair (s, a) has index
 * s * n_actions + a. `transition` stores P(.|s,a) as row pair(s, a), so its
 * shape is (n_states * n_actions) x n_states. `cost` has shape
 * n_states x n_actions with entries in [0, 1].
 */
struct FiniteMdp {
  int n_states = 0;
  int n_actions = 0;
  Matrix transition;
  Matrix cost;
  double gamma = 0.0;

  [[nodiscard]] int n_pairs() const { return n_states * n_actions; }
  [[nodiscard]] int pair(int s, int a) const { return s * n_actions + a; }
  [[nodiscard]] double p(int s, int a, int next) const { return transition(pair(s, a), next); }
};

/// Throws InvariantError naming the first violated invariant.
void validate(const FiniteMdp& mdp);

/// Rows of P are normalized i.i.d. uniform(0,1] draws, costs are uniform on
/// [0,1). The output depends only on the arguments.
FiniteMdp generate_random_mdp(int n_states, int n_actions, double gamma, std::uint64_t seed);

/// Deterministic chain: action 0 moves left, action 1 moves right, state
/// n_states-1 is an absorbing zero-cost goal and every other pair costs 1.
FiniteMdp generate_chain_mdp(int n_states, double gamma);

namespace detail {

void check_simplex(const Eigen::Ref<const Vector>& probs, const std::string& what);

template <class Tag>
class SimplexVector {
 public:
  SimplexVector() = default;
  explicit SimplexVector(Vector probs) : probs_(std::move(probs)) {
    check_simplex(probs_, Tag::kName);
  }

  /// Clips tiny negative round-off, renormalizes, then validates.
  static SimplexVector normalized(Vector raw) {
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
      if (raw[i] < 0.0 && raw[i] > -1e-12) raw[i] = 0.0;
    }
    const double total = raw.sum();
    if (!(total > 0.0)) throw InvariantError(std::string(Tag::kName) + ": zero total mass");
    return SimplexVector(raw / total);
  }

  static SimplexVector uniform(int n) {
    return SimplexVector(Vector::Constant(n, 1.0 / n));
  }

  static SimplexVector point_mass(int n, int index) {
    Vector v = Vector::Zero(n);
    v[index] = 1.0;
    return SimplexVector(std::move(v));
  }

  [[nodiscard]] const Vector& probs() const { return probs_; }
  [[nodiscard]] double operator[](Eigen::Index i) const { return probs_[i]; }
  [[nodiscard]] Eigen::Index size() const { return probs_.size(); }
  [[nodiscard]] double min() const { return probs_.minCoeff(); }

 private:
  Vector probs_;
};

struct StateTag {
  static constexpr const char* kName = "state distribution";
};
struct StateActionTag {
  static constexpr const char* kName = "state-action distribution";
};

}  // namespace detail

/// A distribution over states (rho, d).
using StateDistribution = detail::SimplexVector<detail::StateTag>;
/// A distribution over flattened state-action pairs (nu, d-bar, d-tilde).
using StateActionDistribution = detail::SimplexVector<detail::StateActionTag>;

/// Uniform over all |S||A| pairs.
StateActionDistribution uniform_state_action(int n_states, int n_actions);

}  // namespace npg
