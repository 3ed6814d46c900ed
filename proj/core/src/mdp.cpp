#include "npg/mdp.hpp"

#include "npg/rng.hpp"

#include <cmath>
#include <sstream>

namespace npg {

namespace detail {

void check_simplex(const Eigen::Ref<const Vector>& probs, const std::string& what) {
  if (probs.size() == 0) throw InvariantError(what + ": empty");
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i]) || probs[i] < 0.0) {
      std::ostringstream msg;
      msg << what << ": entry " << i << " = " << probs[i] << " is not a probability";
      throw InvariantError(msg.str());
    }
  }
  const double total = probs.sum();
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": sums to " << total << ", expected 1";
    throw InvariantError(msg.str());
  }
}

}  // namespace detail

void validate(const FiniteMdp& mdp) {
  if (mdp.n_states < 1 || mdp.n_actions < 1) {
    throw InvariantError("mdp: n_states and n_actions must be positive");
  }
  if (!(mdp.gamma >= 0.0 && mdp.gamma < 1.0)) {
    std::ostringstream msg;
    msg << "mdp: gamma = " << mdp.gamma << " outside [0, 1)";
    throw InvariantError(msg.str());
  }
  if (mdp.transition.rows() != mdp.n_pairs() || mdp.transition.cols() != mdp.n_states) {
    throw InvariantError("mdp: transition has wrong shape");
  }
  if (mdp.cost.rows() != mdp.n_states || mdp.cost.cols() != mdp.n_actions) {
    throw InvariantError("mdp: cost has wrong shape");
  }
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      const auto row = mdp.transition.row(mdp.pair(s, a));
      for (int next = 0; next < mdp.n_states; ++next) {
        if (!std::isfinite(row[next]) || row[next] < 0.0) {
          std::ostringstream msg;
          msg << "mdp: P(" << next << "|" << s << "," << a << ") = " << row[next]
              << " is negative or non-finite at (s,a) = (" << s << "," << a << ")";
          throw InvariantError(msg.str());
        }
      }
      const double total = row.sum();
      if (std::abs(total - 1.0) > kSimplexTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "mdp: transition row at (s,a) = (" << s << "," << a << ") sums to " << total;
        throw InvariantError(msg.str());
      }
      const double c = mdp.cost(s, a);
      if (!(c >= 0.0 && c <= 1.0)) {
        std::ostringstream msg;
        msg << "mdp: cost at (s,a) = (" << s << "," << a << ") is " << c << ", outside [0, 1]";
        throw InvariantError(msg.str());
      }
    }
  }
}

FiniteMdp generate_random_mdp(int n_states, int n_actions, double gamma, std::uint64_t seed) {
  if (n_states < 1 || n_actions < 1) {
    throw InvariantError("generate_random_mdp: n_states and n_actions must be positive");
  }
  FiniteMdp mdp;
  mdp.n_states = n_states;
  mdp.n_actions = n_actions;
  mdp.gamma = gamma;
  mdp.transition.resize(mdp.n_pairs(), n_states);
  mdp.cost.resize(n_states, n_actions);

  RngStream rng(seed, 0);
  for (int row = 0; row < mdp.n_pairs(); ++row) {
    for (int next = 0; next < n_states; ++next) {
      mdp.transition(row, next) = 1.0 - rng.uniform();  // (0, 1]
    }
    mdp.transition.row(row) /= mdp.transition.row(row).sum();
  }
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) mdp.cost(s, a) = rng.uniform();
  }
  validate(mdp);
  return mdp;
}

FiniteMdp generate_chain_mdp(int n_states, double gamma) {
  if (n_states < 2) throw InvariantError("generate_chain_mdp: need at least 2 states");
  FiniteMdp mdp;
  mdp.n_states = n_states;
  mdp.n_actions = 2;
  mdp.gamma = gamma;
  mdp.transition = Matrix::Zero(mdp.n_pairs(), n_states);
  mdp.cost = Matrix::Ones(n_states, 2);
  const int goal = n_states - 1;
  for (int s = 0; s < n_states; ++s) {
    if (s == goal) {
      mdp.transition(mdp.pair(s, 0), goal) = 1.0;
      mdp.transition(mdp.pair(s, 1), goal) = 1.0;
      mdp.cost.row(s).setZero();
      continue;
    }
    mdp.transition(mdp.pair(s, 0), s > 0 ? s - 1 : 0) = 1.0;
    mdp.transition(mdp.pair(s, 1), s + 1) = 1.0;
  }
  validate(mdp);
  return mdp;
}

StateActionDistribution uniform_state_action(int n_states, int n_actions) {
  return StateActionDistribution::uniform(n_states * n_actions);
}

}  // namespace npg
