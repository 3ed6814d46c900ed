#pragma once

// Reference computations that avoid the library's solvers: truncated power
// series, value iteration and explicit loops.

#include <npg/exact_oracle.hpp>
#include <npg/loglinear_policy.hpp>

#include <cmath>
#include <random>

namespace npg::testing {

inline constexpr int kSeriesTerms = 2000;

// V = sum_t gamma^t (P^pi)^t c^pi, by iterating v <- c + gamma P v.
inline Vector series_values(const FiniteMdp& mdp, const PolicyTable& pi, int terms = kSeriesTerms) {
  const int S = mdp.n_states;
  const int A = mdp.n_actions;
  Vector v = Vector::Zero(S);
  for (int t = 0; t < terms; ++t) {
    Vector next = Vector::Zero(S);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        double cont = 0.0;
        for (int n = 0; n < S; ++n) cont += mdp.p(s, a, n) * v[n];
        next[s] += pi(s, a) * (mdp.cost(s, a) + mdp.gamma * cont);
      }
    }
    v = next;
  }
  return v;
}

inline Matrix q_from_values(const FiniteMdp& mdp, const Vector& v) {
  Matrix q(mdp.n_states, mdp.n_actions);
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      double cont = 0.0;
      for (int n = 0; n < mdp.n_states; ++n) cont += mdp.p(s, a, n) * v[n];
      q(s, a) = mdp.cost(s, a) + mdp.gamma * cont;
    }
  }
  return q;
}

// (1 - gamma) sum_t gamma^t rho^T (P^pi)^t.
inline Vector series_visitation(const FiniteMdp& mdp, const PolicyTable& pi, const Vector& rho,
                                int terms = kSeriesTerms) {
  const int S = mdp.n_states;
  Vector mass = rho;
  Vector total = Vector::Zero(S);
  double weight = 1.0 - mdp.gamma;
  for (int t = 0; t < terms; ++t) {
    total += weight * mass;
    Vector next = Vector::Zero(S);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < mdp.n_actions; ++a) {
        for (int n = 0; n < S; ++n) next[n] += mass[s] * pi(s, a) * mdp.p(s, a, n);
      }
    }
    mass = next;
    weight *= mdp.gamma;
  }
  return total;
}

// Same series on the pair chain (s, a) -> (s', a') with P(s'|s,a) pi(s', a').
inline Vector series_pair_visitation(const FiniteMdp& mdp, const PolicyTable& pi,
                                     const Vector& nu, int terms = kSeriesTerms) {
  const int S = mdp.n_states;
  const int A = mdp.n_actions;
  Vector mass = nu;
  Vector total = Vector::Zero(S * A);
  double weight = 1.0 - mdp.gamma;
  for (int t = 0; t < terms; ++t) {
    total += weight * mass;
    Vector next = Vector::Zero(S * A);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        for (int n = 0; n < S; ++n) {
          for (int b = 0; b < A; ++b) next[n * A + b] += mass[s * A + a] * mdp.p(s, a, n) * pi(n, b);
        }
      }
    }
    mass = next;
    weight *= mdp.gamma;
  }
  return total;
}

// Optimal values by value iteration.
inline Vector value_iteration(const FiniteMdp& mdp, int sweeps = kSeriesTerms) {
  Vector v = Vector::Zero(mdp.n_states);
  for (int t = 0; t < sweeps; ++t) v = q_from_values(mdp, v).rowwise().minCoeff();
  return v;
}

// softmax(Phi_s theta) with plain exponentials; fine for moderate logits.
inline Matrix brute_softmax(const FeatureMap& features, const Vector& theta) {
  const int S = features.n_states();
  const int A = features.n_actions();
  Matrix out(S, A);
  for (int s = 0; s < S; ++s) {
    double total = 0.0;
    for (int a = 0; a < A; ++a) {
      out(s, a) = std::exp(features.row(s, a).dot(theta));
      total += out(s, a);
    }
    out.row(s) /= total;
  }
  return out;
}

inline Vector random_simplex(int n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(gen);
  return v / v.sum();
}

inline Vector random_normal(int n, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(gen);
  return v;
}

inline PolicyTable random_policy(int S, int A, std::mt19937_64& gen) {
  Matrix probs(S, A);
  for (int s = 0; s < S; ++s) probs.row(s) = random_simplex(A, gen).transpose();
  return PolicyTable(probs);
}

// V_rho(theta) through the series oracle.
inline double series_objective(const FiniteMdp& mdp, const FeatureMap& features,
                               const Vector& theta, const Vector& rho) {
  const PolicyTable pi(brute_softmax(features, theta));
  return rho.dot(series_values(mdp, pi));
}

}  // namespace npg::testing
