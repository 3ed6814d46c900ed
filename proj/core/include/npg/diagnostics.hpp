#pragma once

#include "npg/cfa_regression.hpp"

#include <optional>
#include <string>

namespace npg {

/// Coefficients measured at one iterate. Infinite values are kept as +inf.
struct CoefficientReport {
  double vartheta_rho = 0.0;
  double vartheta_k = 0.0;
  double c_rho = 0.0;
  double c_nu = 0.0;
  double kappa_nu = 0.0;
  double sigma_nu_min_eig = 0.0;
  double b_norm = 0.0;
  double d_kstar = 0.0;
};

struct MismatchCoefficients {
  double vartheta_k = 0.0;
  double vartheta_rho = 0.0;
};

/// vartheta_k = max_s d*_s / d^(k)_s and vartheta_rho = max_s d*_s / rho_s / (1-gamma).
/// A zero denominator under positive numerator gives +inf.
MismatchCoefficients mismatch_coefficients(const StateDistribution& d_star,
                                           const StateDistribution& d_k,
                                           const StateDistribution& rho, double gamma);
MismatchCoefficients mismatch_coefficients(const FiniteMdp& mdp, const PolicyTable& comparator,
                                           const PolicyTable& policy_k,
                                           const StateDistribution& rho);

/// E_{s ~ d*}[(d^(k)_s / d*_s)^2].
double concentrability_rho(const StateDistribution& d_star, const StateDistribution& d_k);
double concentrability_rho(const FiniteMdp& mdp, const PolicyTable& comparator,
                           const PolicyTable& policy_k, const StateDistribution& rho);

/// Which members of the comparison list enter C_nu.
enum class ConcentrabilityVariant {
  kQnpg,  // all four
  kNpg,   // first and fourth only
};

/// E_{d-tilde^(k)}[(h / d-tilde^(k))^2] for one comparison measure h.
double concentrability_ratio(const StateActionDistribution& h,
                             const StateActionDistribution& d_tilde_k);

/// Max over the comparison list built from d^(k+1) pi^(k+1), d^(k+1) pi^(k),
/// d* pi^(k) and d* pi*, with state visitations started from rho and the
/// reference d-tilde^(k) started from nu.
double concentrability_nu(const FiniteMdp& mdp, const PolicyTable& comparator,
                          const PolicyTable& policy_k, const PolicyTable& policy_k1,
                          const StateActionDistribution& nu, const StateDistribution& rho,
                          ConcentrabilityVariant variant = ConcentrabilityVariant::kQnpg);

/// Largest generalized eigenvalue of (Sigma_target, Sigma_reference) with
/// Sigma = Phi^T diag(weights) Phi, taken on range(Sigma_reference). Returns
/// +inf when Sigma_target has mass outside that range.
double relative_condition_number(const Matrix& design, const Vector& target_weights,
                                 const Vector& reference_weights);

/// kappa_nu with target d-tilde*_{s,a} = d*_s / |A| and reference nu.
double relative_condition_number(const FeatureMap& features, const StateDistribution& d_star,
                                 const StateActionDistribution& nu, int n_actions);

/// D*_k = sum_s d*_s KL(pi*_s, pi^(k)_s).
double comparator_divergence(const StateDistribution& d_star, const PolicyTable& comparator,
                             const PolicyTable& policy_k);

enum class TheoremId { kT1, kT2, kT3, kT4, kT5, kC1, kC2 };

std::string to_string(TheoremId id);
/// Accepts "T1".."T5", "C1", "C2" (case-insensitive).
TheoremId theorem_from_string(const std::string& name);

/// Inputs to a bound. Only the fields the chosen bound references must be set.
struct BoundInputs {
  double gamma = 0.0;
  int n_actions = 0;
  /// Iteration k (K for the corollaries).
  int k = 0;
  std::optional<double> vartheta_rho;
  std::optional<double> c_rho;
  std::optional<double> c_nu;
  std::optional<double> kappa_nu;
  std::optional<double> eps_stat;
  std::optional<double> eps_bias;
  std::optional<double> eps_approx;
  std::optional<double> d0_star;
  std::optional<double> eta;
  std::optional<long long> sgd_steps;
  std::optional<double> b_norm;
  std::optional<double> mu;
  std::optional<int> dim;
};

/// Right-hand side of the chosen bound. Throws InvariantError naming the
/// missing assumption when a referenced input is absent. Any infinite input
/// yields +inf. The sublinear bounds (T2, T5) bound the running average of
/// the first k gaps and are +inf at k = 0.
double theorem_bound(TheoremId id, const BoundInputs& inputs);

}  // namespace npg
