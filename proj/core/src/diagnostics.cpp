#include "npg/diagnostics.hpp"

#include "npg/linalg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace npg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_ratio(const Vector& num, const Vector& den) {
  double out = 0.0;
  for (Eigen::Index i = 0; i < num.size(); ++i) {
    if (num[i] <= 0.0) continue;
    if (den[i] <= 0.0) return kInf;
    out = std::max(out, num[i] / den[i]);
  }
  return out;
}

// sum_i h_i^2 / ref_i, +inf if h has mass where ref has none.
double chi_square_moment(const Vector& h, const Vector& ref) {
  double out = 0.0;
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    if (h[i] <= 0.0) continue;
    if (ref[i] <= 0.0) return kInf;
    out += h[i] * h[i] / ref[i];
  }
  return out;
}

StateActionDistribution product_measure(const StateDistribution& d, const PolicyTable& policy) {
  Vector out(d.size() * policy.n_actions());
  for (Eigen::Index s = 0; s < d.size(); ++s) {
    for (int a = 0; a < policy.n_actions(); ++a) {
      out[s * policy.n_actions() + a] = d[s] * policy(static_cast<int>(s), a);
    }
  }
  return StateActionDistribution::normalized(std::move(out));
}

}  // namespace

MismatchCoefficients mismatch_coefficients(const StateDistribution& d_star,
                                           const StateDistribution& d_k,
                                           const StateDistribution& rho, double gamma) {
  return {max_ratio(d_star.probs(), d_k.probs()),
          max_ratio(d_star.probs(), rho.probs()) / (1.0 - gamma)};
}

MismatchCoefficients mismatch_coefficients(const FiniteMdp& mdp, const PolicyTable& comparator,
                                           const PolicyTable& policy_k,
                                           const StateDistribution& rho) {
  return mismatch_coefficients(state_visitation(mdp, comparator, rho),
                               state_visitation(mdp, policy_k, rho), rho, mdp.gamma);
}

double concentrability_rho(const StateDistribution& d_star, const StateDistribution& d_k) {
  return chi_square_moment(d_k.probs(), d_star.probs());
}

double concentrability_rho(const FiniteMdp& mdp, const PolicyTable& comparator,
                           const PolicyTable& policy_k, const StateDistribution& rho) {
  return concentrability_rho(state_visitation(mdp, comparator, rho),
                             state_visitation(mdp, policy_k, rho));
}

double concentrability_ratio(const StateActionDistribution& h,
                             const StateActionDistribution& d_tilde_k) {
  return chi_square_moment(h.probs(), d_tilde_k.probs());
}

double concentrability_nu(const FiniteMdp& mdp, const PolicyTable& comparator,
                          const PolicyTable& policy_k, const PolicyTable& policy_k1,
                          const StateActionDistribution& nu, const StateDistribution& rho,
                          ConcentrabilityVariant variant) {
  const StateActionDistribution reference = state_action_visitation_tilde(mdp, policy_k, nu);
  const StateDistribution d_next = state_visitation(mdp, policy_k1, rho);
  const StateDistribution d_star = state_visitation(mdp, comparator, rho);

  double out = std::max(concentrability_ratio(product_measure(d_next, policy_k1), reference),
                        concentrability_ratio(product_measure(d_star, comparator), reference));
  if (variant == ConcentrabilityVariant::kQnpg) {
    out = std::max(out, concentrability_ratio(product_measure(d_next, policy_k), reference));
    out = std::max(out, concentrability_ratio(product_measure(d_star, policy_k), reference));
  }
  return out;
}

double relative_condition_number(const Matrix& design, const Vector& target_weights,
                                 const Vector& reference_weights) {
  const Matrix target = weighted_covariance(design, target_weights);
  const Matrix reference = weighted_covariance(design, reference_weights);
  const SymmetricRange range = symmetric_range(reference);

  const double scale = std::max(target.norm(), reference.norm());
  if (range.null_basis.cols() > 0) {
    const Matrix leak = range.null_basis.transpose() * target * range.null_basis;
    if (leak.norm() > 1e-9 * std::max(scale, 1e-300)) return kInf;
  }
  if (range.basis.cols() == 0) return 0.0;

  const Vector inv_root = range.values.cwiseSqrt().cwiseInverse();
  const Matrix whitened =
      inv_root.asDiagonal() * (range.basis.transpose() * target * range.basis) *
      inv_root.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (whitened + whitened.transpose()),
                                            Eigen::EigenvaluesOnly);
  return std::max(0.0, eig.eigenvalues().maxCoeff());
}

double relative_condition_number(const FeatureMap& features, const StateDistribution& d_star,
                                 const StateActionDistribution& nu, int n_actions) {
  return relative_condition_number(features.phi(),
                                   comparator_measure(d_star, n_actions).probs(), nu.probs());
}

double comparator_divergence(const StateDistribution& d_star, const PolicyTable& comparator,
                             const PolicyTable& policy_k) {
  return weighted_kl(d_star, comparator, policy_k);
}

std::string to_string(TheoremId id) {
  switch (id) {
    case TheoremId::kT1: return "T1";
    case TheoremId::kT2: return "T2";
    case TheoremId::kT3: return "T3";
    case TheoremId::kT4: return "T4";
    case TheoremId::kT5: return "T5";
    case TheoremId::kC1: return "C1";
    case TheoremId::kC2: return "C2";
  }
  return "?";
}

TheoremId theorem_from_string(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (TheoremId id : {TheoremId::kT1, TheoremId::kT2, TheoremId::kT3, TheoremId::kT4,
                       TheoremId::kT5, TheoremId::kC1, TheoremId::kC2}) {
    if (to_string(id) == upper) return id;
  }
  throw InvariantError("unknown bound '" + name + "'; expected T1..T5, C1 or C2");
}

namespace {

template <class T>
double need(const std::optional<T>& value, TheoremId id, const char* what) {
  if (!value) {
    throw InvariantError(to_string(id) + " bound needs " + std::string(what));
  }
  return static_cast<double>(*value);
}

bool any_infinite(std::initializer_list<double> values) {
  return std::any_of(values.begin(), values.end(), [](double v) { return std::isinf(v); });
}

}  // namespace

double theorem_bound(TheoremId id, const BoundInputs& in) {
  const double g = in.gamma;
  if (!(g >= 0.0 && g < 1.0)) throw InvariantError("theorem_bound: gamma must lie in [0, 1)");
  const double one_minus = 1.0 - g;
  const double k = static_cast<double>(in.k);

  auto linear_head = [&](double vartheta) {
    return std::pow(1.0 - 1.0 / vartheta, k) * 2.0 / one_minus;
  };
  auto sublinear_head = [&](double vartheta, double d0, double eta) {
    if (in.k <= 0) return kInf;
    return (d0 / eta + 2.0 * vartheta) / (one_minus * k);
  };

  switch (id) {
    case TheoremId::kT1:
    case TheoremId::kT2: {
      const double vartheta = need(in.vartheta_rho, id, "the distribution mismatch coefficient");
      const double c_rho = need(in.c_rho, id, "C_rho (state-visitation concentrability)");
      const double kappa = need(in.kappa_nu, id, "kappa_nu (bounded relative condition number)");
      const double stat = need(in.eps_stat, id, "eps_stat (bounded statistical error)");
      const double bias = need(in.eps_bias, id, "eps_bias (bounded transfer error)");
      double head = 0.0;
      double extra = 0.0;
      if (id == TheoremId::kT1) {
        head = linear_head(vartheta);
      } else {
        extra = need(in.d0_star, id, "D_0* (initial comparator divergence)");
        const double eta = need(in.eta, id, "the constant step size");
        if (any_infinite({vartheta, c_rho, kappa, stat, bias, extra})) return kInf;
        head = sublinear_head(vartheta, extra, eta);
      }
      if (any_infinite({vartheta, c_rho, kappa, stat, bias})) return kInf;
      const double floor = 2.0 * std::sqrt(static_cast<double>(in.n_actions)) *
                           (vartheta * std::sqrt(c_rho) + 1.0) / one_minus *
                           (std::sqrt(kappa * stat / one_minus) + std::sqrt(bias));
      return head + floor;
    }
    case TheoremId::kT3:
    case TheoremId::kT4:
    case TheoremId::kT5: {
      const double vartheta = need(in.vartheta_rho, id, "the distribution mismatch coefficient");
      const double c_nu = need(in.c_nu, id, "C_nu (state-action concentrability)");
      const double stat = need(in.eps_stat, id, "eps_stat (bounded statistical error)");
      const double approx = need(in.eps_approx, id, "eps_approx (bounded approximation error)");
      double head = 0.0;
      if (id == TheoremId::kT5) {
        const double d0 = need(in.d0_star, id, "D_0* (initial comparator divergence)");
        const double eta = need(in.eta, id, "the constant step size");
        if (any_infinite({vartheta, c_nu, stat, approx, d0})) return kInf;
        head = sublinear_head(vartheta, d0, eta);
      } else {
        head = linear_head(vartheta);
      }
      if (any_infinite({vartheta, c_nu, stat, approx})) return kInf;
      const double factor = id == TheoremId::kT3 ? 2.0 : 1.0;
      return head + factor * std::sqrt(c_nu) * (vartheta + 1.0) / one_minus *
                        (std::sqrt(stat) + std::sqrt(approx));
    }
    case TheoremId::kC1:
    case TheoremId::kC2: {
      const double vartheta = need(in.vartheta_rho, id, "the distribution mismatch coefficient");
      const double c_nu = need(in.c_nu, id, "C_nu (state-action concentrability)");
      const double approx = need(in.eps_approx, id, "eps_approx (bounded approximation error)");
      const double steps = need(in.sgd_steps, id, "T (SGD steps per iteration)");
      const double b = need(in.b_norm, id, "B (feature norm bound)");
      const double mu = need(in.mu, id, "mu (covariance lower bound)");
      const double m = need(in.dim, id, "m (feature dimension)");
      if (any_infinite({vartheta, c_nu, approx})) return kInf;
      if (!(mu > 0.0)) return kInf;
      const double root_2m = std::sqrt(2.0 * m);
      const double head = linear_head(vartheta);
      if (id == TheoremId::kC1) {
        return head + 2.0 * (vartheta + 1.0) * std::sqrt(c_nu * approx) / one_minus +
               4.0 * std::sqrt(c_nu) * (vartheta + 1.0) /
                   (std::pow(one_minus, 3) * std::sqrt(steps)) *
                   (b * b / mu * (root_2m + 1.0) + one_minus * root_2m);
      }
      return head + (vartheta + 1.0) * std::sqrt(c_nu * approx) / one_minus +
             4.0 * std::sqrt(c_nu) * (vartheta + 1.0) /
                 (std::pow(one_minus, 2) * std::sqrt(steps)) *
                 (2.0 * b * b / mu * (root_2m + 1.0) + root_2m);
    }
  }
  throw InvariantError("theorem_bound: unknown theorem id");
}

}  // namespace npg
