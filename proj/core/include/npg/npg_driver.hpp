#pragma once

#include "npg/diagnostics.hpp"
#include "npg/mc_sampling.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace npg {

/// Outer step sizes. The geometric schedule keeps log(eta) so that large k
/// never overflows.
class StepSchedule {
 public:
  enum class Kind { kGeometric, kConstant };

  /// eta_k = eta0 / gamma^k.
  static StepSchedule geometric(double eta0, double gamma);
  /// eta_k = eta.
  static StepSchedule constant(double eta);

  [[nodiscard]] double eta(int k) const;
  [[nodiscard]] double log_eta(int k) const;
  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double eta0() const { return eta0_; }

 private:
  Kind kind_ = Kind::kConstant;
  double eta0_ = 1.0;
  double log_eta0_ = 0.0;
  double log_growth_ = 0.0;
};

/// ((1-gamma)/gamma) log|A|, floored at 1e-8. Upper-bounds the required
/// ((1-gamma)/gamma) D_0* whenever theta_0 = 0.
double default_eta0(int n_actions, double gamma);

enum class Algorithm { kQnpg, kNpg };
enum class SolveMode { kExact, kSgd };
/// Regression weights: d-tilde^(k)(nu) or d-bar^(k)(rho).
enum class RegressionWeighting { kTilde, kBar };

std::string to_string(Algorithm a);
std::string to_string(SolveMode m);
std::string to_string(RegressionWeighting w);

struct RunOptions {
  Algorithm algorithm = Algorithm::kQnpg;
  StateDistribution rho;
  StateActionDistribution nu;
  StepSchedule schedule = StepSchedule::constant(1.0);
  int iterations = 10;
  SolveMode mode = SolveMode::kExact;
  SgdConfig sgd;
  /// Defaults to the policy-iteration optimum.
  std::optional<PolicyTable> comparator;
  RegressionWeighting weighting = RegressionWeighting::kTilde;
  /// Bound written to the `bound` column; empty picks the default for the
  /// algorithm, schedule and mode.
  std::optional<TheoremId> headline_bound;
};

struct IterationRecord {
  int k = 0;
  double eta = 0.0;
  double value = 0.0;
  double gap = 0.0;
  /// Mean of gap_0 .. gap_{k-1}; NaN at k = 0.
  double running_average_gap = 0.0;
  double eps_stat = 0.0;
  double eps_bias = 0.0;
  double eps_approx = 0.0;
  double d_kstar = 0.0;
  CoefficientReport coefficients;
  double bound = 0.0;
  std::map<std::string, double> bounds;
  /// Environment steps consumed by this iteration's regression.
  std::int64_t samples = 0;
  /// Max entry difference between the parameter update and the row-wise
  /// mirror-descent update (both raw and centered scores).
  double pmd_deviation = 0.0;
  Vector theta;
  PolicyTable policy;
};

struct RunTrace {
  Algorithm algorithm = Algorithm::kQnpg;
  SolveMode mode = SolveMode::kExact;
  StepSchedule::Kind schedule = StepSchedule::Kind::kGeometric;
  TheoremId headline_bound = TheoremId::kT1;
  double gamma = 0.0;
  int n_actions = 0;
  double value_star = 0.0;
  double d0_star = 0.0;
  /// True when eta_0 >= ((1-gamma)/gamma) D_0*.
  bool step_condition_holds = true;
  std::int64_t sgd_steps = 0;
  /// Run-wide suprema used by every bound.
  double sup_eps_stat = 0.0;
  double sup_eps_bias = 0.0;
  double sup_eps_approx = 0.0;
  double sup_c_rho = 0.0;
  double sup_c_nu = 0.0;
  double mu = 0.0;
  double vartheta_rho = 0.0;
  double kappa_nu = 0.0;
  double b_norm = 0.0;
  int dim = 0;
  /// Set for the constant schedule.
  std::optional<double> constant_eta;
  PolicyTable comparator;
  std::vector<IterationRecord> records;

  /// Bound inputs at iteration k from the run-wide suprema.
  [[nodiscard]] BoundInputs bound_inputs(int k) const;
  /// The bounds valid for this run's algorithm, schedule and mode.
  [[nodiscard]] std::vector<TheoremId> applicable_bounds() const;
};

/// Runs K outer iterations from theta_0 = 0. Row K of the trace has no
/// regression, so its eps and C_nu entries are NaN.
RunTrace run_qnpg(const FiniteMdp& mdp, const FeatureMap& features, RunOptions options);
RunTrace run_npg(const FiniteMdp& mdp, const FeatureMap& features, RunOptions options);
RunTrace run(const FiniteMdp& mdp, const FeatureMap& features, const RunOptions& options);

/// Fills the `bound` and `bounds` fields from the suprema. Called by run();
/// exposed so callers that change the suprema can recompute.
void fill_bounds(RunTrace& trace);

}  // namespace npg
