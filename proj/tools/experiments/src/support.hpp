#pragma once

#include "npg/experiments/config.hpp"
#include "npg/experiments/recipes.hpp"

#include <npg/npg_driver.hpp>

#include <chrono>
#include <limits>
#include <string>

namespace npg::experiments {

struct Instance {
  FiniteMdp mdp;
  FeatureMap features;
};

/// MDP and features for repetition `index` (generator seed mdp.seed + index).
Instance build_instance(const Config& config, int index);
StateDistribution build_rho(const Config& config, const FiniteMdp& mdp);
StateActionDistribution build_nu(const Config& config, const FiniteMdp& mdp);
/// Driver options from the config; the SGD seed is seed + index.
RunOptions build_options(const Config& config, const Instance& instance, int index);

Algorithm parse_algorithm(const Config& config);

/// Positive count read from `key`.
int positive_int(const Config& config, const std::string& key);

Assertion make_assertion(int criterion, std::string description, bool passed,
                         std::string detail);

/// Short human-readable number for assertion details.
std::string show(double value);

/// Every bound stored in the trace against the quantity it controls: the
/// running average for the sublinear bounds, the gap otherwise.
struct Domination {
  bool holds = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::string worst_where;
};
Domination check_domination(const RunTrace& trace, double slack);
void merge(Domination& into, const Domination& other, const std::string& label);

/// vartheta_k <= vartheta_rho at every record, up to `slack`.
bool mismatch_ordered(const RunTrace& trace, double slack);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

RecipeResult recipe_exact_tabular_linear(const Config& config);
RecipeResult recipe_exact_constant_sublinear(const Config& config);
RecipeResult recipe_approx_features_linear(const Config& config);
RecipeResult recipe_sampled_qnpg(const Config& config);
RecipeResult recipe_sampled_npg(const Config& config);
RecipeResult recipe_sampler_validation(const Config& config);
RecipeResult recipe_sgd_rate(const Config& config);
RecipeResult recipe_identity_checks(const Config& config);

}  // namespace npg::experiments
