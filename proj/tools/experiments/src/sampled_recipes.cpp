#include "support.hpp"

#include <npg/serialization.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace npg::experiments {

namespace {

constexpr double kFinalGapFraction = 0.05;
constexpr double kRuntimeLimitSeconds = 300.0;
constexpr double kBoundSlack = 1e-12;

std::string seed_label(const std::string& prefix, int index) {
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%02d", index);
  return prefix + buffer;
}

RecipeResult sampled_recipe(const Config& config, Algorithm algorithm, TheoremId bound_id,
                            int criterion) {
  RecipeResult result;
  const Stopwatch clock;
  const int seeds = positive_int(config, "seeds");
  const Instance inst = build_instance(config, 0);

  double mean_sup_eps_stat = 0.0;
  double max_eps_approx = 0.0;
  double max_eps_bias = 0.0;
  double max_c_nu = 0.0;
  bool step_condition = true;
  for (int i = 0; i < seeds; ++i) {
    RunOptions options = build_options(config, inst, i);
    options.algorithm = algorithm;
    RunTrace trace = run(inst.mdp, inst.features, options);
    mean_sup_eps_stat += trace.sup_eps_stat / seeds;
    max_eps_approx = std::max(max_eps_approx, trace.sup_eps_approx);
    max_eps_bias = std::max(max_eps_bias, trace.sup_eps_bias);
    max_c_nu = std::max(max_c_nu, trace.sup_c_nu);
    step_condition = step_condition && trace.step_condition_holds;
    result.traces.push_back({seed_label("seed_", i), std::move(trace)});
  }
  const double seconds = clock.seconds();

  const RunTrace& first = result.traces.front().trace;
  const std::size_t rows = first.records.size();
  std::vector<double> mean_gap(rows, 0.0);
  for (const LabeledTrace& t : result.traces) {
    for (std::size_t k = 0; k < rows; ++k) mean_gap[k] += t.trace.records[k].gap / seeds;
  }

  std::ostringstream table;
  table << "k,mean_gap,bound\n";
  bool dominated = true;
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rows; ++k) {
    BoundInputs inputs = first.bound_inputs(static_cast<int>(k));
    inputs.eps_stat = mean_sup_eps_stat;
    inputs.eps_approx = max_eps_approx;
    inputs.eps_bias = max_eps_bias;
    inputs.c_nu = max_c_nu;
    const double bound = theorem_bound(bound_id, inputs);
    margin = std::min(margin, bound - mean_gap[k]);
    if (!(bound + kBoundSlack >= mean_gap[k])) dominated = false;
    table << k << ',' << format_double(mean_gap[k]) << ',' << format_double(bound) << '\n';
  }
  result.tables.push_back({"mean_gap.csv", table.str()});

  const double gap0 = mean_gap.front();
  const double final_gap = mean_gap.back();
  const std::string name = to_string(bound_id);
  if (criterion > 0) {
    result.assertions.push_back(make_assertion(
        criterion, "mean final gap over seeds <= 0.05 gap_0",
        final_gap <= kFinalGapFraction * gap0,
        "final " + show(final_gap) + ", gap_0 " + show(gap0) + ", ratio " +
            show(final_gap / gap0)));
  } else {
    result.assertions.push_back(make_assertion(
        0, "mean final gap over seeds < gap_0", final_gap < gap0,
        "final " + show(final_gap) + ", gap_0 " + show(gap0)));
  }
  result.assertions.push_back(make_assertion(
      criterion, name + " bound with measured errors >= mean gap at every k", dominated,
      "min margin " + show(margin) + ", mean sup eps_stat " + show(mean_sup_eps_stat) +
          ", eps_approx " + show(max_eps_approx) + ", C_nu " + show(max_c_nu)));
  result.assertions.push_back(make_assertion(
      criterion, "eta_0 >= ((1-gamma)/gamma) D_0* (step condition of the bound)", step_condition,
      "eta_0 " + show(first.records.front().eta) + ", D_0* " + show(first.d0_star)));
  result.assertions.push_back(make_assertion(criterion, "runtime < 300 s",
                                             seconds < kRuntimeLimitSeconds,
                                             show(seconds) + " s"));
  return result;
}

}  // namespace

RecipeResult recipe_sampled_qnpg(const Config& config) {
  return sampled_recipe(config, Algorithm::kQnpg, TheoremId::kT3, 7);
}

RecipeResult recipe_sampled_npg(const Config& config) {
  return sampled_recipe(config, Algorithm::kNpg, TheoremId::kT4, 0);
}

}  // namespace npg::experiments
