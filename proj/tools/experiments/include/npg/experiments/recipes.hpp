#pragma once

#include "npg/experiments/config.hpp"

#include <npg/npg_driver.hpp>

#include <string>
#include <utility>
#include <vector>

namespace npg::experiments {

struct RecipeInfo {
  std::string name;
  std::string description;
  /// Config defaults that differ from the shared ones.
  std::vector<std::pair<std::string, std::string>> overrides;
};

/// The eight recipes in listing order.
const std::vector<RecipeInfo>& recipe_catalog();
/// Throws ConfigError for an unknown name.
const RecipeInfo& find_recipe(const std::string& name);

/// One checked claim. criterion is the acceptance criterion number, or 0 for
/// a supporting property.
struct Assertion {
  int criterion = 0;
  std::string description;
  bool passed = false;
  std::string detail;
};

struct LabeledTrace {
  std::string label;
  RunTrace trace;
};

/// A recipe-specific table written next to the traces.
struct TableArtifact {
  std::string file_name;
  std::string contents;
};

struct RecipeResult {
  std::string recipe;
  std::vector<Assertion> assertions;
  std::vector<LabeledTrace> traces;
  std::vector<TableArtifact> tables;
  double runtime_seconds = 0.0;

  [[nodiscard]] bool passed() const;
};

/// Runs the recipe named by config "recipe".
RecipeResult run_recipe(const Config& config);

/// Writes <label>.csv per trace, coefficients.json, each table and
/// summary.txt into `out_dir` (created if missing).
void write_artifacts(const RecipeResult& result, const std::string& out_dir);

/// One line per assertion, then vacuous-bound notes and the runtime.
std::string summary_text(const RecipeResult& result);

/// Recipe names with descriptions, one per line.
std::string list_recipes();

}  // namespace npg::experiments
