#include "support.hpp"

#include <npg/serialization.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace npg::experiments {

const std::vector<RecipeInfo>& recipe_catalog() {
  static const std::vector<RecipeInfo> catalog = {
      {"exact_tabular_linear",
       "exact Q-NPG, one-hot features, geometric steps: linear rate, rate-gamma case, bound soundness",
       {}},
      {"exact_constant_sublinear",
       "exact Q-NPG with constant step 10: sublinear average-gap bound",
       {{"schedule.kind", "constant"}, {"schedule.eta", "10"}, {"iterations", "100"}}},
      {"approx_features_linear",
       "exact Q-NPG and NPG with reduced features: bounds with nonzero approximation error",
       {{"features.kind", "reduced"}, {"features.dim", "50"}, {"seeds", "3"}}},
      {"sampled_qnpg",
       "Q-NPG with averaged SGD on sampled Q estimates, compared with its expected-gap bound",
       {{"mdp.n_states", "6"},
        {"mdp.n_actions", "3"},
        {"mode", "sgd"},
        {"schedule.eta0", "1"},
        {"iterations", "15"},
        {"sgd.steps", "20000"}}},
      {"sampled_npg",
       "NPG with averaged SGD on sampled advantage estimates, compared with its expected-gap bound",
       {{"algorithm", "npg"},
        {"mdp.n_states", "6"},
        {"mdp.n_actions", "3"},
        {"mode", "sgd"},
        {"schedule.eta0", "1"},
        {"iterations", "15"},
        {"sgd.steps", "20000"}}},
      {"sampler_validation",
       "rollout sampler against exact visitation, Q, A and the second-moment bound",
       {{"mdp.n_states", "4"}, {"mdp.n_actions", "3"}}},
      {"sgd_rate",
       "averaged SGD excess risk: 1/T rate and the explicit excess-risk bound",
       {{"mdp.n_states", "4"}, {"mdp.n_actions", "3"}, {"seeds", "20"}, {"sgd.steps", "2000"}}},
      {"identity_checks",
       "performance difference, mirror-descent equivalence, Fisher direction and other identities",
       {{"mdp.n_states", "6"}, {"mdp.n_actions", "3"}}},
  };
  return catalog;
}

const RecipeInfo& find_recipe(const std::string& name) {
  const auto& catalog = recipe_catalog();
  const auto it = std::find_if(catalog.begin(), catalog.end(),
                               [&](const RecipeInfo& r) { return r.name == name; });
  if (it == catalog.end()) {
    throw ConfigError("unknown recipe '" + name + "' (see --list)");
  }
  return *it;
}

std::string list_recipes() {
  std::string out;
  for (const auto& info : recipe_catalog()) out += info.name + "  " + info.description + "\n";
  return out;
}

bool RecipeResult::passed() const {
  return std::all_of(assertions.begin(), assertions.end(),
                     [](const Assertion& a) { return a.passed; });
}

RecipeResult run_recipe(const Config& config) {
  const std::string name = config.get_string("recipe");
  find_recipe(name);
  Stopwatch clock;
  RecipeResult result;
  if (name == "exact_tabular_linear") result = recipe_exact_tabular_linear(config);
  if (name == "exact_constant_sublinear") result = recipe_exact_constant_sublinear(config);
  if (name == "approx_features_linear") result = recipe_approx_features_linear(config);
  if (name == "sampled_qnpg") result = recipe_sampled_qnpg(config);
  if (name == "sampled_npg") result = recipe_sampled_npg(config);
  if (name == "sampler_validation") result = recipe_sampler_validation(config);
  if (name == "sgd_rate") result = recipe_sgd_rate(config);
  if (name == "identity_checks") result = recipe_identity_checks(config);
  result.recipe = name;
  result.runtime_seconds = clock.seconds();
  return result;
}

std::string summary_text(const RecipeResult& result) {
  std::ostringstream out;
  out << "recipe " << result.recipe << '\n';
  for (const Assertion& a : result.assertions) {
    out << (a.passed ? "PASS" : "FAIL") << "  ";
    if (a.criterion > 0) {
      out << "criterion " << a.criterion;
    } else {
      out << "property";
    }
    out << "  " << a.description;
    if (!a.detail.empty()) out << "  [" << a.detail << "]";
    out << '\n';
  }
  for (const LabeledTrace& t : result.traces) {
    for (const IterationRecord& r : t.trace.records) {
      const auto vacuous = std::find_if(r.bounds.begin(), r.bounds.end(), [&](const auto& kv) {
        return r.k > 0 && std::isinf(kv.second);
      });
      if (vacuous != r.bounds.end()) {
        out << "bound vacuous  " << t.label << "  " << vacuous->first << " is +inf\n";
        break;
      }
    }
  }
  out << "overall " << (result.passed() ? "PASS" : "FAIL") << '\n';
  out << "runtime_seconds " << show(result.runtime_seconds) << '\n';
  return out.str();
}

void write_artifacts(const RecipeResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  auto open = [&](const std::string& name) {
    std::ofstream file(dir / name);
    if (!file) throw std::runtime_error("cannot write '" + (dir / name).string() + "'");
    return file;
  };

  nlohmann::json coefficients;
  coefficients["recipe"] = result.recipe;
  coefficients["traces"] = nlohmann::json::object();
  for (const LabeledTrace& t : result.traces) {
    auto csv = open(t.label + ".csv");
    write_trace_csv(csv, t.trace);
    coefficients["traces"][t.label] = trace_to_json(t.trace);
  }
  open("coefficients.json") << coefficients.dump(1) << '\n';
  for (const TableArtifact& table : result.tables) open(table.file_name) << table.contents;
  open("summary.txt") << summary_text(result);
}

}  // namespace npg::experiments
