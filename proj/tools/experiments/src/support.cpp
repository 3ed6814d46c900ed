#include "support.hpp"

#include <npg/serialization.hpp>

#include <cmath>
#include <cstdio>
#include <limits>

namespace npg::experiments {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw ConfigError("config key '" + key + "': expected " + expected + ", got '" + value + "'");
}

}  // namespace

int positive_int(const Config& config, const std::string& key) {
  const long long value = config.get_int(key);
  if (value < 1 || value > std::numeric_limits<int>::max()) {
    bad_value(key, config.get_string(key), "a positive integer");
  }
  return static_cast<int>(value);
}

Instance build_instance(const Config& config, int index) {
  const double gamma = config.get_double("gamma");
  if (!(gamma >= 0.0 && gamma < 1.0)) bad_value("gamma", config.get_string("gamma"), "[0, 1)");

  Instance out;
  std::optional<FeatureMap> file_features;
  const std::string generator = config.get_string("mdp.generator");
  if (generator == "random") {
    out.mdp = generate_random_mdp(positive_int(config, "mdp.n_states"),
                                  positive_int(config, "mdp.n_actions"), gamma,
                                  config.get_uint64("mdp.seed") + static_cast<std::uint64_t>(index));
  } else if (generator == "chain") {
    out.mdp = generate_chain_mdp(positive_int(config, "mdp.n_states"), gamma);
  } else if (generator == "file") {
    const std::string path = config.get_string("mdp.path");
    if (path.empty()) bad_value("mdp.path", path, "a file path when mdp.generator = file");
    MdpDocument doc = load_mdp(path);
    out.mdp = std::move(doc.mdp);
    out.mdp.gamma = gamma;
    file_features = std::move(doc.features);
  } else {
    bad_value("mdp.generator", generator, "random | chain | file");
  }

  const int S = out.mdp.n_states;
  const int A = out.mdp.n_actions;
  const std::string kind = config.get_string("features.kind");
  if (kind == "one_hot") {
    out.features = FeatureMap::one_hot(S, A);
  } else if (kind == "gaussian") {
    out.features = FeatureMap::gaussian(S, A, positive_int(config, "features.dim"),
                                        config.get_uint64("features.seed"));
  } else if (kind == "reduced") {
    out.features = FeatureMap::reduced(S, A, positive_int(config, "features.dim"),
                                       config.get_uint64("features.seed"));
  } else if (kind == "file") {
    if (!file_features) {
      bad_value("features.kind", kind, "an MDP document that carries features");
    }
    out.features = std::move(*file_features);
  } else {
    bad_value("features.kind", kind, "one_hot | gaussian | reduced | file");
  }
  return out;
}

StateDistribution build_rho(const Config& config, const FiniteMdp& mdp) {
  const std::string kind = config.get_string("rho");
  if (kind == "uniform") return StateDistribution::uniform(mdp.n_states);
  if (kind == "stationary") return stationary_distribution(mdp, optimal_policy(mdp));
  if (kind.rfind("point:", 0) == 0) {
    const std::string index = kind.substr(6);
    int s = -1;
    try {
      s = std::stoi(index);
    } catch (const std::exception&) {
      bad_value("rho", kind, "point:<state index>");
    }
    if (s < 0 || s >= mdp.n_states) bad_value("rho", kind, "a state index in range");
    return StateDistribution::point_mass(mdp.n_states, s);
  }
  bad_value("rho", kind, "uniform | stationary | point:<state>");
}

StateActionDistribution build_nu(const Config& config, const FiniteMdp& mdp) {
  const std::string kind = config.get_string("nu");
  if (kind == "uniform") return uniform_state_action(mdp.n_states, mdp.n_actions);
  bad_value("nu", kind, "uniform");
}

Algorithm parse_algorithm(const Config& config) {
  const std::string name = config.get_string("algorithm");
  if (name == "qnpg") return Algorithm::kQnpg;
  if (name == "npg") return Algorithm::kNpg;
  bad_value("algorithm", name, "qnpg | npg");
}

RunOptions build_options(const Config& config, const Instance& instance, int index) {
  const FiniteMdp& mdp = instance.mdp;
  RunOptions options;
  options.algorithm = parse_algorithm(config);
  options.rho = build_rho(config, mdp);
  options.nu = build_nu(config, mdp);
  options.iterations = positive_int(config, "iterations");

  const std::string mode = config.get_string("mode");
  if (mode == "exact") {
    options.mode = SolveMode::kExact;
  } else if (mode == "sgd") {
    options.mode = SolveMode::kSgd;
  } else {
    bad_value("mode", mode, "exact | sgd");
  }

  const std::string weighting = config.get_string("weighting");
  if (weighting == "tilde") {
    options.weighting = RegressionWeighting::kTilde;
  } else if (weighting == "bar") {
    options.weighting = RegressionWeighting::kBar;
  } else {
    bad_value("weighting", weighting, "tilde | bar");
  }

  const std::string schedule = config.get_string("schedule.kind");
  if (schedule == "geometric") {
    const double eta0 = config.is_auto("schedule.eta0")
                            ? default_eta0(mdp.n_actions, mdp.gamma)
                            : config.get_double("schedule.eta0");
    if (!(eta0 > 0.0)) bad_value("schedule.eta0", config.get_string("schedule.eta0"), "> 0");
    options.schedule = StepSchedule::geometric(eta0, mdp.gamma);
  } else if (schedule == "constant") {
    const double eta = config.get_double("schedule.eta");
    if (!(eta > 0.0)) bad_value("schedule.eta", config.get_string("schedule.eta"), "> 0");
    options.schedule = StepSchedule::constant(eta);
  } else {
    bad_value("schedule.kind", schedule, "geometric | constant");
  }

  const long long steps = config.get_int("sgd.steps");
  if (steps < 1) bad_value("sgd.steps", config.get_string("sgd.steps"), "a positive integer");
  options.sgd.n_steps = steps;
  if (!config.is_auto("sgd.step_size")) {
    const double alpha = config.get_double("sgd.step_size");
    if (!(alpha > 0.0)) bad_value("sgd.step_size", config.get_string("sgd.step_size"), "> 0");
    options.sgd.step_size = alpha;
  }
  options.sgd.seed = config.get_uint64("seed") + static_cast<std::uint64_t>(index);
  options.sgd.workers = positive_int(config, "workers");
  return options;
}

Assertion make_assertion(int criterion, std::string description, bool passed,
                         std::string detail) {
  return Assertion{criterion, std::move(description), passed, std::move(detail)};
}

std::string show(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

Domination check_domination(const RunTrace& trace, double slack) {
  Domination out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  for (const IterationRecord& r : trace.records) {
    for (const auto& [name, bound] : r.bounds) {
      const bool sublinear = name == "T2" || name == "T5";
      const double measured = sublinear ? r.running_average_gap : r.gap;
      if (std::isnan(measured)) continue;
      const double margin = bound - measured;
      if (margin < out.worst_margin) {
        out.worst_margin = margin;
        out.worst_where = name + " at k=" + std::to_string(r.k);
      }
      if (!(bound + slack >= measured)) out.holds = false;
    }
  }
  return out;
}

void merge(Domination& into, const Domination& other, const std::string& label) {
  into.holds = into.holds && other.holds;
  if (other.worst_margin < into.worst_margin) {
    into.worst_margin = other.worst_margin;
    into.worst_where = label + " " + other.worst_where;
  }
}

bool mismatch_ordered(const RunTrace& trace, double slack) {
  for (const IterationRecord& r : trace.records) {
    if (!(r.coefficients.vartheta_k <= r.coefficients.vartheta_rho * (1.0 + slack))) return false;
  }
  return true;
}

}  // namespace npg::experiments
