#include "npg/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <system_error>

namespace npg {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

nlohmann::json json_number(double value) {
  if (std::isfinite(value)) return value;
  return format_double(value);
}

const std::vector<std::string>& trace_csv_columns() {
  static const std::vector<std::string> columns = {
      "k",          "eta",          "value", "gap",  "eps_stat", "eps_bias",
      "eps_approx", "d_kstar",      "bound", "samples",
      "vartheta_k", "vartheta_rho", "c_rho", "c_nu", "kappa_nu", "running_average_gap"};
  return columns;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  const auto& columns = trace_csv_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const IterationRecord& r : trace.records) {
    out << r.k << ',' << format_double(r.eta) << ',' << format_double(r.value) << ','
        << format_double(r.gap) << ',' << format_double(r.eps_stat) << ','
        << format_double(r.eps_bias) << ',' << format_double(r.eps_approx) << ','
        << format_double(r.d_kstar) << ',' << format_double(r.bound) << ',' << r.samples << ','
        << format_double(r.coefficients.vartheta_k) << ','
        << format_double(r.coefficients.vartheta_rho) << ','
        << format_double(r.coefficients.c_rho) << ',' << format_double(r.coefficients.c_nu)
        << ',' << format_double(r.coefficients.kappa_nu) << ','
        << format_double(r.running_average_gap) << '\n';
  }
}

nlohmann::json trace_to_json(const RunTrace& trace) {
  nlohmann::json doc;
  doc["algorithm"] = to_string(trace.algorithm);
  doc["mode"] = to_string(trace.mode);
  doc["schedule"] = trace.schedule == StepSchedule::Kind::kGeometric ? "geometric" : "constant";
  doc["headline_bound"] = to_string(trace.headline_bound);
  doc["gamma"] = trace.gamma;
  doc["n_actions"] = trace.n_actions;
  doc["value_star"] = json_number(trace.value_star);
  doc["d0_star"] = json_number(trace.d0_star);
  doc["step_condition_holds"] = trace.step_condition_holds;
  doc["sgd_steps"] = trace.sgd_steps;
  doc["suprema"] = {
      {"eps_stat", json_number(trace.sup_eps_stat)},
      {"eps_bias", json_number(trace.sup_eps_bias)},
      {"eps_approx", json_number(trace.sup_eps_approx)},
      {"c_rho", json_number(trace.sup_c_rho)},
      {"c_nu", json_number(trace.sup_c_nu)},
      {"mu", json_number(trace.mu)},
      {"vartheta_rho", json_number(trace.vartheta_rho)},
      {"kappa_nu", json_number(trace.kappa_nu)},
      {"b_norm", json_number(trace.b_norm)},
  };
  doc["dim"] = trace.dim;
  bool vacuous = false;
  nlohmann::json rows = nlohmann::json::array();
  for (const IterationRecord& r : trace.records) {
    nlohmann::json row;
    row["k"] = r.k;
    row["eta"] = json_number(r.eta);
    row["value"] = json_number(r.value);
    row["gap"] = json_number(r.gap);
    row["running_average_gap"] = json_number(r.running_average_gap);
    row["eps_stat"] = json_number(r.eps_stat);
    row["eps_bias"] = json_number(r.eps_bias);
    row["eps_approx"] = json_number(r.eps_approx);
    row["d_kstar"] = json_number(r.d_kstar);
    row["samples"] = r.samples;
    row["pmd_deviation"] = json_number(r.pmd_deviation);
    row["coefficients"] = {
        {"vartheta_k", json_number(r.coefficients.vartheta_k)},
        {"vartheta_rho", json_number(r.coefficients.vartheta_rho)},
        {"c_rho", json_number(r.coefficients.c_rho)},
        {"c_nu", json_number(r.coefficients.c_nu)},
        {"kappa_nu", json_number(r.coefficients.kappa_nu)},
        {"sigma_nu_min_eig", json_number(r.coefficients.sigma_nu_min_eig)},
        {"b_norm", json_number(r.coefficients.b_norm)},
        {"d_kstar", json_number(r.coefficients.d_kstar)},
    };
    nlohmann::json bounds;
    for (const auto& [name, value] : r.bounds) {
      bounds[name] = json_number(value);
      if (std::isinf(value) && r.k > 0) vacuous = true;
    }
    row["bounds"] = bounds;
    row["bound"] = json_number(r.bound);
    std::vector<double> theta(r.theta.data(), r.theta.data() + r.theta.size());
    row["theta"] = theta;
    rows.push_back(std::move(row));
  }
  doc["bound_vacuous"] = vacuous;
  doc["records"] = std::move(rows);
  return doc;
}

nlohmann::json mdp_to_json(const FiniteMdp& mdp, const FeatureMap* features) {
  nlohmann::json doc;
  doc["n_states"] = mdp.n_states;
  doc["n_actions"] = mdp.n_actions;
  doc["gamma"] = mdp.gamma;
  nlohmann::json transition = nlohmann::json::array();
  nlohmann::json cost = nlohmann::json::array();
  for (int s = 0; s < mdp.n_states; ++s) {
    nlohmann::json per_action = nlohmann::json::array();
    nlohmann::json cost_row = nlohmann::json::array();
    for (int a = 0; a < mdp.n_actions; ++a) {
      std::vector<double> row(static_cast<std::size_t>(mdp.n_states));
      for (int next = 0; next < mdp.n_states; ++next) row[next] = mdp.p(s, a, next);
      per_action.push_back(row);
      cost_row.push_back(mdp.cost(s, a));
    }
    transition.push_back(std::move(per_action));
    cost.push_back(std::move(cost_row));
  }
  doc["transition"] = std::move(transition);
  doc["cost"] = std::move(cost);
  if (features) {
    nlohmann::json phi = nlohmann::json::array();
    for (Eigen::Index r = 0; r < features->phi().rows(); ++r) {
      std::vector<double> row(features->phi().cols());
      for (Eigen::Index c = 0; c < features->phi().cols(); ++c) row[c] = features->phi()(r, c);
      phi.push_back(row);
    }
    doc["features"] = std::move(phi);
  }
  return doc;
}

namespace {

const nlohmann::json& field(const nlohmann::json& doc, const char* name) {
  if (!doc.contains(name)) throw InvariantError(std::string("MDP document is missing '") + name + "'");
  return doc.at(name);
}

std::size_t expect_array(const nlohmann::json& value, std::size_t size, const std::string& path) {
  if (!value.is_array() || value.size() != size) {
    throw InvariantError("MDP document: '" + path + "' must be an array of length " +
                         std::to_string(size));
  }
  return size;
}

double expect_number(const nlohmann::json& value, const std::string& path) {
  if (!value.is_number()) throw InvariantError("MDP document: '" + path + "' must be a number");
  return value.get<double>();
}

}  // namespace

MdpDocument mdp_from_json(const nlohmann::json& doc) {
  MdpDocument out;
  FiniteMdp& mdp = out.mdp;
  const auto& n_states = field(doc, "n_states");
  const auto& n_actions = field(doc, "n_actions");
  if (!n_states.is_number_integer() || !n_actions.is_number_integer()) {
    throw InvariantError("MDP document: n_states and n_actions must be integers");
  }
  mdp.n_states = n_states.get<int>();
  mdp.n_actions = n_actions.get<int>();
  if (mdp.n_states < 1 || mdp.n_actions < 1) {
    throw InvariantError("MDP document: n_states and n_actions must be positive");
  }
  mdp.gamma = expect_number(field(doc, "gamma"), "gamma");
  const auto S = static_cast<std::size_t>(mdp.n_states);
  const auto A = static_cast<std::size_t>(mdp.n_actions);

  const auto& transition = field(doc, "transition");
  const auto& cost = field(doc, "cost");
  expect_array(transition, S, "transition");
  expect_array(cost, S, "cost");
  mdp.transition.resize(mdp.n_pairs(), mdp.n_states);
  mdp.cost.resize(mdp.n_states, mdp.n_actions);
  for (std::size_t s = 0; s < S; ++s) {
    const std::string ts = "transition[" + std::to_string(s) + "]";
    expect_array(transition[s], A, ts);
    expect_array(cost[s], A, "cost[" + std::to_string(s) + "]");
    for (std::size_t a = 0; a < A; ++a) {
      const std::string ta = ts + "[" + std::to_string(a) + "]";
      expect_array(transition[s][a], S, ta);
      for (std::size_t n = 0; n < S; ++n) {
        mdp.transition(static_cast<Eigen::Index>(s * A + a), static_cast<Eigen::Index>(n)) =
            expect_number(transition[s][a][n], ta + "[" + std::to_string(n) + "]");
      }
      mdp.cost(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) = expect_number(
          cost[s][a], "cost[" + std::to_string(s) + "][" + std::to_string(a) + "]");
    }
  }
  validate(mdp);

  if (doc.contains("features")) {
    const auto& phi = doc.at("features");
    expect_array(phi, S * A, "features");
    const std::size_t m = phi[0].is_array() ? phi[0].size() : 0;
    if (m == 0) throw InvariantError("MDP document: features must have at least one column");
    Matrix matrix(static_cast<Eigen::Index>(S * A), static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < S * A; ++r) {
      const std::string path = "features[" + std::to_string(r) + "]";
      expect_array(phi[r], m, path);
      for (std::size_t c = 0; c < m; ++c) {
        matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            expect_number(phi[r][c], path + "[" + std::to_string(c) + "]");
      }
    }
    out.features = FeatureMap(mdp.n_states, mdp.n_actions, std::move(matrix));
  }
  return out;
}

void save_mdp(const std::string& path, const FiniteMdp& mdp, const FeatureMap* features) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  file << mdp_to_json(mdp, features).dump(1) << '\n';
}

MdpDocument load_mdp(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(file);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvariantError("'" + path + "' is not valid JSON: " + e.what());
  }
  return mdp_from_json(doc);
}

}  // namespace npg
