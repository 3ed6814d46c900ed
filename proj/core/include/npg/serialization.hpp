#pragma once

#include "npg/npg_driver.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <optional>
#include <string>

namespace npg {

/// 17 significant digits; "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double value);

/// Column order of the trace CSV. The first ten columns are frozen.
const std::vector<std::string>& trace_csv_columns();

void write_trace_csv(std::ostream& out, const RunTrace& trace);
nlohmann::json trace_to_json(const RunTrace& trace);

/// An MDP plus an optional feature map, as stored on disk.
struct MdpDocument {
  FiniteMdp mdp;
  std::optional<FeatureMap> features;
};

/// Fields: n_states, n_actions, gamma, transition [S][A][S], cost [S][A],
/// and optionally features [S*A][m].
nlohmann::json mdp_to_json(const FiniteMdp& mdp, const FeatureMap* features = nullptr);
/// Throws InvariantError on a malformed or invalid document.
MdpDocument mdp_from_json(const nlohmann::json& doc);

void save_mdp(const std::string& path, const FiniteMdp& mdp, const FeatureMap* features = nullptr);
MdpDocument load_mdp(const std::string& path);

/// Finite doubles as numbers, non-finite ones as the strings of format_double.
nlohmann::json json_number(double value);

}  // namespace npg
