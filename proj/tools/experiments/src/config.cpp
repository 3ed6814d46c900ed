#include "npg/experiments/config.hpp"

#include "npg/experiments/recipes.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

extern char** environ;

namespace npg::experiments {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool known_key(const std::string& key) {
  const auto& schema = config_schema();
  return std::any_of(schema.begin(), schema.end(),
                     [&](const ConfigKey& k) { return k.name == key; });
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = {
      {"recipe", "recipe to run"},
      {"seed", "base seed for sampling; run i uses seed + i"},
      {"seeds", "number of repetitions (MDP instances or sampling seeds)"},
      {"workers", "threads for rollout prefetch; results do not depend on it"},
      {"out", "output directory (empty: no artifacts)"},
      {"gamma", "discount factor in [0, 1)"},
      {"mdp.generator", "random | chain | file"},
      {"mdp.n_states", "number of states"},
      {"mdp.n_actions", "number of actions"},
      {"mdp.seed", "generator seed; instance i uses mdp.seed + i"},
      {"mdp.path", "JSON MDP document when mdp.generator = file"},
      {"features.kind", "one_hot | gaussian | reduced | file"},
      {"features.dim", "feature dimension m for gaussian and reduced features"},
      {"features.seed", "seed of the random feature map"},
      {"rho", "uniform | stationary | point:<state>"},
      {"nu", "uniform"},
      {"algorithm", "qnpg | npg"},
      {"mode", "exact | sgd"},
      {"weighting", "tilde | bar (regression weights)"},
      {"schedule.kind", "geometric | constant"},
      {"schedule.eta0", "initial step for the geometric schedule, or auto"},
      {"schedule.eta", "step for the constant schedule"},
      {"iterations", "outer iterations K"},
      {"sgd.steps", "SGD steps T per outer iteration"},
      {"sgd.step_size", "SGD step size alpha, or auto"},
      {"sampler.draws", "rollouts per sampler check"},
      {"sgd_rate.factor", "horizon multiplier for the rate comparison"},
  };
  return schema;
}

const std::vector<std::string>& required_file_keys() {
  static const std::vector<std::string> keys = {"gamma"};
  return keys;
}

Config Config::defaults_for(const std::string& recipe) {
  const RecipeInfo& info = find_recipe(recipe);
  Config config;
  config.values_ = {
      {"recipe", recipe},
      {"seed", "1"},
      {"seeds", "10"},
      {"workers", "1"},
      {"out", ""},
      {"gamma", "0.9"},
      {"mdp.generator", "random"},
      {"mdp.n_states", "20"},
      {"mdp.n_actions", "5"},
      {"mdp.seed", "1"},
      {"mdp.path", ""},
      {"features.kind", "one_hot"},
      {"features.dim", "8"},
      {"features.seed", "1"},
      {"rho", "uniform"},
      {"nu", "uniform"},
      {"algorithm", "qnpg"},
      {"mode", "exact"},
      {"weighting", "tilde"},
      {"schedule.kind", "geometric"},
      {"schedule.eta0", "auto"},
      {"schedule.eta", "10"},
      {"iterations", "30"},
      {"sgd.steps", "20000"},
      {"sgd.step_size", "auto"},
      {"sampler.draws", "100000"},
      {"sgd_rate.factor", "4"},
  };
  for (const auto& [key, value] : info.overrides) config.values_[key] = value;
  return config;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!known_key(key)) throw ConfigError("unknown config key '" + key + "'");
  values_[key] = value;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

void Config::merge_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_key(key)) throw ConfigError(where + ": unknown config key '" + key + "'");
    values_[key] = value;
  }
}

void Config::merge_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();

  Config probe;
  probe.merge_text(buffer.str(), path);
  for (const auto& key : required_file_keys()) {
    if (!probe.has(key)) {
      throw ConfigError(path + ": missing required key '" + key + "'");
    }
  }
  merge_text(buffer.str(), path);
}

void Config::overlay(const Config& other) {
  for (const auto& [key, value] : other.values_) values_[key] = value;
}

std::string Config::env_name(const std::string& key) {
  std::string out = "NPG_";
  for (char c : key) {
    out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

void Config::merge_environment(const std::vector<std::string>& environment) {
  for (const auto& entry : environment) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    const std::string name = entry.substr(0, eq);
    if (name.rfind("NPG_", 0) != 0) continue;
    bool matched = false;
    for (const auto& key : config_schema()) {
      if (env_name(key.name) == name) {
        values_[key.name] = entry.substr(eq + 1);
        matched = true;
        break;
      }
    }
    if (!matched) throw ConfigError("environment variable " + name + " names no config key");
  }
}

void Config::merge_process_environment() {
  std::vector<std::string> entries;
  for (char** e = environ; e && *e; ++e) entries.emplace_back(*e);
  merge_environment(entries);
}

std::string Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string text = get_string(key);
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw ConfigError("config key '" + key + "' expects a number, got '" + text + "'");
  }
  return value;
}

long long Config::get_int(const std::string& key) const {
  const std::string text = get_string(key);
  long long value = 0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw ConfigError("config key '" + key + "' expects an integer, got '" + text + "'");
  }
  return value;
}

std::uint64_t Config::get_uint64(const std::string& key) const {
  const std::string text = get_string(key);
  std::uint64_t value = 0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw ConfigError("config key '" + key + "' expects a non-negative integer, got '" + text +
                      "'");
  }
  return value;
}

bool Config::get_bool(const std::string& key) const {
  const std::string text = get_string(key);
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("config key '" + key + "' expects true or false, got '" + text + "'");
}

bool Config::is_auto(const std::string& key) const { return get_string(key) == "auto"; }

std::string Config::dump() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + " = " + value + "\n";
  return out;
}

}  // namespace npg::experiments
