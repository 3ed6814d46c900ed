#include <npg/experiments/config.hpp>
#include <npg/experiments/recipes.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

namespace {

constexpr int kExitAssertionFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

}  // namespace

int main(int argc, char** argv) {
  using npg::experiments::Config;
  using npg::experiments::ConfigError;

  CLI::App app{"Runs natural policy gradient experiment recipes on finite MDPs."};
  std::optional<std::string> config_path;
  std::optional<std::string> recipe;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> workers;
  bool list = false;
  bool print_config = false;
  app.add_option("--config", config_path, "key = value config file (must define gamma)");
  app.add_option("--recipe", recipe, "recipe to run (see --list)");
  app.add_option("--seed", seed, "base sampling seed");
  app.add_option("--out", out_dir, "directory for CSV, JSON and summary artifacts");
  app.add_option("--workers", workers, "rollout prefetch threads")->check(CLI::PositiveNumber);
  app.add_flag("--list", list, "list recipes and exit");
  app.add_flag("--print-config", print_config, "print the resolved config and exit");
  app.footer("Any config key can be set through the environment as NPG_<KEY>, upper case with "
             "dots replaced by underscores (for example NPG_SGD_STEPS=5000).");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  if (list) {
    std::cout << npg::experiments::list_recipes();
    return 0;
  }

  Config config;
  try {
    Config from_file;
    if (config_path) from_file.merge_file(*config_path);
    Config from_env;
    from_env.merge_process_environment();

    std::string name;
    if (recipe) {
      name = *recipe;
    } else if (from_env.has("recipe")) {
      name = from_env.get_string("recipe");
    } else if (from_file.has("recipe")) {
      name = from_file.get_string("recipe");
    } else {
      throw ConfigError("no recipe given: pass --recipe NAME or set 'recipe' in the config");
    }

    config = Config::defaults_for(name);
    config.overlay(from_file);
    config.overlay(from_env);
    config.set("recipe", name);
    if (seed) config.set("seed", std::to_string(*seed));
    if (out_dir) config.set("out", *out_dir);
    if (workers) config.set("workers", std::to_string(*workers));
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (print_config) {
    std::cout << config.dump();
    return 0;
  }

  try {
    const auto result = npg::experiments::run_recipe(config);
    const std::string out = config.get_string("out");
    if (!out.empty()) npg::experiments::write_artifacts(result, out);
    std::cout << npg::experiments::summary_text(result);
    return result.passed() ? 0 : kExitAssertionFailed;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "run aborted: " << e.what() << '\n';
    return kExitRuntime;
  }
}
