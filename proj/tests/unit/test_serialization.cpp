#include <npg/serialization.hpp>

#include <gtest/gtest.h>

#include <charconv>
#include <filesystem>
#include <random>
#include <sstream>

namespace npg {
namespace {

TEST(FormatDouble, RoundTripsExactly) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(gen) * std::pow(10.0, static_cast<int>(gen() % 40) - 20);
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(FormatDouble, NonFinite) {
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(json_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(json_number(2.5), 2.5);
}

TEST(MdpJson, RoundTripIsBitExact) {
  const FiniteMdp mdp = generate_random_mdp(5, 3, 0.93, 4);
  const FeatureMap f = FeatureMap::gaussian(5, 3, 4, 2);
  const MdpDocument back = mdp_from_json(nlohmann::json::parse(mdp_to_json(mdp, &f).dump()));
  EXPECT_EQ(back.mdp.gamma, mdp.gamma);
  EXPECT_EQ(back.mdp.transition, mdp.transition);
  EXPECT_EQ(back.mdp.cost, mdp.cost);
  ASSERT_TRUE(back.features.has_value());
  EXPECT_EQ(back.features->phi(), f.phi());
  EXPECT_FALSE(mdp_from_json(mdp_to_json(mdp)).features.has_value());
}

TEST(MdpJson, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "npg_serialization_test.json";
  const FiniteMdp mdp = generate_random_mdp(3, 2, 0.5, 5);
  save_mdp(path.string(), mdp);
  const MdpDocument back = load_mdp(path.string());
  EXPECT_EQ(back.mdp.transition, mdp.transition);
  std::filesystem::remove(path);
  EXPECT_THROW(load_mdp(path.string()), std::runtime_error);
}

std::string error_of(const nlohmann::json& doc) {
  try {
    (void)mdp_from_json(doc);
  } catch (const InvariantError& e) {
    return e.what();
  }
  return "";
}

TEST(MdpJson, ErrorsNameTheOffendingField) {
  const nlohmann::json good = mdp_to_json(generate_random_mdp(2, 2, 0.9, 6));
  nlohmann::json doc = good;
  doc.erase("cost");
  EXPECT_NE(error_of(doc).find("'cost'"), std::string::npos);
  doc = good;
  doc["transition"][1][0][1] = "x";
  EXPECT_NE(error_of(doc).find("transition[1][0][1]"), std::string::npos);
  doc = good;
  doc["transition"][0][1] = nlohmann::json::array({0.5});
  EXPECT_NE(error_of(doc).find("transition[0][1]"), std::string::npos);
  doc = good;
  doc["transition"][0][0] = nlohmann::json::array({0.7, 0.7});
  EXPECT_FALSE(error_of(doc).empty());
}

TEST(TraceCsv, HeaderIsFrozen) {
  const std::vector<std::string> frozen = {"k",        "eta",        "value",   "gap",
                                           "eps_stat", "eps_bias",   "eps_approx", "d_kstar",
                                           "bound",    "samples"};
  const auto& columns = trace_csv_columns();
  ASSERT_GE(columns.size(), frozen.size());
  for (std::size_t i = 0; i < frozen.size(); ++i) EXPECT_EQ(columns[i], frozen[i]);
}

TEST(TraceCsv, OneLinePerRecord) {
  const FiniteMdp mdp = generate_random_mdp(3, 2, 0.9, 7);
  RunOptions options;
  options.rho = StateDistribution::uniform(3);
  options.nu = uniform_state_action(3, 2);
  options.schedule = StepSchedule::geometric(default_eta0(2, 0.9), 0.9);
  options.iterations = 4;
  const RunTrace trace = run(mdp, FeatureMap::one_hot(3, 2), options);
  std::ostringstream out;
  write_trace_csv(out, trace);
  std::istringstream in(out.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','),
              static_cast<long>(trace_csv_columns().size()) - 1);
  }
  EXPECT_EQ(lines, 6);
  const nlohmann::json doc = trace_to_json(trace);
  EXPECT_EQ(doc.at("records").size(), 5u);
  EXPECT_EQ(doc.at("algorithm"), "qnpg");
}

}  // namespace
}  // namespace npg
