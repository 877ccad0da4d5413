#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "periodbench/cli.hpp"
#include "periodbench/config.hpp"
#include "periodbench/report.hpp"

namespace periodbench {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("periodbench_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  static std::string read(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

const char* kSmallConfig = R"({
  "model": {"kind": "ungm", "q": 10, "meas_noise_var": 1},
  "filters": [
    {"label": "ekf", "kind": "ekf", "cost": {"kind": "fixed", "period": 1}},
    {"label": "pf", "kind": "pf", "particle_count": 40, "resample": "every_step",
     "cost": {"kind": "synthetic", "c0": 0, "c1": 0.01}}
  ],
  "protocol": {"mode": "both", "reference_period": 1},
  "horizon": 12, "mc_runs": 3, "seed": 7, "kappa": 1
})";

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 2.898862035813389, 1e-300, 12345678.9}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(10.0), "10");
}

TEST(ParseConfig, DefaultsAndFields) {
  const auto cfg = parse_config_text(kSmallConfig);
  EXPECT_EQ(cfg.run.filters.size(), 2u);
  EXPECT_EQ(cfg.run.seed, 7u);
  EXPECT_EQ(cfg.run.mc_runs, 3);
  EXPECT_EQ(cfg.run.rmse_components, std::vector<int>{0});
  EXPECT_EQ(cfg.run.protocols.size(), 2u);
  EXPECT_FALSE(cfg.output.has_value());
  EXPECT_EQ(cfg.run.filters[1].spec.particle_count, 40);

  const auto cv = parse_config_text(R"({"model": {"kind": "cv"}, "horizon": 5, "mc_runs": 1, "seed": 0,
    "filters": [{"label": "kf", "kind": "kf", "cost": {"kind": "fixed", "period": 1}}],
    "protocol": {"mode": "constant_noise"}, "output": "x.csv"})");
  EXPECT_EQ(cv.run.rmse_components, (std::vector<int>{0, 2}));
  EXPECT_EQ(cv.run.protocols.size(), 1u);
  EXPECT_EQ(cv.output->string(), "x.csv");
}

struct BadCase {
  std::string from;
  std::string to;
  std::string key;
};

TEST(ParseConfig, ErrorsNameTheKeyPath) {
  const std::vector<BadCase> cases = {
      {R"("q": 10)", R"("q": -1)", "model.q"},
      {R"("q": 10)", R"("qq": 10)", "model.qq"},
      {R"("kind": "ungm")", R"("kind": "foo")", "model.kind"},
      {R"("c1": 0.01)", R"("c1": -0.01)", "filters[1].cost.c1"},
      {R"("particle_count": 40)", R"("particle_count": 0)", "filters[1].particle_count"},
      {R"("label": "pf")", R"("label": "ekf")", "filters[1].label"},
      {R"("resample": "every_step")", R"("resample": {"policy": "ess_threshold", "fraction": 2})",
       "filters[1].resample.fraction"},
      {R"("kind": "ekf")", R"("kind": "kf")", "filters[0].kind"},
      {R"("mode": "both")", R"("mode": "all")", "protocol.mode"},
      {R"("kappa": 1)", R"("kapa": 1)", "kapa"},
      {R"(, "kappa": 1)", "", "kappa"},
      {R"("seed": 7)", R"("seed": -7)", "seed"},
      {R"("horizon": 12)", R"("horizon": 0)", "horizon"},
      {R"("mc_runs": 3)", R"("mc_runs": 1.5)", "mc_runs"},
  };
  for (const auto& c : cases) {
    std::string text = kSmallConfig;
    const auto pos = text.find(c.from);
    ASSERT_NE(pos, std::string::npos) << c.from;
    text.replace(pos, c.from.size(), c.to);
    try {
      parse_config_text(text);
      ADD_FAILURE() << "accepted: " << c.to;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.key_path(), c.key) << e.what();
      EXPECT_NE(std::string(e.what()).find(c.key), std::string::npos);
    }
  }
}

TEST(ParseConfig, RmseComponentsRangeChecked) {
  std::string text = kSmallConfig;
  text.insert(text.rfind('}'), R"(, "rmse_components": [1])");
  try {
    parse_config_text(text);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key_path(), "rmse_components[0]");
  }
}

TEST_F(CliTest, RunIsByteDeterministic) {
  const auto cfg = write("c.json", kSmallConfig);
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_run(cfg, {std::nullopt, dir_ / "a.csv"}, out, err), cli::kExitOk) << err.str();
  ASSERT_EQ(cli::cmd_run(cfg, {std::nullopt, dir_ / "b.csv"}, out, err), cli::kExitOk) << err.str();
  const std::string a = read(dir_ / "a.csv");
  EXPECT_EQ(a, read(dir_ / "b.csv"));
  const auto rows = lines(a);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], kReportHeader);
  EXPECT_FALSE(fs::exists(dir_ / "a.csv.tmp"));
}

TEST_F(CliTest, RunWritesToStdoutWithoutOutputPath) {
  const auto cfg = write("c.json", kSmallConfig);
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_run(cfg, {}, out, err), cli::kExitOk);
  EXPECT_EQ(lines(out.str()).front(), kReportHeader);
}

TEST_F(CliTest, SeedOverrideKeepsSchema) {
  const auto cfg = write("c.json", kSmallConfig);
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_run(cfg, {std::nullopt, dir_ / "a.csv"}, out, err), cli::kExitOk);
  ASSERT_EQ(cli::cmd_run(cfg, {99u, dir_ / "b.csv"}, out, err), cli::kExitOk);
  const auto a = lines(read(dir_ / "a.csv"));
  const auto b = lines(read(dir_ / "b.csv"));
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(a[0], b[0]);
  bool any_value_changed = false;
  for (std::size_t i = 1; i < a.size(); ++i) {
    const auto fa = fields(a[i]);
    const auto fb = fields(b[i]);
    ASSERT_EQ(fa.size(), 10u);
    ASSERT_EQ(fb.size(), 10u);
    EXPECT_EQ(fa[9], "7");
    EXPECT_EQ(fb[9], "99");
    for (int c : {0, 1, 2, 3, 4}) EXPECT_EQ(fa[static_cast<std::size_t>(c)], fb[static_cast<std::size_t>(c)]);
    any_value_changed = any_value_changed || fa[5] != fb[5];
  }
  EXPECT_TRUE(any_value_changed);
}

TEST_F(CliTest, MalformedConfigExitsTwoWithKeyPath) {
  std::string text = kSmallConfig;
  text.replace(text.find(R"("q": 10)"), 7, R"("q": -3)");
  const auto cfg = write("bad.json", text);
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_run(cfg, {}, out, err), cli::kExitConfig);
  EXPECT_NE(err.str().find("model.q"), std::string::npos);
  std::ostringstream err2;
  EXPECT_EQ(cli::cmd_run(dir_ / "missing.json", {}, out, err2), cli::kExitConfig);
  const auto broken = write("broken.json", "{ not json");
  EXPECT_EQ(cli::cmd_run(broken, {}, out, err2), cli::kExitConfig);
}

TEST_F(CliTest, RuntimeFailureExitsOne) {
  std::string text = kSmallConfig;
  text.replace(text.find(R"("horizon": 12)"), 13, R"("horizon": 0.5)");
  const auto cfg = write("c.json", text);
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_run(cfg, {}, out, err), cli::kExitRuntime);
  EXPECT_NE(err.str().find("period exceeds horizon"), std::string::npos);
}

TEST_F(CliTest, SweepProducesOneRowPerCountAndProtocol) {
  const auto cfg = write("c.json", kSmallConfig);
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_sweep(cfg, {50, 100}, {std::nullopt, dir_ / "s.csv"}, out, err), cli::kExitOk) << err.str();
  const auto rows = lines(read(dir_ / "s.csv"));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], kSweepHeader);
  std::vector<double> matched_periods;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields(rows[i]);
    ASSERT_EQ(f.size(), 11u);
    if (f[2] == "constant_noise") {
      EXPECT_EQ(f[3], "1");
    } else {
      matched_periods.push_back(std::stod(f[3]));
    }
  }
  ASSERT_EQ(matched_periods.size(), 2u);
  EXPECT_LT(matched_periods[0], matched_periods[1]);
}

TEST_F(CliTest, SweepNeedsParticleFilter) {
  const auto cfg = write("c.json", R"({"model": {"kind": "cv"}, "horizon": 5, "mc_runs": 1, "seed": 0,
    "filters": [{"label": "kf", "kind": "kf", "cost": {"kind": "fixed", "period": 1}}]})");
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_sweep(cfg, {10}, {}, out, err), cli::kExitConfig);
  EXPECT_NE(err.str().find("filters"), std::string::npos);
}

TEST_F(CliTest, ProfileReportsEachCostModel) {
  const auto cfg = write("c.json", R"({"model": {"kind": "ungm"}, "horizon": 10, "mc_runs": 1, "seed": 0, "kappa": 100,
    "filters": [
      {"label": "fixed", "kind": "ekf", "cost": {"kind": "fixed", "period": 0.5}},
      {"label": "synth", "kind": "pf", "particle_count": 200, "cost": {"kind": "synthetic", "c0": 0.001, "c1": 0.0001}},
      {"label": "meas", "kind": "pf", "particle_count": 500, "cost": {"kind": "measured", "warmup": 2, "samples": 5}}
    ]})");
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_profile(cfg, out, err), cli::kExitOk) << err.str();
  const auto rows = lines(out.str());
  ASSERT_EQ(rows.size(), 4u);
  const auto fixed = fields(rows[1]);
  EXPECT_EQ(fixed[3], "fixed");
  EXPECT_EQ(fixed[7], "0.5");
  const auto synth = fields(rows[2]);
  EXPECT_EQ(synth[3], "synthetic");
  EXPECT_DOUBLE_EQ(std::stod(synth[4]), 0.021);
  EXPECT_EQ(synth[5], "0");
  EXPECT_DOUBLE_EQ(std::stod(synth[7]), 2.1);
  const auto meas = fields(rows[3]);
  EXPECT_EQ(meas[3], "measured");
  EXPECT_GT(std::stod(meas[4]), 0.0);
  EXPECT_EQ(meas[5], "5");
  EXPECT_GT(std::stod(meas[7]), 0.0);
}

}  // namespace
}  // namespace periodbench
