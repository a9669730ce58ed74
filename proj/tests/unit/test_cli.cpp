#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace fs = std::filesystem;
using interbank::cli::run;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("interbank_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "interbank");
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  std::string write_config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, RiccatiWritesTableAndManifest) {
  const fs::path out = dir_ / "r";
  ASSERT_EQ(invoke({"riccati", "--out", out.string(), "--riccati-steps", "50"}), 0) << err_.str();
  const std::string csv = slurp(out / "riccati.csv");
  EXPECT_EQ(csv.rfind("t,phi,phi0,implied_phi0_oracle", 0), 0u);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(manifest["subcommand"], "riccati");
  EXPECT_EQ(manifest["params"]["a"], 5.0);
  EXPECT_EQ(manifest["outputs"][0], "riccati.csv");
}

TEST_F(CliTest, SeedIsRequiredForStochasticCommands) {
  EXPECT_EQ(invoke({"simulate", "--out", dir_.string()}), interbank::cli::kUsage);
  EXPECT_NE(err_.str().find("error: usage:"), std::string::npos);
  EXPECT_EQ(invoke({}), interbank::cli::kUsage);
  EXPECT_EQ(invoke({"riccati", "--mode", "verbatim"}), interbank::cli::kUsage);
}

TEST_F(CliTest, InvalidParametersFailWithoutOutputs) {
  const auto cfg = write_config("bad.cfg", "F = 0.5\nG = 0.6\n");
  const fs::path out = dir_ / "bad";
  EXPECT_EQ(invoke({"simulate", "--config", cfg, "--seed", "1", "--out", out.string()}),
            interbank::cli::kParameter);
  EXPECT_EQ(err_.str().rfind("error: parameter: clearing violation", 0), 0u) << err_.str();
  EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, ConfigErrorsHaveTheirOwnStatus) {
  const auto cfg = write_config("unknown.cfg", "alpha = 1\n");
  EXPECT_EQ(invoke({"riccati", "--config", cfg, "--out", dir_.string()}), interbank::cli::kConfig);
  EXPECT_EQ(invoke({"riccati", "--config", (dir_ / "missing.cfg").string()}), interbank::cli::kConfig);
}

TEST_F(CliTest, SweepIsByteReproducibleAcrossRunsAndWorkers) {
  const auto cfg = write_config("base.cfg", "g_values = 0.2, 0.8\n");
  const fs::path a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(invoke({"sweep-g", "--config", cfg, "--seed", "7", "--paths", "300", "--loss", "--out", a.string()}), 0)
      << err_.str();
  ASSERT_EQ(invoke({"sweep-g", "--config", cfg, "--seed", "7", "--paths", "300", "--loss", "--workers", "3",
                    "--out", b.string()}),
            0);
  EXPECT_EQ(slurp(a / "risk.csv"), slurp(b / "risk.csv"));
  EXPECT_EQ(slurp(a / "loss.csv"), slurp(b / "loss.csv"));
  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 7);
  EXPECT_EQ(manifest["details"]["g_values"].size(), 2u);
}

TEST_F(CliTest, SimulateWritesSummariesAndTrajectories) {
  const fs::path out = dir_ / "sim";
  ASSERT_EQ(invoke({"simulate", "--seed", "3", "--paths", "20", "-N", "4", "--retain-trajectories", "2",
                    "--retain-costs", "--out", out.string()}),
            0)
      << err_.str();
  EXPECT_EQ(slurp(out / "summary.csv").rfind("path,major_min,market_min,minor_defaults,major_cost\n", 0), 0u);
  EXPECT_EQ(slurp(out / "trajectories.csv").rfind("path,t,bank_id,x\n", 0), 0u);
  ASSERT_EQ(invoke({"simulate", "--seed", "3", "--paths", "5", "--population", "limiting", "-M", "20", "--out",
                    (dir_ / "lim").string()}),
            0)
      << err_.str();
}

TEST_F(CliTest, ExportWithoutMatchingPathReportsCategory) {
  const auto cfg = write_config("calm.cfg", "sigma = 0\nsigma0 = 0\n");
  EXPECT_EQ(invoke({"export", "--config", cfg, "--seed", "1", "--paths", "10", "--out", dir_.string()}),
            interbank::cli::kUnsupported);
  EXPECT_EQ(err_.str().rfind("error: no-matching-path:", 0), 0u) << err_.str();
}

TEST_F(CliTest, ConvergeAndLossDist) {
  const auto cfg = write_config("n.cfg", "n_list = 5, 20\n");
  ASSERT_EQ(invoke({"converge", "--config", cfg, "--seed", "2", "--paths", "20", "--out", dir_.string()}), 0)
      << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "convergence.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "convergence_paths.csv"));
  ASSERT_EQ(invoke({"loss-dist", "--seed", "2", "--paths", "50", "--out", dir_.string()}), 0) << err_.str();
  EXPECT_EQ(slurp(dir_ / "loss.csv").rfind("G,has_major,variant,k,mass\n", 0), 0u);
}

TEST_F(CliTest, ValidateEmitsReport) {
  const auto cfg = write_config("v.cfg", "n_list = 4\n");
  ASSERT_EQ(invoke({"validate", "--config", cfg, "--seed", "5", "--paths", "40", "--steps", "20",
                    "--riccati-steps", "200", "--directions", "2", "--out", dir_.string()}),
            0)
      << err_.str();
  const auto report = nlohmann::json::parse(slurp(dir_ / "validation.json"));
  EXPECT_EQ(report["minor_best_response"][0]["N"], 4);
  EXPECT_EQ(report["minor_best_response"][0]["directions"].size(), 2u);
  EXPECT_EQ(report["mode_comparison"]["phi0_divergence"].size(), 6u);
  EXPECT_EQ(report["mode_comparison"]["modes"].size(), 3u);
}

TEST_F(CliTest, VersionAndHelp) {
  EXPECT_EQ(invoke({"--version"}), 0);
  EXPECT_EQ(out_.str(), interbank::cli::version() + "\n");
  EXPECT_EQ(invoke({"--help"}), 0);
  EXPECT_NE(out_.str().find("sweep-g"), std::string::npos);
}
