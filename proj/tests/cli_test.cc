/*
 * Copyright 2026 The snapgap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace snapgap {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("snapgap_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int Run(std::vector<std::string> args) {
    args.insert(args.begin(), "snapgap");
    out_.str("");
    err_.str("");
    return cli::Run(args, out_, err_);
  }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string Slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void Synth(const std::string& name, const std::string& zips = "200") {
    ASSERT_EQ(Run({"synth", "--seed", "3", "--n_zips", zips, "--target_prevalence", "0.06",
                   "--anomaly_rate", "0.01", "--out", Path(name)}),
              0)
        << err_.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, VersionAndHelp) {
  EXPECT_EQ(Run({"--version"}), 0);
  EXPECT_FALSE(out_.str().empty());
  EXPECT_EQ(Run({"backtest", "--help"}), 0);
  EXPECT_NE(out_.str().find("--seed"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(Run({}), 2);
  EXPECT_EQ(Run({"frobnicate"}), 2);
  EXPECT_EQ(Run({"backtest", "--panel", "x.csv", "--out", Path("o")}), 2);
  EXPECT_EQ(Run({"synth", "--out", Path("s.csv")}), 2);
  EXPECT_EQ(Run({"synth", "--seed", "1", "--n_zips", "ten", "--out", Path("s.csv")}), 2);
  EXPECT_NE(err_.str().find("n_zips"), std::string::npos);
}

TEST_F(CliTest, SynthWritesPanelAndTruth) {
  ASSERT_EQ(Run({"synth", "--seed", "4", "--n_zips", "30", "--synth_years", "2014-2015",
                 "--out", Path("p.csv"), "--truth", Path("truth.json")}),
            0);
  const json truth = json::parse(Slurp(Path("truth.json")));
  EXPECT_EQ(truth["labels"].size(), 60u);
  EXPECT_EQ(truth["years"].size(), 2u);
  EXPECT_EQ(truth["coefficients"]["pct_no_vehicle"], -0.5);
  const std::string first = Slurp(Path("p.csv"));
  ASSERT_EQ(Run({"synth", "--seed", "4", "--n_zips", "30", "--synth_years", "2014-2015",
                 "--out", Path("q.csv")}),
            0);
  EXPECT_EQ(Slurp(Path("q.csv")), first);
}

TEST_F(CliTest, IngestWithCrosswalkAndRejects) {
  {
    std::ofstream panel(Path("raw.csv"));
    panel << "zip,year,pov_fam,snap_fam,fam_universe,pct_no_vehicle,pct_no_internet,"
             "pct_no_computer,pct_hs_only\n"
             "501,2015,100,40,500,10,20,30,40\n"
             "00501,2015,100,40,500,10,20,30,40\n"
             "ABCDE,2015,100,40,500,10,20,30,40\n"
             "02134,2016,80,-999,400,5,104.2,3,4\n";
    std::ofstream xwalk(Path("xwalk.csv"));
    xwalk << "zip,tract_status,res_ratio\n"
             "00501,urban,0.9\n"
             "00501,rural,0.1\n"
             "02134,rural,1.0\n"
             "02134,rural,1.7\n";
  }
  ASSERT_EQ(Run({"ingest", "--panel", Path("raw.csv"), "--crosswalk", Path("xwalk.csv"),
                 "--out", Path("clean.csv")}),
            0)
      << err_.str();
  EXPECT_NE(out_.str().find("records 2, rejects 2"), std::string::npos) << out_.str();
  const std::string rejects = Slurp(Path("clean_rejects.csv"));
  EXPECT_NE(rejects.find("crosswalk: "), std::string::npos);
  const std::string clean = Slurp(Path("clean.csv"));
  EXPECT_NE(clean.find("00501,2015"), std::string::npos);
  EXPECT_NE(clean.find("Urban"), std::string::npos);
  EXPECT_NE(clean.find("Rural"), std::string::npos);
}

TEST_F(CliTest, MissingInputIsIoFailure) {
  EXPECT_EQ(Run({"label", "--panel", Path("absent.csv"), "--out", Path("l.csv")}), 4);
  EXPECT_EQ(Run({"label", "--config", Path("absent.conf")}), 4);
}

TEST_F(CliTest, LabelWritesSidecar) {
  Synth("p.csv");
  ASSERT_EQ(Run({"label", "--panel", Path("p.csv"), "--out", Path("labeled.csv")}), 0)
      << err_.str();
  const json sidecar = json::parse(Slurp(Path("labeled_thresholds.json")));
  EXPECT_EQ(sidecar["thresholds"].size(), 1u);
  EXPECT_GT(sidecar["eligible"].get<int>(), 0);
  EXPECT_FALSE(sidecar["ols"].is_null());
  const std::string labeled = Slurp(Path("labeled.csv"));
  EXPECT_NE(labeled.find("s_capped"), std::string::npos);
}

TEST_F(CliTest, ConfigFileAndFlagOverride) {
  Synth("p.csv");
  {
    std::ofstream conf(Path("run.conf"));
    conf << "families = logistic\n"
            "feature_subsets = full\n"
            "logistic_grid = 0.1,1\n"
            "importance_repeats = 2\n"
            "p1_years = 2014-2018\n";
  }
  ASSERT_EQ(Run({"train", "--config", Path("run.conf"), "--panel", Path("p.csv"), "--model_dir",
                 Path("models")}),
            0)
      << err_.str();
  const json index = json::parse(Slurp(Path("models/index.json")));
  ASSERT_EQ(index["models"].size(), 1u);
  const std::string file = index["models"][0]["file"];
  const json model = json::parse(Slurp(Path("models/" + file)));
  EXPECT_EQ(model["format"], "snapgap.model/1");
  EXPECT_EQ(model["cohort"], "All");

  EXPECT_EQ(Run({"train", "--config", Path("run.conf"), "--p1_years", "2014-2020", "--panel",
                 Path("p.csv"), "--model_dir", Path("models")}),
            2);
  {
    std::ofstream conf(Path("typo.conf"));
    conf << "famlies = logistic\n";
  }
  EXPECT_EQ(Run({"train", "--config", Path("typo.conf"), "--panel", Path("p.csv"),
                 "--model_dir", Path("models")}),
            2);
  EXPECT_NE(err_.str().find("famlies"), std::string::npos);
}

TEST_F(CliTest, BacktestThenReport) {
  Synth("p.csv", "300");
  const std::vector<std::string> common = {
      "backtest", "--seed", "11", "--panel", Path("p.csv"), "--families", "logistic",
      "--feature_subsets", "full", "--logistic_grid", "0.1,1", "--importance_repeats", "2"};
  auto args = common;
  args.insert(args.end(), {"--out", Path("run1"), "--format", "csv"});
  ASSERT_EQ(Run(args), 0) << err_.str();
  EXPECT_TRUE(fs::exists(Path("run1/metrics.csv")));
  const std::string manifest = Slurp(Path("run1/manifest.json"));
  const json doc = json::parse(manifest);
  EXPECT_EQ(doc["inputs"]["panel_file"].get<std::string>().size(), 64u);

  args = common;
  args.insert(args.end(), {"--out", Path("run2"), "--threads", "3"});
  ASSERT_EQ(Run(args), 0);
  EXPECT_EQ(Slurp(Path("run2/manifest.json")), manifest);
  EXPECT_TRUE(fs::exists(Path("run2/report.md")));

  ASSERT_EQ(Run({"report", "--manifest", Path("run1/manifest.json"), "--format", "json",
                 "--out", Path("rep")}),
            0);
  const json report = json::parse(Slurp(Path("rep/report.json")));
  EXPECT_EQ(report["metrics"].size(), 1u);

  {
    std::ofstream bogus(Path("bogus.json"));
    bogus << "{\"format\": \"other\"}";
  }
  EXPECT_EQ(Run({"report", "--manifest", Path("bogus.json"), "--out", Path("rep")}), 2);
  EXPECT_EQ(Run({"report", "--manifest", Path("run1/manifest.json"), "--format", "pdf",
                 "--out", Path("rep")}),
            2);
}

TEST_F(CliTest, EmptyTestPeriodExitsThree) {
  ASSERT_EQ(Run({"synth", "--seed", "2", "--n_zips", "100", "--synth_years", "2014-2018",
                 "--out", Path("p1only.csv")}),
            0);
  EXPECT_EQ(Run({"backtest", "--seed", "1", "--panel", Path("p1only.csv"), "--out",
                 Path("run")}),
            3);
}

}  // namespace
}  // namespace snapgap
