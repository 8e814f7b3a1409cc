/*
 * Copyright 2026 The dflsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "small_config.hpp"
#include "test_util.hpp"

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + DFLSIM_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class Cli : public ::testing::Test {
 protected:
  fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = tmp_ / name;
    std::ofstream(p) << text;
    return p;
  }
  std::string log_text() const { return test::read_text(tmp_ / "log.txt"); }
  int cli(const std::string& args) { return run_cli(args, tmp_ / "log.txt"); }

  test::TempDir tmp_;
};

TEST_F(Cli, RunSucceeds) {
  const auto cfg = write_config("ok.json", test::small_campaign_json(R"("sweep": {"attack": ["none", "dmpa"]})"));
  const fs::path out = tmp_ / "out";
  EXPECT_EQ(cli("run --config " + cfg.string() + " --out " + out.string() + " --charts"), 0) << log_text();
  EXPECT_TRUE(fs::exists(out / "results.csv"));
  EXPECT_TRUE(fs::exists(out / "summary.csv"));
  EXPECT_TRUE(fs::exists(out / "f1_vs_fraction_fully_fed_avg.svg"));
  EXPECT_NE(log_text().find("[2/2]"), std::string::npos);

  EXPECT_EQ(cli("run --config " + cfg.string() + " --out " + (tmp_ / "json").string() + " --format json --seed 8"), 0);
  EXPECT_TRUE(fs::exists(tmp_ / "json" / "results.json"));
}

TEST_F(Cli, ValidatePrintsThePlan) {
  const auto cfg = write_config("v.json", test::small_campaign_json(R"("sweep": {"replicates": 3})"));
  EXPECT_EQ(cli("validate --config " + cfg.string()), 0);
  EXPECT_NE(log_text().find("ok, 3 planned runs"), std::string::npos) << log_text();
}

TEST_F(Cli, ConfigErrorsExitTwo) {
  const auto typo = write_config("typo.json", test::small_campaign_json(R"("attack": "dmpaa")"));
  EXPECT_EQ(cli("validate --config " + typo.string()), 2);
  EXPECT_NE(log_text().find("/attack"), std::string::npos) << log_text();
  EXPECT_NE(log_text().find("dmpa, lie"), std::string::npos);
  EXPECT_EQ(cli("run --config " + typo.string()), 2);
  EXPECT_EQ(cli("run --config " + (tmp_ / "missing.json").string()), 2);
}

TEST_F(Cli, RunFailuresExitThree) {
  const auto cfg = write_config("bad.json", test::small_campaign_json(
                                                R"("attack": "dmpa", "train": {"learning_rate": 1e308})"));
  EXPECT_EQ(cli("run --config " + cfg.string() + " --out " + (tmp_ / "o").string()), 3) << log_text();
  EXPECT_EQ(cli("run --fail-fast --config " + cfg.string() + " --out " + (tmp_ / "p").string()), 3);
}

TEST_F(Cli, IoErrorsExitFour) {
  test::write_bytes(tmp_ / "blocker", {0x01});
  const auto cfg = write_config("c.json", test::small_campaign_json());
  EXPECT_EQ(cli("run --config " + cfg.string() + " --out " + (tmp_ / "blocker" / "x").string()), 4) << log_text();
}

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(cli(""), 1);
  EXPECT_EQ(cli("frobnicate"), 1);
  EXPECT_EQ(cli("run"), 1);
  EXPECT_EQ(cli("--help"), 0);
}

TEST_F(Cli, GenData) {
  const fs::path out = tmp_ / "gen";
  EXPECT_EQ(cli("gen-data --kind idx-roundtrip --out " + out.string() + " --classes 3 --train-per-class 20"), 0)
      << log_text();
  EXPECT_TRUE(fs::exists(out / "train-images-idx3-ubyte"));
  EXPECT_TRUE(fs::exists(out / "test-labels-idx1-ubyte"));
  EXPECT_EQ(cli("gen-data --kind blobs --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "train.csv"));
}

}  // namespace
