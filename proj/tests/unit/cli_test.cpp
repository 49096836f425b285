// Copyright 2026 The acr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <string>

#include <gtest/gtest.h>

#include "json.hpp"
#include "support.hpp"

namespace acr {
namespace {

using testing::cli_path;
using testing::read_file;
using testing::run_command;
using testing::scratch_dir;

nlohmann::json without_timing(nlohmann::json j) {
  if (j.is_object()) {
    j.erase("wall_time_seconds");
    for (auto& [key, value] : j.items()) value = without_timing(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = without_timing(value);
  }
  return j;
}

TEST(Cli, ExitCodes) {
  const std::string acr = cli_path();
  EXPECT_EQ(run_command(acr + " --help").status, 0);
  EXPECT_EQ(run_command(acr + " run --help").status, 0);
  EXPECT_EQ(run_command(acr).status, 2);
  EXPECT_EQ(run_command(acr + " run --synthetic").status, 2);           // missing --xi
  EXPECT_EQ(run_command(acr + " run --xi 0.1").status, 2);              // no data source
  EXPECT_EQ(run_command(acr + " run --synthetic --xi 0.1 --bogus").status, 2);
  EXPECT_EQ(run_command(acr + " frobnicate").status, 2);
}

TEST(Cli, RuntimeErrorsAreJsonOnStderr) {
  const auto r = run_command(cli_path() + " run --data /nonexistent/file.csv --xi 0.1 2>&1");
  EXPECT_EQ(r.status, 1);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("error").at("code"), "io");
  EXPECT_FALSE(j.at("error").at("message").get<std::string>().empty());
}

TEST(Cli, SynthThenRun) {
  const auto dir = scratch_dir("cli_run");
  const std::string acr = cli_path();
  const std::string csv = (dir / "d.csv").string();
  ASSERT_EQ(run_command(acr + " synth --n 80 --p 4 --seed 3 --out " + csv).status, 0);
  const std::string text = read_file(csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), "y,w,x1,x2,x3,x4");

  const std::string run = acr + " run --data " + csv +
                          " --treatment w --stat cv-mse --lambda-count 3 --xi 0.05 --k 4"
                          " --seed 9 --trace " + (dir / "t.csv").string() +
                          " --dump-splits " + (dir / "s.jsonl").string();
  const auto a = run_command(run);
  ASSERT_EQ(a.status, 0);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j.at("schema_version"), 1);
  EXPECT_EQ(j.at("aggregate").size(), 3u);
  EXPECT_EQ(j.at("n"), 80);
  const std::string trace = read_file(dir / "t.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "g,component,value,running_mean,running_vhat");
  const std::string splits = read_file(dir / "s.jsonl");
  const auto first = nlohmann::json::parse(splits.substr(0, splits.find('\n')));
  EXPECT_EQ(first.at("g"), 1);
  EXPECT_EQ(first.at("blocks").size(), 4u);
  EXPECT_EQ(first.at("blocks")[0].size(), 20u);

  // Same seed, same bytes apart from timing, whatever the thread count.
  const auto b = run_command(run + " --threads 4");
  ASSERT_EQ(b.status, 0);
  auto ja = without_timing(j);
  auto jb = without_timing(nlohmann::json::parse(b.out));
  ja.at("config").erase("threads");
  jb.at("config").erase("threads");
  EXPECT_EQ(ja, jb);
}

TEST(Cli, ConfigFilePrecedence) {
  const auto dir = scratch_dir("cli_config");
  const std::string acr = cli_path();
  {
    std::ofstream(dir / "c.json") << R"({"n": 40, "p": 3, "seed": 5})";
    std::ofstream(dir / "nested.json") << R"({"synth": {"n": 50, "noise_sd": 2}})";
    std::ofstream(dir / "bad.json") << R"({"bogus_key": 1})";
  }
  const auto a = run_command(acr + " synth --config " + (dir / "c.json").string() +
                             " --n 60 --out " + (dir / "a.csv").string());
  ASSERT_EQ(a.status, 0);
  const auto ja = nlohmann::json::parse(a.out);
  EXPECT_EQ(ja.at("config").at("n"), 60);
  EXPECT_EQ(ja.at("config").at("p"), 3);
  EXPECT_EQ(ja.at("seed"), 5);
  const auto b = run_command(acr + " synth --config " + (dir / "nested.json").string() +
                             " --out " + (dir / "b.csv").string());
  ASSERT_EQ(b.status, 0);
  EXPECT_EQ(nlohmann::json::parse(b.out).at("config").at("n"), 50);
  EXPECT_EQ(run_command(acr + " synth --config " + (dir / "bad.json").string() + " --out " +
                        (dir / "c.csv").string())
                .status,
            2);
}

TEST(Cli, SeqtestAndStability) {
  const auto dir = scratch_dir("cli_seq");
  const std::string acr = cli_path();
  const std::string csv = (dir / "d.csv").string();
  ASSERT_EQ(run_command(acr + " synth --n 100 --p 4 --seed 3 --out " + csv).status, 0);
  const auto s = run_command(acr + " seqtest --data " + csv +
                             " --treatment w --stat dml-pvalue --xi 0.1 --k 5 --seed 1");
  ASSERT_EQ(s.status, 0);
  const auto js = nlohmann::json::parse(s.out);
  EXPECT_TRUE(js.contains("reject"));
  EXPECT_EQ(js.at("level"), 0.05);
  const auto st = run_command(acr + " stability --data " + csv +
                              " --treatment w --b 10 --reps 20 --seed 1");
  ASSERT_EQ(st.status, 0);
  const auto jt = nlohmann::json::parse(st.out);
  EXPECT_TRUE(jt.contains("stability"));
  EXPECT_TRUE(jt.contains("gamma"));
}

}  // namespace
}  // namespace acr
