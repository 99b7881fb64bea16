/*
 * Copyright 2026 The icu-gaze Authors
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

#include "icugaze/io/config.hpp"
#include "icugaze/io/files.hpp"
#include "icugaze/io/recording.hpp"
#include "icugaze/io/tables.hpp"
#include "icugaze_cli/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace icugaze::cli {
namespace {

namespace fs = std::filesystem;

int cli(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"icugaze"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : owned) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("icugaze_cli_test_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    Scenario s;
    s.markers.rows = 2;
    s.markers.cols = 2;
    s.blinks = {{0.5, 0.6}};
    s.occlusions = {{2.0, 2.2}};
    io::write_file_atomic(dir_ / "scenario.ini", io::format_scenario(s));
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string p(const std::string& rel) const { return (dir_ / rel).string(); }

  fs::path dir_;
};

TEST_F(CliTest, SimulateRunEvaluateReport) {
  ASSERT_EQ(cli({"simulate", p("scenario.ini"), "--out", p("sim"), "--seed", "3"}), kOk);
  for (const char* f : {"recording.ndjson", "recording.clouds.bin", "trials.csv", "truth.csv", "scenario.ini"}) {
    EXPECT_TRUE(fs::exists(dir_ / "sim" / f)) << f;
  }
  EXPECT_EQ(io::load_scenario(dir_ / "sim/scenario.ini").seed, 3u);

  ASSERT_EQ(cli({"run", p("sim/recording.ndjson"), "--out", p("run"), "--trials", p("sim/trials.csv"), "--screen",
                 "192x108", "--sigma", "2"}),
            kOk);
  const io::RunReport report = io::parse_run_report(io::read_file(dir_ / "run/run_report.json"));
  EXPECT_EQ(report.stats.head_frames, 160u);
  ASSERT_TRUE(report.evaluation.has_value());
  EXPECT_GT(report.evaluation->pooled.accuracy, 0.5);
  EXPECT_LT(report.evaluation->pooled.accuracy, 7.0);
  EXPECT_EQ(report.heatmaps.size(), 2u);
  EXPECT_EQ(io::parse_heatmap_pgm(io::read_file(dir_ / "run/heatmap_accuracy.pgm")).width, 192);
  // Occlusion frames are rejected and never logged as samples.
  EXPECT_GT(report.stats.rejections[static_cast<std::size_t>(RejectionReason::low_confidence)], 0u);

  ASSERT_EQ(cli({"evaluate", p("run/samples.csv"), p("sim/trials.csv"), "--out", p("eval"), "--screen", "96x54"}),
            kOk);
  const Evaluation e = io::parse_evaluation_json(io::read_file(dir_ / "eval/evaluation.json"));
  EXPECT_EQ(e.pooled.accuracy, report.evaluation->pooled.accuracy);
  EXPECT_EQ(e.pooled.precision, report.evaluation->pooled.precision);

  std::ofstream(dir_ / "m.csv") << "kind,magnitude_m,head_distance_m\npairwise_distance,0.551,2.0\n"
                                   "object_size,0.2237,2.0\n";
  ASSERT_EQ(cli({"requirements", p("m.csv"), "--out", p("req")}), kOk);
  const auto req = io::parse_requirements_json(io::read_file(dir_ / "req/requirements.json"));
  EXPECT_NEAR(req.required_accuracy, 15.4, 0.005);

  ASSERT_EQ(cli({"report", p("run"), "--requirements", p("req/requirements.json")}), kOk);
  const std::string text = io::read_file(dir_ / "run/report.txt");
  EXPECT_NE(text.find("accuracy (median)"), std::string::npos);
  EXPECT_NE(text.find("met"), std::string::npos);
  EXPECT_EQ(io::parse_densities_json(io::read_file(dir_ / "run/densities.json")).size(), kDensityVariableCount);
}

TEST_F(CliTest, RunIsByteIdentical) {
  ASSERT_EQ(cli({"simulate", p("scenario.ini"), "--out", p("sim")}), kOk);
  for (const char* fmt : {"csv", "json"}) {
    ASSERT_EQ(cli({"run", p("sim/recording.ndjson"), "--out", p("a"), "--seed", "11", "--format", fmt}), kOk);
    ASSERT_EQ(cli({"run", p("sim/recording.ndjson"), "--out", p("b"), "--seed", "11", "--format", fmt}), kOk);
    const std::string name = std::string("samples.") + (fmt == std::string("csv") ? "csv" : "jsonl");
    EXPECT_EQ(io::read_file(dir_ / "a" / name), io::read_file(dir_ / "b" / name)) << fmt;
  }
  ASSERT_EQ(cli({"simulate", p("scenario.ini"), "--out", p("sim2")}), kOk);
  EXPECT_EQ(io::read_file(dir_ / "sim/recording.ndjson"), io::read_file(dir_ / "sim2/recording.ndjson"));
  EXPECT_EQ(io::read_file(dir_ / "sim/recording.clouds.bin"), io::read_file(dir_ / "sim2/recording.clouds.bin"));
}

TEST_F(CliTest, TruncatedRecordingFailsWithoutOutputs) {
  ASSERT_EQ(cli({"simulate", p("scenario.ini"), "--out", p("sim")}), kOk);
  const std::string text = io::read_file(dir_ / "sim/recording.ndjson");
  io::write_file_atomic(dir_ / "sim/recording.ndjson", text.substr(0, text.size() * 2 / 3));
  EXPECT_EQ(cli({"run", p("sim/recording.ndjson"), "--out", p("run")}), kValidation);
  EXPECT_FALSE(fs::exists(dir_ / "run/run_report.json"));
  EXPECT_FALSE(fs::exists(dir_ / "run/samples.csv"));
}

TEST_F(CliTest, ExitCodesSeparateFailureKinds) {
  EXPECT_EQ(cli({}), kUsage);
  EXPECT_EQ(cli({"frobnicate"}), kUsage);
  EXPECT_EQ(cli({"run"}), kUsage);
  EXPECT_EQ(cli({"run", p("missing.ndjson"), "--out", p("x")}), kRuntime);
  std::ofstream(dir_ / "bad.ini") << "[pipeline]\nnot_a_key = 1\n";
  EXPECT_EQ(cli({"simulate", "--out", p("sim"), "--config", p("bad.ini")}), kParse);
  std::ofstream(dir_ / "invalid.ini") << "[pipeline]\nface_gate_threshold = 3\n";
  EXPECT_EQ(cli({"simulate", "--out", p("sim"), "--config", p("invalid.ini")}), kValidation);
  std::ofstream(dir_ / "m.csv") << "kind,magnitude_m,head_distance_m\nobject_size,0.2,2.0\n";
  EXPECT_EQ(cli({"requirements", p("m.csv")}), kValidation);
  EXPECT_EQ(cli({"run", p("x.ndjson"), "--out", p("x"), "--format", "xml"}), kUsage);
}

TEST_F(CliTest, DumpConfigParsesBack) {
  ::testing::internal::CaptureStdout();
  ASSERT_EQ(cli({"--dump-config"}), kOk);
  const std::string out = ::testing::internal::GetCapturedStdout();
  EXPECT_EQ(io::format_config(io::parse_config(out)), out);
  ::testing::internal::CaptureStdout();
  ASSERT_EQ(cli({"--dump-scenario"}), kOk);
  const std::string scen = ::testing::internal::GetCapturedStdout();
  EXPECT_EQ(io::format_scenario(io::parse_scenario(scen)), scen);
}

}  // namespace
}  // namespace icugaze::cli
