//
// Copyright 2026 The dpsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.h"
#include "dpsynth/schema_io.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "run_config.h"
#include "test_util.h"

namespace dpsynth::cli {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;
using Json = nlohmann::ordered_json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result RunCli(std::vector<std::string> args) {
  args.insert(args.begin(), "dpsynth");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = Run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path& p) {
  auto s = ReadFile(p.string());
  EXPECT_TRUE(s.ok()) << p;
  return s.ok() ? *s : "";
}

// Small but complete run configuration over a synthetic CSV.
fs::path WriteFixture(const fs::path& dir, double epsilon = 3.0) {
  const fs::path csv = dir / "toy.csv";
  EXPECT_TRUE(WriteFile(csv.string(), testing::RandomCsv(3, 1200, 2, 3)).ok());
  Json config = {
      {"dataset", csv.string()},
      {"budget", {{"epsilon", epsilon}, {"delta", 1e-5}}},
      {"seed", 7},
      {"trainer", {{"batch_size", 64}, {"epochs", 2}, {"hidden_layers", {8}}}},
      {"eval", {{"repeats", 1}, {"record_runtime", false}}},
      {"downstream",
       {{"mlp", {{"hidden_layers", {8}}, {"epochs", 3}}}, {"linear_svm", {{"epochs", 3}}}}},
  };
  const fs::path path = dir / (epsilon == 3.0 ? "config.json" : "config_half.json");
  EXPECT_TRUE(WriteFile(path.string(), config.dump(2)).ok());
  return path;
}

TEST(CliTest, HelpMatchesGolden) {
  const std::string golden = Slurp(fs::path(DPSYNTH_GOLDEN_DIR) / "help.txt");
  EXPECT_EQ(HelpText(), golden);
  Result r = RunCli({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, golden);
  for (const char* sub : {"infer-schema", "train", "synth", "eval", "bench", "scale",
                          "accountant", "pipeline"}) {
    EXPECT_THAT(golden, HasSubstr(std::string(sub) + "\n")) << sub;
  }
}

TEST(CliTest, AccountantReportsBothDirections) {
  Result r = RunCli({"accountant", "-n", "10000", "-b", "100", "-e", "10", "-z", "1.0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_NEAR(j["epsilon"].get<double>(), 2.5383, 1e-4);
  EXPECT_EQ(j["steps"].get<int>(), 1000);
  for (const char* key : {"epsilon", "delta", "z", "best_order", "steps", "sampling_rate"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  r = RunCli({"accountant", "-n", "10000", "-b", "100", "-e", "10", "--epsilon", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_LE(Json::parse(r.out)["epsilon"].get<double>(), 3.0);
  r = RunCli({"accountant", "-n", "100", "-b", "100", "-e", "1000", "--epsilon", "1e-4"});
  EXPECT_EQ(r.code, kExitInfeasibleBudget);
}

TEST(CliTest, ExitCodes) {
  const fs::path dir = testing::TempDir("cli");
  EXPECT_NE(RunCli({"no-such-command"}).code, kExitOk);
  const fs::path bad = dir / "bad.json";
  ASSERT_TRUE(WriteFile(bad.string(), R"({"bogus": 1})").ok());
  Result r = RunCli({"pipeline", "-c", bad.string(), "-o", (dir / "out").string()});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_THAT(r.err, HasSubstr("bogus"));
  const fs::path single = dir / "single.csv";
  ASSERT_TRUE(WriteFile(single.string(), "a\n1\n2\n").ok());
  EXPECT_EQ(RunCli({"infer-schema", single.string()}).code, kExitData);
  r = RunCli({"pipeline", "--data", (dir / "missing.csv").string(), "-o",
              (dir / "out").string()});
  EXPECT_EQ(r.code, kExitData);
}

TEST(CliTest, InferSchemaRoundTrip) {
  const fs::path dir = testing::TempDir("cli");
  const fs::path csv = dir / "toy.csv";
  ASSERT_TRUE(WriteFile(csv.string(), testing::RandomCsv(1, 100, 2, 2)).ok());
  Result r = RunCli({"infer-schema", csv.string(), "-o", (dir / "schema.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  DPSYNTH_ASSERT_OK_AND_ASSIGN(Schema schema, LoadSchema((dir / "schema.json").string()));
  EXPECT_EQ(schema.attributes.size(), 4u);
  r = RunCli({"infer-schema", csv.string()});
  EXPECT_EQ(r.out, Slurp(dir / "schema.json"));
}

TEST(CliTest, PipelineWritesFourDeterministicArtifacts) {
  const fs::path dir = testing::TempDir("cli");
  const fs::path config = WriteFixture(dir);
  const fs::path a = dir / "a";
  const fs::path b = dir / "b";
  Result r = RunCli({"pipeline", "-c", config.string(), "-o", a.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  ASSERT_EQ(setenv(kOutputDirEnv, b.string().c_str(), 1), 0);
  r = RunCli({"pipeline", "-c", config.string()});
  unsetenv(kOutputDirEnv);
  ASSERT_EQ(r.code, kExitOk) << r.err;

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(a)) {
    names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  EXPECT_THAT(names, ::testing::ElementsAre("model.json", "provenance.json", "report.json",
                                            "synthetic.csv"));
  for (const std::string& n : names) {
    EXPECT_EQ(Slurp(a / n), Slurp(b / n)) << n;
  }
  DPSYNTH_ASSERT_OK_AND_ASSIGN(RunConfig parsed, LoadRunConfig(config.string()));
  const std::string hash = ConfigHash(parsed);
  for (const std::string& n : {"model.json", "provenance.json", "report.json"}) {
    EXPECT_THAT(Slurp(a / n), HasSubstr(hash)) << n;
  }
}

TEST(CliTest, HalvingEpsilonRaisesNoise) {
  const fs::path dir = testing::TempDir("cli");
  const fs::path full = WriteFixture(dir, 3.0);
  const fs::path half = WriteFixture(dir, 1.5);
  ASSERT_EQ(RunCli({"pipeline", "-c", full.string(), "-o", (dir / "full").string()}).code,
            kExitOk);
  ASSERT_EQ(RunCli({"pipeline", "-c", half.string(), "-o", (dir / "half").string()}).code,
            kExitOk);
  const double z_full =
      Json::parse(Slurp(dir / "full" / "provenance.json"))["noise_multiplier"].get<double>();
  const double z_half =
      Json::parse(Slurp(dir / "half" / "provenance.json"))["noise_multiplier"].get<double>();
  EXPECT_GT(z_half, z_full);
}

TEST(CliTest, FlagsOverrideConfigAndEnv) {
  const fs::path dir = testing::TempDir("cli");
  const fs::path config = WriteFixture(dir);
  ASSERT_EQ(setenv(kOutputDirEnv, (dir / "env").string().c_str(), 1), 0);
  Result r = RunCli({"train", "-c", config.string(), "-o", (dir / "flag").string(),
                     "--epsilon", "2", "--noise-multiplier", "5"});
  unsetenv(kOutputDirEnv);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir / "flag" / "model.json"));
  EXPECT_FALSE(fs::exists(dir / "env"));
  Json model = Json::parse(Slurp(dir / "flag" / "model.json"));
  EXPECT_THAT(model.dump(), HasSubstr("\"noise_multiplier\":5.0"));
}

TEST(RunConfigTest, StrictParsing) {
  EXPECT_FALSE(ParseRunConfig(R"({"budget": {"epsilon": "3"}})").ok());
  EXPECT_FALSE(ParseRunConfig(R"({"trainer": {"batch": 3}})").ok());
  EXPECT_FALSE(ParseRunConfig(R"({"eval": {"models": ["forest"]}})").ok());
  DPSYNTH_ASSERT_OK_AND_ASSIGN(RunConfig c,
                               ParseRunConfig(R"({"dataset": "x/adult.csv", "seed": 4})"));
  EXPECT_EQ(c.ResolvedDatasetId(), "adult");
  EXPECT_EQ(c.seed, 4u);
  DPSYNTH_ASSERT_OK_AND_ASSIGN(RunConfig back, ParseRunConfig(RunConfigToJson(c)));
  EXPECT_EQ(RunConfigToJson(back), RunConfigToJson(c));
  RunConfig moved = c;
  moved.output_dir = "elsewhere";
  EXPECT_EQ(ConfigHash(moved), ConfigHash(c));
  moved.seed = 5;
  EXPECT_NE(ConfigHash(moved), ConfigHash(c));
}

}  // namespace
}  // namespace dpsynth::cli
