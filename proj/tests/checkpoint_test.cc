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

#include "dpsynth/checkpoint.h"

#include <string>

#include "gtest/gtest.h"
#include "test_util.h"

namespace dpsynth {
namespace {

TrainedModel SmallModel() {
  TabularDataset d = testing::RandomDataset(1, 300, 2, 2);
  auto map = FitEncoding(d);
  auto m = Encode(d, *map);
  DpSgdConfig config{.num_examples = 300,
                     .batch_size = 30,
                     .epochs = 2,
                     .learning_rate = 0.3,
                     .clip_norm = 0.75,
                     .noise_multiplier = 1.1,
                     .seed = 4,
                     .hidden_layers = {6}};
  auto model = DpTrain(*m, *map, config, PrivacyBudget{.epsilon = 50.0, .delta = 1e-5});
  EXPECT_TRUE(model.ok()) << model.status().message();
  return *std::move(model);
}

TEST(ContentIdTest, Fnv1aVectors) {
  EXPECT_EQ(ContentId(""), "cbf29ce484222325");
  EXPECT_EQ(ContentId("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(ContentId("foobar"), "85944171f73967e8");
}

TEST(CheckpointTest, RoundTripIsExact) {
  TrainedModel model = SmallModel();
  const std::string json = CheckpointToJson(model, "feedface");
  std::string hash;
  DPSYNTH_ASSERT_OK_AND_ASSIGN(TrainedModel back, CheckpointFromJson(json, &hash));
  EXPECT_EQ(hash, "feedface");
  EXPECT_EQ(back.model.parameters(), model.model.parameters());
  EXPECT_EQ(back.model.layers(), model.model.layers());
  EXPECT_EQ(back.encoding, model.encoding);
  EXPECT_EQ(back.config, model.config);
  EXPECT_EQ(back.budget.epsilon, model.budget.epsilon);
  EXPECT_EQ(back.epsilon_spent, model.epsilon_spent);
  EXPECT_EQ(CheckpointToJson(back, "feedface"), json);
  EXPECT_EQ(CheckpointId(back), CheckpointId(model));
  EXPECT_EQ(CheckpointId(model), ContentId(CheckpointToJson(model)));
}

TEST(CheckpointTest, FileRoundTrip) {
  TrainedModel model = SmallModel();
  const std::string path = (testing::TempDir("ckpt") / "model.json").string();
  DPSYNTH_ASSERT_OK(SaveCheckpoint(model, path));
  DPSYNTH_ASSERT_OK_AND_ASSIGN(TrainedModel back, LoadCheckpoint(path));
  EXPECT_EQ(back.model.parameters(), model.model.parameters());
}

TEST(CheckpointTest, RejectsTamperedDocuments) {
  TrainedModel model = SmallModel();
  std::string json = CheckpointToJson(model);
  EXPECT_FALSE(CheckpointFromJson("{}").ok());
  const std::size_t pos = json.find("\"relu\"");
  ASSERT_NE(pos, std::string::npos);
  json.replace(pos, 6, "\"tanh\"");
  EXPECT_FALSE(CheckpointFromJson(json).ok());
}

}  // namespace
}  // namespace dpsynth
