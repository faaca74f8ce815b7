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

#include "dpsynth/schema_io.h"

#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpsynth {
namespace {

using ::testing::HasSubstr;

TEST(SchemaIoTest, ByteRoundTrip) {
  TabularDataset d = testing::RandomDataset(1, 100, 2, 2);
  const std::string json = SchemaToJson(d.schema());
  DPSYNTH_ASSERT_OK_AND_ASSIGN(Schema parsed, SchemaFromJson(json));
  EXPECT_EQ(parsed, d.schema());
  EXPECT_EQ(SchemaToJson(parsed), json);
}

TEST(SchemaIoTest, SavedSchemaReproducesEncoding) {
  const std::string csv = testing::RandomCsv(2, 200, 3, 2);
  DPSYNTH_ASSERT_OK_AND_ASSIGN(TabularDataset inferred, ParseCsv(csv));
  const std::string path = (testing::TempDir("schema") / "schema.json").string();
  DPSYNTH_ASSERT_OK(SaveSchema(inferred.schema(), path));
  DPSYNTH_ASSERT_OK_AND_ASSIGN(Schema loaded, LoadSchema(path));
  DPSYNTH_ASSERT_OK_AND_ASSIGN(TabularDataset hinted,
                               ParseCsv(csv, {.schema_hint = loaded, .label = ""}));
  EXPECT_TRUE(SameContents(inferred, hinted));
  DPSYNTH_ASSERT_OK_AND_ASSIGN(EncodingMap a, FitEncoding(inferred));
  DPSYNTH_ASSERT_OK_AND_ASSIGN(EncodingMap b, FitEncoding(hinted));
  EXPECT_EQ(a, b);
  DPSYNTH_ASSERT_OK_AND_ASSIGN(EncodedMatrix ea, Encode(inferred, a));
  DPSYNTH_ASSERT_OK_AND_ASSIGN(EncodedMatrix eb, Encode(hinted, b));
  EXPECT_EQ(ea.features, eb.features);
  EXPECT_EQ(ea.labels, eb.labels);
}

TEST(SchemaIoTest, EncodingMapRoundTrip) {
  TabularDataset d = testing::RandomDataset(3, 100, 2, 2);
  DPSYNTH_ASSERT_OK_AND_ASSIGN(EncodingMap map, FitEncoding(d));
  const std::string json = EncodingMapToJson(map);
  DPSYNTH_ASSERT_OK_AND_ASSIGN(EncodingMap back, EncodingMapFromJson(json));
  EXPECT_EQ(back, map);
  EXPECT_EQ(EncodingMapToJson(back), json);
}

TEST(SchemaIoTest, RejectsMalformedSchemas) {
  EXPECT_FALSE(SchemaFromJson("[]").ok());
  EXPECT_FALSE(SchemaFromJson("{").ok());
  TabularDataset d = testing::RandomDataset(4, 50, 1, 1);
  std::string json = SchemaToJson(d.schema());
  json.insert(json.find('{') + 1, "\"extra\": true,");
  auto bad = SchemaFromJson(json);
  ASSERT_FALSE(bad.ok());
  EXPECT_THAT(bad.status().message(), HasSubstr("extra"));
  EXPECT_EQ(LoadSchema("/nonexistent/schema.json").status().code(),
            absl::StatusCode::kNotFound);
}

}  // namespace
}  // namespace dpsynth
