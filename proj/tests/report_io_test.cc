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

#include "dpsynth/report_io.h"

#include <cmath>
#include <limits>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpsynth {
namespace {

using ::testing::HasSubstr;

EvalReport Row(std::string synth, DownstreamModelKind kind, double acc, std::size_t factor = 1) {
  EvalReport r;
  r.dataset_id = "adult";
  r.synthesizer_id = std::move(synth);
  r.model_kind = kind;
  r.scale_factor = factor;
  r.accuracy = acc;
  r.f1 = acc / 2;
  r.seed = 3;
  r.repeat_count = 1;
  r.repeats = {{.seed = 9, .accuracy = acc, .f1 = acc / 2}};
  return r;
}

TEST(ReportIoTest, JsonRoundTrip) {
  std::vector<EvalReport> reports = {Row("dpsynth", DownstreamModelKind::kMlp, 0.8125),
                                     Row("np_baseline", DownstreamModelKind::kLinearSvm, 0.5)};
  reports[0].budget = PrivacyBudget{.epsilon = 3.0, .delta = 1e-5};
  reports[0].warnings = {"w"};
  reports[0].noise_multiplier = 0.9657639086;
  reports[0].config_hash = "0123456789abcdef";
  const std::string json = ReportsToJson(reports);
  EXPECT_EQ(json.back(), '\n');
  DPSYNTH_ASSERT_OK_AND_ASSIGN(std::vector<EvalReport> back, ReportsFromJson(json));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].budget->delta, 1e-5);
  EXPECT_FALSE(back[1].budget.has_value());
  EXPECT_EQ(back[0].noise_multiplier, 0.9657639086);
  EXPECT_EQ(ReportsToJson(back), json);
}

TEST(ReportIoTest, NonFiniteBecomesNull) {
  std::vector<EvalReport> reports = {Row("x", DownstreamModelKind::kMlp, 0.5)};
  reports[0].epsilon_spent = std::numeric_limits<double>::infinity();
  EXPECT_THAT(ReportsToJson(reports), HasSubstr("\"epsilon_spent\": null"));
}

TEST(ReportIoTest, RejectsMalformedDocuments) {
  EXPECT_FALSE(ReportsFromJson("{}").ok());
  EXPECT_FALSE(ReportsFromJson("not json").ok());
  std::vector<EvalReport> reports = {Row("x", DownstreamModelKind::kMlp, 0.5)};
  std::string json = ReportsToJson(reports);
  json.insert(json.find('{') + 1, "\"bogus\": 1,");
  EXPECT_FALSE(ReportsFromJson(json).ok());
}

TEST(ReportIoTest, SummaryTable) {
  std::vector<EvalReport> reports = {Row("dpsynth", DownstreamModelKind::kMlp, 0.83861),
                                     Row("dpsynth", DownstreamModelKind::kLinearSvm, 0.8),
                                     Row("np_baseline", DownstreamModelKind::kMlp, 0.85),
                                     Row("np_baseline", DownstreamModelKind::kLinearSvm, 0.84)};
  reports[3].timed_out = true;
  reports[2].collapse = true;
  EXPECT_EQ(SummaryCsv(reports),
            "method,mlp_accuracy,mlp_f1,mlp_collapse,linear_svm_accuracy,linear_svm_f1,"
            "linear_svm_collapse\n"
            "dpsynth,0.8386,0.4193,false,0.8000,0.4000,false\n"
            "np_baseline,0.8500,0.4250,true,T/O,T/O,T/O\n");
}

TEST(ReportIoTest, ScaleTable) {
  std::vector<EvalReport> reports = {Row("dpsynth", DownstreamModelKind::kMlp, 0.8, 1),
                                     Row("dpsynth", DownstreamModelKind::kMlp, 0.81, 2),
                                     Row("dpsynth", DownstreamModelKind::kMlp, 0.82, 3)};
  reports[2].timed_out = true;
  EXPECT_EQ(ScaleCsv(reports), "method,model,1x,2x,3x\ndpsynth,mlp,0.8000,0.8100,T/O\n");
}

}  // namespace
}  // namespace dpsynth
