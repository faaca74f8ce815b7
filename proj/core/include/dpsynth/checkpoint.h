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

// Model checkpoint: a JSON document holding the architecture, parameters,
// the encoding the model was trained against, and the full training
// provenance (epsilon, delta, z, b, E, eta, C, seed).

#ifndef DPSYNTH_CHECKPOINT_H_
#define DPSYNTH_CHECKPOINT_H_

#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpsynth/dpsgd_trainer.h"

namespace dpsynth {

inline constexpr int kCheckpointVersion = 1;

// `config_hash` identifies the run configuration that produced the model.
std::string CheckpointToJson(const TrainedModel& model, std::string_view config_hash = "");
absl::StatusOr<TrainedModel> CheckpointFromJson(std::string_view json,
                                                std::string* config_hash = nullptr);

absl::Status SaveCheckpoint(const TrainedModel& model, const std::string& path,
                            std::string_view config_hash = "");
absl::StatusOr<TrainedModel> LoadCheckpoint(const std::string& path,
                                            std::string* config_hash = nullptr);

// 64-bit FNV-1a of `bytes` as 16 hex digits.
std::string ContentId(std::string_view bytes);

// ContentId of the model's checkpoint without a config hash.
std::string CheckpointId(const TrainedModel& model);

}  // namespace dpsynth

#endif  // DPSYNTH_CHECKPOINT_H_
