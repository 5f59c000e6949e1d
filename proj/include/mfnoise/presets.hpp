// Copyright 2026 The mfnoise Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MFNOISE_PRESETS_HPP_
#define MFNOISE_PRESETS_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mfnoise/objective.hpp"
#include "mfnoise/optimize.hpp"

namespace mfnoise {

enum class TargetKind { kRank1, kRankR, kScalar2d };

// Ground truth description; rank-r targets use leading-identity factors.
struct TargetSpec {
  TargetKind kind = TargetKind::kRank1;
  std::size_t d1 = 20;
  std::size_t d2 = 30;
  std::vector<double> sigma{1.0};  // singular values, only read for kRankR

  GroundTruth build() const;
  std::string describe() const;

  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

struct ExperimentPreset {
  std::string name;
  TargetSpec target;
  RunConfig config;  // seed is filled in by resolve()
  std::size_t repeats = 1;
  std::string figure_ref;

  RunConfig resolve(std::uint64_t seed) const;
};

// Horizons the experiment presets use.
inline constexpr std::uint64_t kRank1Horizon = 50000;
inline constexpr std::uint64_t kRankRHorizon = 100000;
inline constexpr std::uint64_t kPhaseHorizon = 200000;
inline constexpr std::uint64_t kDefaultStride = 50;

const std::vector<ExperimentPreset>& preset_registry();
// Throws InvalidArgument listing the known names.
const ExperimentPreset& find_preset(std::string_view name);

}  // namespace mfnoise

#endif  // MFNOISE_PRESETS_HPP_
