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

#ifndef MFNOISE_SWEEP_HPP_
#define MFNOISE_SWEEP_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfnoise/optimize.hpp"
#include "mfnoise/serialize.hpp"

namespace mfnoise {

struct FiveNumberSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  std::size_t count = 0;

  friend bool operator==(const FiveNumberSummary&, const FiveNumberSummary&) = default;
};

// Quartiles by linear interpolation between order statistics. Empty input
// yields count = 0 and NaN fields.
FiveNumberSummary five_number_summary(std::span<const double> values);

struct SweepRow {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  IterateDiagnostics final;
};

struct SweepSummary {
  std::string preset;
  std::uint64_t master_seed = 0;
  ExperimentSetup setup;
  std::vector<SweepRow> rows;  // ordered by index
  FiveNumberSummary ratio_sq;
  FiveNumberSummary loss;
  FiveNumberSummary dist_to_opt;
};

// Run i uses seed mix_seed(master_seed, i). Runs execute on up to `jobs`
// threads; the result does not depend on jobs.
SweepSummary run_sweep(const ExperimentSetup& setup, std::string preset, std::size_t repeats,
                       std::uint64_t master_seed, std::size_t jobs);

// Recomputes the aggregates from rows.
void recompute_aggregates(SweepSummary& s);

nlohmann::json to_json(const SweepSummary& s);
// Parses a summary and checks the stored aggregates against the rows;
// throws ConfigError on mismatch.
SweepSummary sweep_from_json(const nlohmann::json& j);

}  // namespace mfnoise

#endif  // MFNOISE_SWEEP_HPP_
