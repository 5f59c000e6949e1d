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


// Trajectory-level properties over many seeds. Slower than the unit tests.

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mfnoise/optimize.hpp"
#include "mfnoise/presets.hpp"
#include "mfnoise/sweep.hpp"

namespace mfnoise {
namespace {

constexpr std::uint64_t kMasterSeed = 7;

double median_of(std::vector<double> v) { return five_number_summary(v).median; }

// Blow-up alarm: no recorded norm_sq_sum may exceed 10x the larger of the
// whole-run median and the starting value.
bool bounded(const Trajectory& traj) {
  std::vector<double> norms;
  for (const auto& r : traj.records) norms.push_back(r.norm_sq_sum);
  const double m = std::max(median_of(norms), norms.front());
  return std::all_of(norms.begin(), norms.end(), [&](double v) { return v <= 10.0 * m; });
}

TEST_CASE("balanced rank-1 presets: saddle escape, balancing and boundedness") {
  for (const char* name : {"fig2a", "fig2b", "fig2c"}) {
    const auto& preset = find_preset(name);
    const auto gt = preset.target.build();
    int balanced = 0;
    int escaped = 0;
    int bounded_runs = 0;
    for (std::size_t i = 0; i < 100; ++i) {
      const auto traj = run(preset.resolve(mix_seed(kMasterSeed, i)), gt);
      const auto& rec = traj.records;
      balanced += std::abs(rec.back().ratio_sq - 1.0) <= 0.15;
      bool tail_ok = rec.back().overlap >= 0.9;
      for (std::size_t k = rec.size() * 3 / 4; k < rec.size(); ++k) tail_ok &= rec[k].overlap >= 0.25;
      escaped += tail_ok;
      bounded_runs += bounded(traj);
    }
    INFO(name);
    CHECK(balanced >= 90);
    CHECK(escaped == 100);
    CHECK(bounded_runs == 100);
  }
}

TEST_CASE("all presets: boundedness monitor on one seed") {
  for (const auto& preset : preset_registry()) {
    INFO(preset.name);
    CHECK(bounded(run(preset.resolve(mix_seed(kMasterSeed, 0)), preset.target.build())));
  }
}

TEST_CASE("rank3-desk: PGD approaches the smoothed balanced optimum") {
  const auto& preset = find_preset("rank3-desk");
  const auto gt = preset.target.build();
  for (std::size_t i = 0; i < 3; ++i) {
    const auto traj = run(preset.resolve(mix_seed(kMasterSeed, i)), gt);
    const auto& last = traj.records.back();
    CHECK(last.dist_to_opt.has_value());
    CHECK(*last.dist_to_opt <= 0.5);
    CHECK(last.ratio_sq == doctest::Approx(1.0).epsilon(0.15));
  }
}

}  // namespace
}  // namespace mfnoise
