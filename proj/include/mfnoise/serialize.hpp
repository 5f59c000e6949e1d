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

// CSV/JSON encodings for trajectories, configs, factor pairs and reports.
//
// Trajectory CSV columns (header row always present):
//   t, loss, smoothed_loss, alpha1, alpha2, beta1_norm, beta2_norm, overlap,
//   ratio_sq, gram_residual, dist_to_opt, norm_sq_sum
// Reals use the shortest text that parses back to the same double; unset
// fields are left empty.

#ifndef MFNOISE_SERIALIZE_HPP_
#define MFNOISE_SERIALIZE_HPP_

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfnoise/errors.hpp"
#include "mfnoise/optimize.hpp"
#include "mfnoise/presets.hpp"
#include "mfnoise/verify.hpp"

namespace mfnoise {

inline constexpr int kSchemaVersion = 1;

// Bad config file or value. key() names the offending key ("" if the file
// as a whole is unreadable).
class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::string key, const std::string& what)
      : InvalidArgument(key.empty() ? what : "config key '" + key + "': " + what),
        key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

std::string format_real(double v);

extern const std::vector<std::string> kTrajectoryColumns;

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

nlohmann::json to_json(const Mat& m);
Mat mat_from_json(const nlohmann::json& j, const std::string& key);
nlohmann::json to_json(const FactorPair& p);
FactorPair factor_pair_from_json(const nlohmann::json& j);
nlohmann::json to_json(const IterateDiagnostics& d);
nlohmann::json to_json(const Trajectory& traj);
nlohmann::json to_json(const CheckReport& c);
nlohmann::json reports_to_json(const std::vector<CheckReport>& reports);

// Target plus run configuration: everything needed to reproduce one run.
struct ExperimentSetup {
  TargetSpec target;
  RunConfig config;
};

nlohmann::json to_json(const ExperimentSetup& s);

// Overlays the keys present in `j` onto `base`. Unknown keys and invalid
// values raise ConfigError naming the key. Recognized keys:
//   algorithm ("gd" | "pgd"), eta_x, eta_y, horizon, seed, record_stride,
//   noise {sigma1, sigma2},
//   init {kind: "gaussian", sigma_x, sigma_y} | {kind: "explicit", x, y},
//   target {kind: "rank1", d1, d2} | {kind: "rankr", d1, d2, sigma} | {kind: "scalar2d"}
ExperimentSetup apply_config(const nlohmann::json& j, ExperimentSetup base);

// Defaults used when neither a preset nor a config file provides a value.
ExperimentSetup default_setup();

ExperimentSetup load_config(const std::filesystem::path& path, ExperimentSetup base = default_setup());

}  // namespace mfnoise

#endif  // MFNOISE_SERIALIZE_HPP_
