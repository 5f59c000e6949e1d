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

#include "mfnoise/presets.hpp"

#include <cmath>

#include "mfnoise/errors.hpp"

namespace mfnoise {

GroundTruth TargetSpec::build() const {
  switch (kind) {
    case TargetKind::kRank1:
      return GroundTruth::rank1(d1, d2);
    case TargetKind::kScalar2d:
      return GroundTruth::rank1(1, 1);
    case TargetKind::kRankR:
      return GroundTruth::leading_identity(d1, d2, sigma);
  }
  throw InvalidArgument("TargetSpec: unknown kind");
}

std::string TargetSpec::describe() const {
  switch (kind) {
    case TargetKind::kRank1:
      return "rank1(" + std::to_string(d1) + "," + std::to_string(d2) + ")";
    case TargetKind::kScalar2d:
      return "scalar2d";
    case TargetKind::kRankR:
      return "rankr(" + std::to_string(d1) + "," + std::to_string(d2) + "," +
             std::to_string(sigma.size()) + ")";
  }
  return "unknown";
}

RunConfig ExperimentPreset::resolve(std::uint64_t seed) const {
  RunConfig cfg = config;
  cfg.seed = seed;
  return cfg;
}

namespace {

constexpr double kSmallInit = 1e-2;
constexpr double kLargeInit = 1e-1;
constexpr double kEta = 1e-2;
constexpr double kNoiseY = 0.05;

// d1 s1^2 = d2 s2^2 for (d1, d2) = (20, 30).
const NoiseConfig kBalancedNoise{std::sqrt(1.5) * kNoiseY, kNoiseY};
// gamma^2 = 0.5.
const NoiseConfig kHalfNoise{std::sqrt(0.75) * kNoiseY, kNoiseY};

RunConfig make_config(Algorithm alg, double eta_x, double init_scale, NoiseConfig noise,
                      std::uint64_t horizon) {
  RunConfig cfg;
  cfg.algorithm = alg;
  cfg.eta_x = eta_x;
  cfg.eta_y = kEta;
  cfg.horizon = horizon;
  cfg.init = GaussianInit{init_scale, init_scale};
  cfg.noise = alg == Algorithm::kGD ? NoiseConfig{} : noise;
  cfg.record_stride = kDefaultStride;
  return cfg;
}

std::vector<ExperimentPreset> build_registry() {
  std::vector<ExperimentPreset> out;
  const TargetSpec rank1{TargetKind::kRank1, 20, 30, {1.0}};
  const TargetSpec rank10{TargetKind::kRankR, 20, 30, std::vector<double>(10, 1.0)};

  struct Variant {
    const char* suffix;
    Algorithm alg;
    double eta_x;
    double init;
    const char* caption;
  };
  const Variant variants[] = {
      {"a", Algorithm::kPerturbedGD, kEta, kSmallInit, "PGD, balanced noise, small init"},
      {"b", Algorithm::kPerturbedGD, kEta, kLargeInit, "PGD, balanced noise, large init"},
      {"c", Algorithm::kPerturbedGD, 0.5 * kEta, kSmallInit,
       "PGD, balanced noise, small init, eta_x = 0.5 eta_y"},
      {"d", Algorithm::kGD, kEta, kSmallInit, "GD, small init"},
      {"e", Algorithm::kGD, kEta, kLargeInit, "GD, large init"},
      {"f", Algorithm::kGD, 0.5 * kEta, kSmallInit, "GD, small init, eta_x = 0.5 eta_y"},
  };
  for (const auto& v : variants) {
    out.push_back(ExperimentPreset{std::string("fig2") + v.suffix, rank1,
                                   make_config(v.alg, v.eta_x, v.init, kBalancedNoise, kRank1Horizon),
                                   100, std::string("Fig. 2(") + v.suffix + "): rank-1, " + v.caption});
  }
  out.push_back(ExperimentPreset{
      "fig2g", rank1,
      make_config(Algorithm::kPerturbedGD, kEta, kSmallInit, kHalfNoise, kRank1Horizon), 100,
      "Fig. 2(g): rank-1, PGD, unbalanced noise gamma^2 = 0.5, small init"});
  for (const auto& v : variants) {
    out.push_back(ExperimentPreset{std::string("fig3") + v.suffix, rank10,
                                   make_config(v.alg, v.eta_x, v.init, kBalancedNoise, kRankRHorizon),
                                   100, std::string("Fig. 3(") + v.suffix + "): rank-10, " + v.caption});
  }

  RunConfig phase = make_config(Algorithm::kPerturbedGD, kEta, 0.0, NoiseConfig{0.05, 0.05},
                                kPhaseHorizon);
  phase.init = FactorPair{Mat{{3.0}}, Mat{{5.0}}};
  out.push_back(ExperimentPreset{"phase2d", TargetSpec{TargetKind::kScalar2d, 1, 1, {1.0}}, phase,
                                 50, "Fig. 4: F = 1/2 (xy - 1)^2 from (3, 5), phase transition"});

  const double desk_variance = 0.01;
  RunConfig desk = make_config(Algorithm::kPerturbedGD, kEta, kSmallInit,
                               NoiseConfig{std::sqrt(desk_variance / 8.0),
                                           std::sqrt(desk_variance / 10.0)},
                               kRankRHorizon);
  out.push_back(ExperimentPreset{"rank3-desk", TargetSpec{TargetKind::kRankR, 8, 10, {3.0, 2.0, 1.0}},
                                 desk, 20,
                                 "desk-scale rank-3 target, Sigma = diag(3, 2, 1), balanced noise"});
  return out;
}

}  // namespace

const std::vector<ExperimentPreset>& preset_registry() {
  static const std::vector<ExperimentPreset> registry = build_registry();
  return registry;
}

const ExperimentPreset& find_preset(std::string_view name) {
  for (const auto& p : preset_registry())
    if (p.name == name) return p;
  std::string known;
  for (const auto& p : preset_registry()) known += (known.empty() ? "" : ", ") + p.name;
  throw InvalidArgument("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

}  // namespace mfnoise
