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

#ifndef MFNOISE_OPTIMIZE_HPP_
#define MFNOISE_OPTIMIZE_HPP_

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mfnoise/core.hpp"
#include "mfnoise/objective.hpp"

namespace mfnoise {

enum class Algorithm { kGD, kPerturbedGD };

struct GaussianInit {
  double sigma_x = 1e-2;
  double sigma_y = 1e-2;
  friend bool operator==(const GaussianInit&, const GaussianInit&) = default;
};

using Init = std::variant<GaussianInit, FactorPair>;

struct RunConfig {
  Algorithm algorithm = Algorithm::kPerturbedGD;
  double eta_x = 1e-2;
  double eta_y = 1e-2;
  std::uint64_t horizon = 50000;
  std::uint64_t seed = 1;
  Init init = GaussianInit{};
  NoiseConfig noise;
  std::uint64_t record_stride = 50;

  // Throws InvalidArgument naming the offending field.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct IterateDiagnostics {
  std::uint64_t t = 0;
  double loss = 0.0;
  double smoothed_loss = 0.0;
  // Rank-1 only: x = alpha1 u* + beta1, y = alpha2 v* + beta2, beta_i orthogonal.
  std::optional<double> alpha1;
  std::optional<double> alpha2;
  std::optional<double> beta1_norm;
  std::optional<double> beta2_norm;
  // x^T M y for rank 1, <X Y^T, M> / ||M||^2 for rank r.
  double overlap = 0.0;
  double ratio_sq = 0.0;       // ||X||^2 / ||Y||^2
  double gram_residual = 0.0;  // ||X^T X - gamma^2 Y^T Y||
  // Unset when the reference optimum does not exist for the noise level.
  std::optional<double> dist_to_opt;
  double norm_sq_sum = 0.0;

  friend bool operator==(const IterateDiagnostics&, const IterateDiagnostics&) = default;
};

struct Trajectory {
  RunConfig config;
  std::vector<IterateDiagnostics> records;
  FactorPair final_state;
  std::chrono::duration<double> wall_time{0};
};

// x+ = x - eta_x grad_x F,  y+ = y - eta_y grad_y F.
FactorPair gd_step(const FactorPair& p, const GroundTruth& gt, double eta_x, double eta_y);

// One perturbed update with explicit perturbations: the gradient is taken at
// (x + xi1, y + xi2) and applied to the unperturbed (x, y).
FactorPair perturbed_step(const FactorPair& p, const GroundTruth& gt, const Mat& xi1,
                          const Mat& xi2, double eta_x, double eta_y);

// Draws xi1 (row-major) then xi2 from rng and calls perturbed_step.
FactorPair pgd_step(const FactorPair& p, const GroundTruth& gt, const NoiseConfig& n,
                    double eta_x, double eta_y, Rng& rng);

// Precomputes the reference optimum so per-record diagnostics stay cheap.
class DiagnosticsContext {
 public:
  DiagnosticsContext(const GroundTruth& gt, const NoiseConfig& n);

  IterateDiagnostics operator()(const FactorPair& p, std::uint64_t t = 0) const;

  const std::optional<FactorPair>& reference_optimum() const { return reference_; }
  double gamma() const { return gamma_; }

 private:
  const GroundTruth* gt_;
  NoiseConfig noise_;
  double gamma_ = 1.0;
  std::optional<FactorPair> reference_;
  double target_norm_sq_ = 1.0;
};

IterateDiagnostics diagnostics(const FactorPair& p, const GroundTruth& gt, const NoiseConfig& n,
                               std::uint64_t t = 0);

// Runs cfg.horizon steps. Records t = 0, every record_stride steps, and
// t = horizon. Throws NumericalFailure with the failing iteration on NaN/Inf.
Trajectory run(const RunConfig& cfg, const GroundTruth& gt);

// s_0 = x_0, s_t = decay s_{t-1} + (1 - decay) x_t.
std::vector<double> ema(std::span<const double> series, double decay);

}  // namespace mfnoise

#endif  // MFNOISE_OPTIMIZE_HPP_
