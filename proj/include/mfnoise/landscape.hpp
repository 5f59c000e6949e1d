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

// Closed-form landscape objects: Hessian conditioning along the curve of
// optima, the optima of the smoothed problem, balancedness and the
// rotation-invariant distance used to compare rank-r factors.

#ifndef MFNOISE_LANDSCAPE_HPP_
#define MFNOISE_LANDSCAPE_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mfnoise/core.hpp"
#include "mfnoise/objective.hpp"

namespace mfnoise {

// max{a^4, a^-4} + 1, the condition number at (a u*, v*/a) once the zero
// mode along the curve of optima is excluded.
double condition_number_formula(double alpha);

struct HessianReport {
  std::vector<double> eigenvalues;  // ascending
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double zero_tol = 0.0;
  // lambda_max / smallest eigenvalue above zero_tol * max|lambda|.
  double effective_condition_number = 0.0;
  std::size_t num_zero_modes = 0;
  std::size_t num_negative = 0;
};

HessianReport hessian_spectrum(const FactorPair& p, const GroundTruth& gt,
                               const std::optional<NoiseConfig>& n, double zero_tol = 1e-8);

struct SmoothedOptimaRank1 {
  double alpha1 = 0.0;  // coefficient on u*
  double alpha2 = 0.0;  // coefficient on v*
  std::array<FactorPair, 2> points;  // +(a1 u*, a2 v*), -(a1 u*, a2 v*)
};

// Optima of the smoothed rank-1 problem (unit target),
//   +-sqrt(gamma - s^2) (u*, v*/gamma),  s^2 = d1 s1^2,  gamma^2 = d1 s1^2 / (d2 s2^2).
// Requires s1, s2 > 0 and s^2 < min{gamma, 1}; throws DegenerateNoise otherwise.
SmoothedOptimaRank1 smoothed_optima_rank1(const NoiseConfig& n, const GroundTruth& gt);

// Balanced optimum of the smoothed rank-r problem,
//   U = sqrt(g) A (Sigma - c I)^(1/2),  V = B (Sigma - c I)^(1/2) / sqrt(g),
// with g = gamma and c = sqrt(d1 s1^2 d2 s2^2). Without noise this is
// (A Sigma^(1/2), B Sigma^(1/2)). Throws DegenerateNoise if c >= sigma_min(M)
// or exactly one of s1, s2 vanishes.
FactorPair rankr_balanced_optimum(const GroundTruth& gt, const NoiseConfig& n);

// gamma for the Gram condition X^T X = gamma^2 Y^T Y implied by the noise;
// 1 without noise. Throws DegenerateNoise when only one side is perturbed.
double noise_gamma(const NoiseConfig& n, std::size_t d1, std::size_t d2);

struct Procrustes {
  double dist = 0.0;
  Mat rotation;  // r x r orthogonal
};

// min over orthogonal R of ||d1 - d2 R||_F, solved via the SVD of d2^T d1.
Procrustes procrustes_distance(const Mat& d1, const Mat& d2);

// Stacks [X; Y] into a (d1 + d2) x r matrix.
Mat stack(const FactorPair& p);

struct Balancedness {
  double gamma_hat = 0.0;      // ||X||_F / ||Y||_F
  double gram_residual = 0.0;  // ||X^T X - gamma^2 Y^T Y||_F
};

double gram_residual(const FactorPair& p, double gamma);
// Throws UndefinedRatio if Y = 0.
Balancedness balancedness(const FactorPair& p, double gamma = 1.0);

enum class StationaryTag {
  kGlobalOptimumFamily,
  kSaddleFamily,
  kSmoothedOptimum,
  kSmoothedSaddleOrigin,
  kNotStationary,
  kUnclassified,  // stationary within tol but no family matched
};

std::string_view to_string(StationaryTag tag);

struct StationaryClass {
  StationaryTag tag = StationaryTag::kNotStationary;
  std::vector<std::pair<std::string, double>> residuals;

  std::optional<double> residual(std::string_view name) const;
};

StationaryClass classify_stationary(const FactorPair& p, const GroundTruth& gt,
                                    const std::optional<NoiseConfig>& n, double tol = 1e-6);

}  // namespace mfnoise

#endif  // MFNOISE_LANDSCAPE_HPP_
