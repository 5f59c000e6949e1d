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

// Numerical oracles that do not share code paths with the analytic
// formulas: central finite differences and Monte-Carlo estimation of the
// smoothed objective. `run_verification_suite` bundles them into a list of
// pass/fail reports.

#ifndef MFNOISE_VERIFY_HPP_
#define MFNOISE_VERIFY_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mfnoise/core.hpp"
#include "mfnoise/objective.hpp"

namespace mfnoise {

// Mixed into every oracle seed so oracle draws never coincide with an
// optimization run's stream.
inline constexpr std::uint64_t kOracleSeedDomain = 0x6f7261636c652d31ULL;  // "oracle-1"

using PairFunction = std::function<double(const FactorPair&)>;

// Central differences (f(p + h e_i) - f(p - h e_i)) / 2h per coordinate.
Gradient finite_diff_grad(const PairFunction& f, const FactorPair& p, double h);

// (f(p + h z) - 2 f(p) + f(p - h z)) / h^2, the curvature of f along z.
double finite_diff_curvature(const PairFunction& f, const FactorPair& p, const Mat& zx,
                             const Mat& zy, double h);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Sample mean of F(X + xi1, Y + xi2). Requires samples >= 2.
MonteCarloEstimate monte_carlo_smoothed_loss(const FactorPair& p, const GroundTruth& gt,
                                             const NoiseConfig& n, std::size_t samples,
                                             std::uint64_t seed);

enum class ToleranceKind { kAbsolute, kRelative };

struct CheckReport {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  ToleranceKind kind = ToleranceKind::kAbsolute;
  bool passed = false;
  std::string detail;
};

// Builds a report whose `passed` flag follows from the other fields.
CheckReport make_check(std::string name, double observed, double expected, double tolerance,
                       ToleranceKind kind, std::string detail = {});

// Fault-injection switches used to prove the suite can fail.
struct VerifyHooks {
  bool flip_smoothing_sign = false;
};

// Number of reports run_verification_suite returns.
std::size_t registered_check_count();

// Deterministic given seed; failures are reported, never thrown.
std::vector<CheckReport> run_verification_suite(std::uint64_t seed, const VerifyHooks& hooks = {});

}  // namespace mfnoise

#endif  // MFNOISE_VERIFY_HPP_
