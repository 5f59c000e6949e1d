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


#include <doctest.h>

#include <cmath>

#include "mfnoise/landscape.hpp"
#include "mfnoise/verify.hpp"
#include "test_util.hpp"

namespace mfnoise {
namespace {

using testing::random_pair;

TEST_CASE("finite_diff_grad: zero at a global optimum") {
  const auto gt = GroundTruth::rank1(4, 5);
  const FactorPair opt{Mat::column(gt.u_star()), Mat::column(gt.v_star())};
  const double h = 1e-5;
  const auto g = finite_diff_grad([&](const FactorPair& q) { return loss(q, gt); }, opt, h);
  CHECK(std::sqrt(frobenius_norm_sq(g.gx) + frobenius_norm_sq(g.gy)) <= 10 * h * h);
}

TEST_CASE("finite_diff_grad: exact on a linear function") {
  const FactorPair p{Mat{{1.0}, {2.0}}, Mat{{3.0}}};
  const auto g = finite_diff_grad(
      [](const FactorPair& q) { return 2.0 * q.x(1, 0) - 0.5 * q.y(0, 0); }, p, 1e-3);
  CHECK(g.gx(0, 0) == 0.0);
  CHECK(g.gx(1, 0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(g.gy(0, 0) == doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("finite_diff_grad: error is second order in h") {
  Rng rng(3);
  const auto gt = GroundTruth::rank1(3, 4);
  const auto p = random_pair(3, 4, 1, rng);
  const auto exact = grad(p, gt);
  // Cubic in one coordinate, so the truncation error is visible above rounding.
  const auto f = [&](const FactorPair& q) { return loss(q, gt) + std::pow(q.x(0, 0), 3); };
  Mat gx = exact.gx;
  gx(0, 0) += 3.0 * p.x(0, 0) * p.x(0, 0);
  const auto err = [&](double h) {
    const auto g = finite_diff_grad(f, p, h);
    return std::sqrt(frobenius_norm_sq(g.gx - gx) + frobenius_norm_sq(g.gy - exact.gy));
  };
  const double ratio = err(1e-4) / err(5e-5);
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 5.0);
}

TEST_CASE("monte_carlo: degenerate noise") {
  Rng rng(5);
  const auto gt = GroundTruth::rank1(3, 4);
  const auto p = random_pair(3, 4, 1, rng);
  const auto mc = monte_carlo_smoothed_loss(p, gt, NoiseConfig{}, 100, 1);
  CHECK(mc.mean == loss(p, gt));
  CHECK(mc.std_error == 0.0);
}

TEST_CASE("monte_carlo: reproducible and consistent with the closed form") {
  Rng rng(7);
  const auto gt = GroundTruth::rank1(5, 6);
  const NoiseConfig n{0.2, 0.15};
  const auto p = random_pair(5, 6, 1, rng);
  const auto a = monte_carlo_smoothed_loss(p, gt, n, 200000, 11);
  const auto b = monte_carlo_smoothed_loss(p, gt, n, 200000, 11);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(std::abs(a.mean - smoothed_loss(p, gt, n)) <= 4.0 * a.std_error);
}

TEST_CASE("monte_carlo: standard error shrinks like one over root n") {
  Rng rng(13);
  const auto gt = GroundTruth::rank1(5, 6);
  const NoiseConfig n{0.2, 0.15};
  const auto p = random_pair(5, 6, 1, rng);
  const auto small = monte_carlo_smoothed_loss(p, gt, n, 50000, 2);
  const auto large = monte_carlo_smoothed_loss(p, gt, n, 100000, 3);
  const double ratio = large.std_error / small.std_error;
  CHECK(ratio >= 0.6);
  CHECK(ratio <= 0.8);
}

TEST_CASE("make_check tolerance semantics") {
  CHECK(make_check("a", 1.0, 1.05, 0.1, ToleranceKind::kAbsolute).passed);
  CHECK_FALSE(make_check("a", 1.0, 1.2, 0.1, ToleranceKind::kAbsolute).passed);
  CHECK(make_check("r", 100.0, 101.0, 0.02, ToleranceKind::kRelative).passed);
  CHECK_FALSE(make_check("r", 100.0, 103.0, 0.02, ToleranceKind::kRelative).passed);
  CHECK_FALSE(make_check("n", std::nan(""), 0.0, 1.0, ToleranceKind::kAbsolute).passed);
}

TEST_CASE("verification suite: default seed passes") {
  const auto reports = run_verification_suite(0);
  CHECK(reports.size() == registered_check_count());
  CHECK(registered_check_count() == 19);
  for (const auto& r : reports) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}

TEST_CASE("verification suite: deterministic given the seed") {
  const auto a = run_verification_suite(5);
  const auto b = run_verification_suite(5);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].observed == b[i].observed);
  }
}

TEST_CASE("verification suite: flipped smoothing sign is caught") {
  const auto reports = run_verification_suite(0, VerifyHooks{true});
  bool lemma_failed = false;
  for (const auto& r : reports) {
    if (r.name.starts_with("smoothed_optimum_stationary") && !r.passed) lemma_failed = true;
  }
  CHECK(lemma_failed);
}

}  // namespace
}  // namespace mfnoise
