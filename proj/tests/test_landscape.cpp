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
#include <limits>
#include <numbers>

#include "mfnoise/errors.hpp"
#include "mfnoise/landscape.hpp"
#include "test_util.hpp"

namespace mfnoise {
namespace {

using testing::random_mat;
using testing::random_orthogonal;
using testing::random_pair;

FactorPair rank1_point(const GroundTruth& gt, double a1, double a2) {
  return FactorPair{scaled(Mat::column(gt.u_star()), a1), scaled(Mat::column(gt.v_star()), a2)};
}

double grad_norm(const Gradient& g) {
  return std::sqrt(frobenius_norm_sq(g.gx) + frobenius_norm_sq(g.gy));
}

// Noise with d1 s1^2 = sigma_sq and gamma^2 = d1 s1^2 / (d2 s2^2).
NoiseConfig lemma_noise(double gamma, double sigma_sq, std::size_t d1, std::size_t d2) {
  const double s2_total = sigma_sq / (gamma * gamma);
  return NoiseConfig{std::sqrt(sigma_sq / static_cast<double>(d1)),
                     std::sqrt(s2_total / static_cast<double>(d2))};
}

TEST_CASE("condition_number_formula") {
  CHECK(condition_number_formula(1.0) == 2.0);
  CHECK(condition_number_formula(2.0) == 17.0);
  CHECK(condition_number_formula(0.5) == 17.0);
  CHECK(condition_number_formula(-2.0) == 17.0);
  CHECK_THROWS_AS(condition_number_formula(0.0), InvalidArgument);
}

TEST_CASE("hessian_spectrum: effective condition number at scaled optima") {
  const auto gt = GroundTruth::rank1(20, 30);
  for (double a : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const auto r = hessian_spectrum(rank1_point(gt, a, 1.0 / a), gt, std::nullopt);
    CHECK(testing::rel_err(r.effective_condition_number, condition_number_formula(a)) <= 1e-8);
    CHECK(r.num_zero_modes == 1);
    CHECK(r.num_negative == 0);
    std::size_t positive = 0;
    for (double v : r.eigenvalues) positive += v > r.zero_tol * r.lambda_max;
    CHECK(r.num_zero_modes + r.num_negative + positive == 50);
  }
}

TEST_CASE("hessian_spectrum: small example") {
  const auto gt = GroundTruth::rank1(4, 5);
  const auto r = hessian_spectrum(rank1_point(gt, 2.0, 0.5), gt, std::nullopt);
  CHECK(r.effective_condition_number == doctest::Approx(17.0).epsilon(1e-8));
  CHECK(r.num_zero_modes == 1);
  const auto unit = hessian_spectrum(rank1_point(gt, 1.0, 1.0), gt, std::nullopt);
  CHECK(unit.effective_condition_number == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(unit.num_negative == 0);
}

TEST_CASE("hessian_spectrum: origin is a strict saddle under balanced noise") {
  const auto gt = GroundTruth::rank1(20, 30);
  for (double sigma_sq : {0.01, 0.3, 0.9}) {
    const auto n = lemma_noise(1.0, sigma_sq, 20, 30);
    const auto r = hessian_spectrum(FactorPair{Mat(20, 1), Mat(30, 1)}, gt, n);
    CHECK(r.lambda_min < 0.0);
    CHECK(r.lambda_min == doctest::Approx(sigma_sq - 1.0).epsilon(1e-10));
  }
}

TEST_CASE("hessian_spectrum: rejects rank above one") {
  const auto gt = GroundTruth::leading_identity(4, 5, {1.0, 1.0});
  CHECK_THROWS_AS(hessian_spectrum(FactorPair{Mat(4, 2), Mat(5, 2)}, gt, std::nullopt),
                  UnsupportedRank);
}

TEST_CASE("smoothed_optima_rank1: scalar example") {
  const auto gt = GroundTruth::rank1(1, 1);
  const double s = std::sqrt(0.0975);
  const auto opt = smoothed_optima_rank1(NoiseConfig{s, s}, gt);
  CHECK(opt.alpha1 == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(opt.alpha2 == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(opt.points[0].x(0, 0) == -opt.points[1].x(0, 0));
}

TEST_CASE("smoothed_optima_rank1: stationary and fixed under a smoothed step") {
  const auto gt = GroundTruth::rank1(20, 30);
  for (auto [gamma, sigma_sq] : {std::pair{1.0, 0.0975}, std::pair{std::sqrt(0.5), 0.01}}) {
    const auto n = lemma_noise(gamma, sigma_sq, 20, 30);
    const auto opt = smoothed_optima_rank1(n, gt);
    CHECK(opt.alpha1 == doctest::Approx(std::sqrt(gamma - sigma_sq)).epsilon(1e-12));
    CHECK(opt.alpha2 == doctest::Approx(std::sqrt(gamma - sigma_sq) / gamma).epsilon(1e-12));
    for (const auto& p : opt.points) {
      const auto g = smoothed_grad(p, gt, n);
      CHECK(grad_norm(g) <= 1e-10);
      for (double eta : {1e-3, 0.1, 1.0}) {
        Mat x = p.x, y = p.y;
        scale_add(x, -eta, g.gx);
        scale_add(y, -eta, g.gy);
        CHECK(testing::max_abs_diff(x, p.x) <= 1e-12);
        CHECK(testing::max_abs_diff(y, p.y) <= 1e-12);
      }
    }
  }
}

TEST_CASE("smoothed_optima_rank1: vanishing noise limit") {
  const auto gt = GroundTruth::rank1(3, 3);
  const auto opt = smoothed_optima_rank1(NoiseConfig{1e-9, 1e-9}, gt);
  CHECK(opt.alpha1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(opt.alpha2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("smoothed_optima_rank1: degenerate noise") {
  const auto gt = GroundTruth::rank1(20, 30);
  CHECK_THROWS_AS(smoothed_optima_rank1(lemma_noise(1.0, 1.0, 20, 30), gt), DegenerateNoise);
  // Boundary sigma^2 = gamma < 1.
  const double g = std::sqrt(0.5);
  CHECK_THROWS_AS(smoothed_optima_rank1(lemma_noise(g, g, 20, 30), gt), DegenerateNoise);
  CHECK_THROWS_AS(smoothed_optima_rank1(NoiseConfig{0.1, 0.0}, gt), DegenerateNoise);
  CHECK_THROWS_AS(smoothed_optima_rank1(NoiseConfig{}, gt), DegenerateNoise);
}

TEST_CASE("rankr_balanced_optimum: no-noise limit") {
  const auto gt = GroundTruth::leading_identity(5, 6, {4.0, 1.0});
  const auto p = rankr_balanced_optimum(gt, NoiseConfig{});
  CHECK(p.x(0, 0) == doctest::Approx(2.0));
  CHECK(p.x(1, 1) == doctest::Approx(1.0));
  CHECK(p.y(0, 0) == doctest::Approx(2.0));
  CHECK(loss(p, gt) <= 1e-24);
}

TEST_CASE("rankr_balanced_optimum: stationarity and Gram balance") {
  Rng rng(71);
  const auto gt = GroundTruth::random(7, 9, {2.0, 0.8}, rng);
  for (double gamma : {1.0, std::sqrt(0.5)}) {
    const auto n = lemma_noise(gamma, 0.02, 7, 9);
    const auto p = rankr_balanced_optimum(gt, n);
    CHECK(grad_norm(smoothed_grad(p, gt, n)) <= 1e-10);
    CHECK(gram_residual(p, noise_gamma(n, 7, 9)) <= 1e-10);
    CHECK(balancedness(p, noise_gamma(n, 7, 9)).gram_residual <= 1e-10);
  }
}

TEST_CASE("rankr_balanced_optimum: hypothesis violated") {
  const auto gt = GroundTruth::leading_identity(5, 6, {1.0, 0.1});
  CHECK_THROWS_AS(rankr_balanced_optimum(gt, lemma_noise(1.0, 0.5, 5, 6)), DegenerateNoise);
}

TEST_CASE("noise_gamma") {
  CHECK(noise_gamma(NoiseConfig{}, 3, 4) == 1.0);
  CHECK(noise_gamma(lemma_noise(0.5, 0.1, 3, 4), 3, 4) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(noise_gamma(NoiseConfig{0.0, 0.2}, 3, 4), DegenerateNoise);
}

TEST_CASE("procrustes: exact alignment") {
  Rng rng(73);
  for (int i = 0; i < 20; ++i) {
    const Mat d = random_mat(12, 3, rng);
    const Mat r0 = random_orthogonal(3, rng);
    const auto pr = procrustes_distance(d, matmul(d, r0));
    CHECK(pr.dist <= 1e-9);
    CHECK(frobenius_norm(matmul_tn(pr.rotation, pr.rotation) - Mat::identity(3)) <= 1e-9);
  }
}

TEST_CASE("procrustes: sign flip in one dimension") {
  const Mat d{{1.0}, {-2.0}, {0.5}};
  CHECK(procrustes_distance(d, scaled(d, -1.0)).dist <= 1e-12);
}

TEST_CASE("procrustes: right-rotation invariance") {
  Rng rng(79);
  for (int i = 0; i < 10; ++i) {
    const Mat a = random_mat(8, 3, rng);
    const Mat b = random_mat(8, 3, rng);
    const Mat r0 = random_orthogonal(3, rng);
    const double base = procrustes_distance(a, b).dist;
    CHECK(std::abs(procrustes_distance(matmul(a, r0), matmul(b, r0)).dist - base) <= 1e-9);
  }
}

TEST_CASE("procrustes: brute-force grid oracle in two dimensions") {
  Rng rng(83);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat a = random_mat(6, 2, rng);
    const Mat b = random_mat(6, 2, rng);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 1800; ++k) {
      const double th = 2.0 * std::numbers::pi * k / 1800.0;
      const double c = std::cos(th), s = std::sin(th);
      for (double refl : {1.0, -1.0}) {
        const Mat r{{c, -s * refl}, {s, c * refl}};
        best = std::min(best, frobenius_norm(a - matmul(b, r)));
      }
    }
    const double d = procrustes_distance(a, b).dist;
    CHECK(d <= best + 1e-12);
    CHECK(std::abs(d - best) <= 1e-3);
  }
}

TEST_CASE("procrustes: shape mismatch") {
  CHECK_THROWS_AS(procrustes_distance(Mat(3, 2), Mat(3, 1)), InvalidArgument);
}

TEST_CASE("balancedness") {
  const auto gt = GroundTruth::rank1(4, 5);
  CHECK(balancedness(rank1_point(gt, 2.0, 0.5)).gamma_hat == 4.0);
  const auto unit = balancedness(rank1_point(gt, 1.0, 1.0));
  CHECK(unit.gamma_hat == 1.0);
  CHECK(unit.gram_residual == 0.0);
  CHECK_THROWS_AS(balancedness(FactorPair{Mat(4, 1, 1.0), Mat(5, 1)}), UndefinedRatio);
}

TEST_CASE("classify_stationary: unsmoothed families") {
  const auto gt = GroundTruth::rank1(4, 5);
  CHECK(classify_stationary(rank1_point(gt, 3.0, 1.0 / 3.0), gt, std::nullopt).tag ==
        StationaryTag::kGlobalOptimumFamily);
  Mat w(5, 1);
  w(2, 0) = 1.7;
  CHECK(classify_stationary(FactorPair{Mat(4, 1), w}, gt, std::nullopt).tag ==
        StationaryTag::kSaddleFamily);
  // The origin is in both closures; ties go to the saddle family.
  CHECK(classify_stationary(FactorPair{Mat(4, 1), Mat(5, 1)}, gt, std::nullopt).tag ==
        StationaryTag::kSaddleFamily);
  CHECK(classify_stationary(rank1_point(gt, 0.5, 0.5), gt, std::nullopt).tag ==
        StationaryTag::kNotStationary);
}

TEST_CASE("classify_stationary: smoothed families") {
  const auto gt = GroundTruth::rank1(20, 30);
  const auto n = lemma_noise(1.0, 0.075, 20, 30);
  CHECK(classify_stationary(FactorPair{Mat(20, 1), Mat(30, 1)}, gt, n).tag ==
        StationaryTag::kSmoothedSaddleOrigin);
  const auto opt = smoothed_optima_rank1(n, gt);
  const auto cls = classify_stationary(opt.points[1], gt, n);
  CHECK(cls.tag == StationaryTag::kSmoothedOptimum);
  CHECK(cls.residual("grad_norm").has_value());
  CHECK(classify_stationary(rank1_point(gt, 1.0, 1.0), gt, n).tag ==
        StationaryTag::kNotStationary);
}

TEST_CASE("classify_stationary: tag is NotStationary iff gradient exceeds tolerance") {
  Rng rng(89);
  const auto gt = GroundTruth::rank1(4, 5);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_pair(4, 5, 1, rng, 0.5);
    const double gn = grad_norm(grad(p, gt));
    const double norm = std::sqrt(p.norm_sq());
    const auto tag = classify_stationary(p, gt, std::nullopt).tag;
    CHECK((tag == StationaryTag::kNotStationary) == (gn > 1e-6 * (1.0 + norm)));
  }
}

TEST_CASE("classify_stationary: rank-r global optimum") {
  const auto gt = GroundTruth::leading_identity(5, 6, {2.0, 1.0});
  const auto p = rankr_balanced_optimum(gt, NoiseConfig{});
  CHECK(classify_stationary(p, gt, std::nullopt).tag == StationaryTag::kGlobalOptimumFamily);
}

}  // namespace
}  // namespace mfnoise
