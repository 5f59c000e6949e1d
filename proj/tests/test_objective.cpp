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

#include "mfnoise/errors.hpp"
#include "mfnoise/objective.hpp"
#include "mfnoise/verify.hpp"
#include "test_util.hpp"

namespace mfnoise {
namespace {

using testing::max_abs_diff;
using testing::random_mat;
using testing::random_orthogonal;
using testing::random_pair;

FactorPair scalar_pair(double x, double y) { return FactorPair{Mat{{x}}, Mat{{y}}}; }

FactorPair rank1_scaled(const GroundTruth& gt, double a) {
  return FactorPair{scaled(Mat::column(gt.u_star()), a), scaled(Mat::column(gt.v_star()), 1.0 / a)};
}

double grad_norm(const Gradient& g) {
  return std::sqrt(frobenius_norm_sq(g.gx) + frobenius_norm_sq(g.gy));
}

double fd_rel_error(const Gradient& analytic, const Gradient& fd) {
  const double diff = std::sqrt(frobenius_norm_sq(analytic.gx - fd.gx) +
                                frobenius_norm_sq(analytic.gy - fd.gy));
  return diff / std::max(grad_norm(analytic), 1e-12);
}

TEST_CASE("ground truth: validation") {
  CHECK_THROWS_AS(GroundTruth(Mat{{1.0}, {1.0}}, {1.0}, Mat{{1.0}}), InvalidArgument);
  CHECK_THROWS_AS(GroundTruth(Mat{{1.0}}, {-1.0}, Mat{{1.0}}), InvalidArgument);
  CHECK_THROWS_AS(GroundTruth::leading_identity(4, 4, {1.0, 2.0}), InvalidArgument);
  CHECK_NOTHROW(GroundTruth::leading_identity(4, 4, {2.0, 2.0}));
  Rng rng(3);
  const auto gt = GroundTruth::random(8, 10, {3.0, 2.0, 1.0}, rng);
  CHECK(frobenius_norm(matmul_tn(gt.a(), gt.a()) - Mat::identity(3)) <= 1e-10);
  CHECK(frobenius_norm(matmul_tn(gt.b(), gt.b()) - Mat::identity(3)) <= 1e-10);
}

TEST_CASE("loss: examples") {
  const auto gt = GroundTruth::rank1(20, 30);
  CHECK(loss(rank1_scaled(gt, 1.0), gt) == 0.0);
  CHECK(loss(FactorPair{Mat(20, 1), Mat(30, 1)}, gt) == 0.5);
  const auto scalar = GroundTruth::rank1(1, 1);
  CHECK(loss(scalar_pair(3.0, 5.0), scalar) == 98.0);
}

TEST_CASE("loss: dimension mismatch") {
  const auto gt = GroundTruth::rank1(4, 5);
  CHECK_THROWS_AS(loss(FactorPair{Mat(3, 1), Mat(5, 1)}, gt), InvalidArgument);
  CHECK_THROWS_AS(loss(FactorPair{Mat(4, 1), Mat(5, 2)}, gt), InvalidArgument);
}

TEST_CASE("loss: scaling invariance") {
  const auto gt = GroundTruth::rank1(6, 7);
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const auto p = random_pair(6, 7, 1, rng);
    const double base = loss(p, gt);
    for (double a : {0.5, -0.5, 2.0, -2.0}) {
      const FactorPair q{scaled(p.x, a), scaled(p.y, 1.0 / a)};
      REQUIRE(std::abs(loss(q, gt) - base) <= 1e-10 * (1.0 + base));
    }
  }
}

TEST_CASE("grad: zero at optimum family and at origin") {
  const auto gt = GroundTruth::rank1(5, 6);
  for (double a : {0.3, 1.0, 2.5}) CHECK(grad_norm(grad(rank1_scaled(gt, a), gt)) <= 1e-14);
  CHECK(grad_norm(grad(FactorPair{Mat(5, 1), Mat(6, 1)}, gt)) == 0.0);
}

TEST_CASE("grad and smoothed_grad: finite-difference oracle") {
  Rng rng(23);
  Rng gt_rng(29);
  const auto gt = GroundTruth::random(6, 5, {2.0, 1.0}, gt_rng);
  const NoiseConfig n{0.1, 0.2};
  for (int i = 0; i < 50; ++i) {
    const auto p = random_pair(6, 5, 2, rng);
    const auto fd = finite_diff_grad([&](const FactorPair& q) { return loss(q, gt); }, p, 1e-5);
    REQUIRE(fd_rel_error(grad(p, gt), fd) <= 1e-5);
    const auto sfd =
        finite_diff_grad([&](const FactorPair& q) { return smoothed_loss(q, gt, n); }, p, 1e-5);
    REQUIRE(fd_rel_error(smoothed_grad(p, gt, n), sfd) <= 1e-5);
  }
}

TEST_CASE("smoothed_loss: no noise equals loss exactly") {
  Rng rng(31);
  const auto gt = GroundTruth::rank1(4, 3);
  const auto p = random_pair(4, 3, 1, rng);
  CHECK(smoothed_loss(p, gt, NoiseConfig{}) == loss(p, gt));
  const auto g = grad(p, gt);
  const auto sg = smoothed_grad(p, gt, NoiseConfig{});
  CHECK(g.gx == sg.gx);
  CHECK(g.gy == sg.gy);
}

TEST_CASE("smoothed_loss: origin value") {
  const auto gt = GroundTruth::rank1(20, 30);
  const NoiseConfig n{0.06, 0.04};
  const double s1 = 20 * 0.06 * 0.06;
  const double s2 = 30 * 0.04 * 0.04;
  CHECK(smoothed_loss(FactorPair{Mat(20, 1), Mat(30, 1)}, gt, n) ==
        doctest::Approx(0.5 * (1.0 + s1 * s2)).epsilon(1e-14));
}

TEST_CASE("smoothed_loss: residual identity") {
  Rng rng(37);
  Rng gt_rng(41);
  const auto gt = GroundTruth::random(7, 9, {1.5, 0.7, 0.2}, gt_rng);
  const NoiseConfig n{0.3, 0.15};
  const double s1 = 7 * 0.3 * 0.3;
  const double s2 = 9 * 0.15 * 0.15;
  for (int i = 0; i < 20; ++i) {
    const auto p = random_pair(7, 9, 3, rng);
    const double expected = 0.5 * (s2 * frobenius_norm_sq(p.x) + s1 * frobenius_norm_sq(p.y) +
                                   3.0 * s1 * s2);
    const double got = smoothed_loss(p, gt, n) - loss(p, gt);
    REQUIRE(std::abs(got - expected) <= 1e-12 * (1.0 + expected));
  }
}

TEST_CASE("smoothed_loss: rotation invariance") {
  Rng rng(43);
  Rng gt_rng(47);
  const auto gt = GroundTruth::random(6, 8, {2.0, 1.0, 0.5}, gt_rng);
  const NoiseConfig n{0.2, 0.1};
  for (int i = 0; i < 20; ++i) {
    const auto p = random_pair(6, 8, 3, rng);
    const Mat r = random_orthogonal(3, rng);
    const double base = smoothed_loss(p, gt, n);
    const double rotated = smoothed_loss(FactorPair{matmul(p.x, r), matmul(p.y, r)}, gt, n);
    REQUIRE(std::abs(rotated - base) <= 1e-10 * (1.0 + base));
  }
}

TEST_CASE("smoothed_loss: scalar problem against Monte-Carlo") {
  const auto gt = GroundTruth::rank1(1, 1);
  const double s = std::sqrt(0.0975);
  const NoiseConfig n{s, s};
  const auto p = scalar_pair(0.95, 0.95);
  const auto mc = monte_carlo_smoothed_loss(p, gt, n, 200000, 5);
  CHECK(std::abs(smoothed_loss(p, gt, n) - mc.mean) <= 4.0 * mc.std_error);
}

TEST_CASE("hessian_rank1: spectrum at a scaled optimum") {
  const auto gt = GroundTruth::rank1(4, 5);
  const Mat h = hessian_rank1(rank1_scaled(gt, 2.0), gt);
  const auto e = sym_eigen(h).values;
  const std::vector<double> expected{0.0, 0.25, 0.25, 0.25, 4.0, 4.0, 4.0, 4.0, 4.25};
  REQUIRE(e.size() == expected.size());
  for (std::size_t i = 0; i < e.size(); ++i) CHECK(std::abs(e[i] - expected[i]) <= 1e-12);
}

TEST_CASE("hessian_rank1: noise adds an exact diagonal shift") {
  Rng rng(53);
  const auto gt = GroundTruth::rank1(4, 5);
  const auto p = random_pair(4, 5, 1, rng);
  const NoiseConfig n{0.3, 0.2};
  const Mat plain = hessian_rank1(p, gt);
  const Mat noisy = hessian_rank1(p, gt, n);
  const auto shift = smoothing_shift(n, 4, 5);
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t j = 0; j < 9; ++j) {
      const double d = i == j ? (i < 4 ? shift.x : shift.y) : 0.0;
      REQUIRE(noisy(i, j) == plain(i, j) + d);
    }
  }
}

TEST_CASE("hessian_rank1: rejects rank above one") {
  const auto gt = GroundTruth::leading_identity(4, 5, {1.0, 1.0});
  CHECK_THROWS_AS(hessian_rank1(FactorPair{Mat(4, 2), Mat(5, 2)}, gt), UnsupportedRank);
}

TEST_CASE("hessian_quadratic_form: agrees with the explicit matrix") {
  Rng rng(59);
  const auto gt = GroundTruth::rank1(4, 5);
  const NoiseConfig n{0.2, 0.1};
  for (int i = 0; i < 20; ++i) {
    const auto p = random_pair(4, 5, 1, rng);
    const Mat du = random_mat(4, 1, rng);
    const Mat dv = random_mat(5, 1, rng);
    Mat z(9, 1);
    for (std::size_t k = 0; k < 4; ++k) z(k, 0) = du(k, 0);
    for (std::size_t k = 0; k < 5; ++k) z(4 + k, 0) = dv(k, 0);
    const double via_matrix = matmul_tn(z, matmul(hessian_rank1(p, gt, n), z))(0, 0);
    REQUIRE(std::abs(hessian_quadratic_form(p, gt, n, du, dv) - via_matrix) <= 1e-10);
  }
}

TEST_CASE("hessian_quadratic_form: zero direction and strict saddle certificate") {
  const auto gt = GroundTruth::leading_identity(6, 8, {1.5, 1.0});
  const FactorPair origin{Mat(6, 2), Mat(8, 2)};
  CHECK(hessian_quadratic_form(origin, gt, std::nullopt, Mat(6, 2), Mat(8, 2)) == 0.0);

  const double sigma_sq = 0.3;
  const NoiseConfig n{std::sqrt(sigma_sq / 6), std::sqrt(sigma_sq / 8)};
  Mat du(6, 2), dv(8, 2);
  du(0, 0) = 1.0;
  dv(0, 0) = 1.0;
  const double q = hessian_quadratic_form(origin, gt, n, du, dv);
  CHECK(q == doctest::Approx(2 * sigma_sq - 2 * 1.5).epsilon(1e-12));
  CHECK(q < 0.0);
}

TEST_CASE("hessian_quadratic_form: finite-difference curvature") {
  Rng rng(61);
  Rng gt_rng(67);
  const auto gt = GroundTruth::random(5, 6, {1.0, 0.5}, gt_rng);
  const NoiseConfig n{0.1, 0.1};
  for (int i = 0; i < 10; ++i) {
    const auto p = random_pair(5, 6, 2, rng);
    const Mat du = random_mat(5, 2, rng);
    const Mat dv = random_mat(6, 2, rng);
    const double fd = finite_diff_curvature(
        [&](const FactorPair& q) { return smoothed_loss(q, gt, n); }, p, du, dv, 1e-4);
    const double exact = hessian_quadratic_form(p, gt, n, du, dv);
    REQUIRE(std::abs(fd - exact) <= 1e-5 * (1.0 + std::abs(exact)));
  }
}

TEST_CASE("noise config derived quantities") {
  const NoiseConfig n{std::sqrt(1.5) * 0.05, 0.05};
  CHECK(*n.gamma_sq(20, 30) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_FALSE(NoiseConfig{0.1, 0.0}.gamma_sq(2, 3).has_value());
  CHECK(n.total_variance(20) == doctest::Approx(0.075).epsilon(1e-14));
  CHECK_FALSE(NoiseConfig{}.active());
}

}  // namespace
}  // namespace mfnoise
