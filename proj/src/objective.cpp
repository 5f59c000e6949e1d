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

#include "mfnoise/objective.hpp"

#include <cmath>
#include <string>

#include "mfnoise/errors.hpp"

namespace mfnoise {

namespace {

void check_orthonormal(const Mat& q, const char* name) {
  const Mat gram = matmul_tn(q, q);
  if (frobenius_norm(gram - Mat::identity(q.cols())) > 1e-10) {
    throw InvalidArgument(std::string("GroundTruth: ") + name + " columns not orthonormal");
  }
}

// Modified Gram-Schmidt on the columns of g (rows >= cols).
Mat orthonormalize(Mat g) {
  for (std::size_t j = 0; j < g.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double proj = 0.0;
        for (std::size_t i = 0; i < g.rows(); ++i) proj += g(i, k) * g(i, j);
        for (std::size_t i = 0; i < g.rows(); ++i) g(i, j) -= proj * g(i, k);
      }
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i) nrm += g(i, j) * g(i, j);
    nrm = std::sqrt(nrm);
    if (nrm < 1e-8) throw NumericalFailure("orthonormalize: rank-deficient draw");
    for (std::size_t i = 0; i < g.rows(); ++i) g(i, j) /= nrm;
  }
  return g;
}

}  // namespace

GroundTruth::GroundTruth(Mat a, std::vector<double> sigma, Mat b)
    : a_(std::move(a)), b_(std::move(b)), sigma_(std::move(sigma)) {
  const std::size_t r = sigma_.size();
  if (r == 0) throw InvalidArgument("GroundTruth: rank must be positive");
  if (a_.cols() != r || b_.cols() != r) {
    throw InvalidArgument("GroundTruth: A and B must have one column per singular value");
  }
  if (a_.rows() < r || b_.rows() < r) throw InvalidArgument("GroundTruth: rank exceeds dimension");
  for (std::size_t k = 0; k < r; ++k) {
    if (!(sigma_[k] > 0.0) || !std::isfinite(sigma_[k])) {
      throw InvalidArgument("GroundTruth: singular values must be positive and finite");
    }
    if (k > 0 && sigma_[k] > sigma_[k - 1]) {
      throw InvalidArgument("GroundTruth: singular values must be non-increasing");
    }
  }
  check_orthonormal(a_, "A");
  check_orthonormal(b_, "B");
  Mat as = a_;
  for (std::size_t i = 0; i < as.rows(); ++i)
    for (std::size_t k = 0; k < r; ++k) as(i, k) *= sigma_[k];
  m_ = matmul_nt(as, b_);
}

GroundTruth GroundTruth::rank1(std::size_t d1, std::size_t d2) {
  return leading_identity(d1, d2, {1.0});
}

GroundTruth GroundTruth::leading_identity(std::size_t d1, std::size_t d2,
                                          std::vector<double> sigma) {
  const std::size_t r = sigma.size();
  Mat a(d1, r);
  Mat b(d2, r);
  for (std::size_t k = 0; k < r && k < d1; ++k) a(k, k) = 1.0;
  for (std::size_t k = 0; k < r && k < d2; ++k) b(k, k) = 1.0;
  return GroundTruth(std::move(a), std::move(sigma), std::move(b));
}

GroundTruth GroundTruth::random(std::size_t d1, std::size_t d2, std::vector<double> sigma,
                                Rng& rng) {
  const std::size_t r = sigma.size();
  if (d1 < r || d2 < r) throw InvalidArgument("GroundTruth::random: rank exceeds dimension");
  Mat ga(d1, r);
  Mat gb(d2, r);
  rng.fill_gaussian(ga, 1.0);
  rng.fill_gaussian(gb, 1.0);
  return GroundTruth(orthonormalize(std::move(ga)), std::move(sigma), orthonormalize(std::move(gb)));
}

std::optional<double> NoiseConfig::gamma_sq(std::size_t d1, std::size_t d2) const {
  if (sigma2 <= 0.0) return std::nullopt;
  return (static_cast<double>(d1) * sigma1 * sigma1) / (static_cast<double>(d2) * sigma2 * sigma2);
}

SmoothingShift smoothing_shift(const NoiseConfig& n, std::size_t d1, std::size_t d2) {
  return SmoothingShift{static_cast<double>(d2) * n.sigma2 * n.sigma2,
                        static_cast<double>(d1) * n.sigma1 * n.sigma1};
}

void check_dims(const FactorPair& p, const GroundTruth& gt) {
  if (p.x.cols() != p.y.cols()) throw InvalidArgument("FactorPair: X and Y column counts differ");
  if (p.x.rows() != gt.d1() || p.y.rows() != gt.d2()) {
    throw InvalidArgument("FactorPair: expected " + std::to_string(gt.d1()) + " and " +
                          std::to_string(gt.d2()) + " rows, got " + std::to_string(p.x.rows()) +
                          " and " + std::to_string(p.y.rows()));
  }
  if (p.x.cols() == 0) throw InvalidArgument("FactorPair: rank must be positive");
}

Mat residual(const FactorPair& p, const GroundTruth& gt) {
  check_dims(p, gt);
  Mat r = matmul_nt(p.x, p.y);
  scale_add(r, -1.0, gt.target());
  return r;
}

double loss(const FactorPair& p, const GroundTruth& gt) {
  return 0.5 * frobenius_norm_sq(residual(p, gt));
}

Gradient grad(const FactorPair& p, const GroundTruth& gt) {
  const Mat r = residual(p, gt);
  return Gradient{matmul(r, p.y), matmul_tn(r, p.x)};
}

double smoothed_loss(const FactorPair& p, const GroundTruth& gt, const NoiseConfig& n) {
  const double base = loss(p, gt);
  if (!n.active()) return base;
  const auto shift = smoothing_shift(n, gt.d1(), gt.d2());
  const double r = static_cast<double>(p.rank());
  return base + 0.5 * (shift.x * frobenius_norm_sq(p.x) + shift.y * frobenius_norm_sq(p.y) +
                       r * shift.x * shift.y);
}

Gradient smoothed_grad(const FactorPair& p, const GroundTruth& gt, const NoiseConfig& n) {
  Gradient g = grad(p, gt);
  if (!n.active()) return g;
  const auto shift = smoothing_shift(n, gt.d1(), gt.d2());
  scale_add(g.gx, shift.x, p.x);
  scale_add(g.gy, shift.y, p.y);
  return g;
}

Mat hessian_rank1(const FactorPair& p, const GroundTruth& gt, const std::optional<NoiseConfig>& n) {
  check_dims(p, gt);
  if (p.rank() != 1) {
    throw UnsupportedRank("hessian_rank1: rank " + std::to_string(p.rank()) +
                          " > 1, use hessian_quadratic_form");
  }
  const std::size_t d1 = gt.d1();
  const std::size_t d2 = gt.d2();
  const Mat& m = gt.target();
  SmoothingShift shift;
  if (n) shift = smoothing_shift(*n, d1, d2);
  const double xx = frobenius_norm_sq(p.x);
  const double yy = frobenius_norm_sq(p.y);

  Mat h(d1 + d2, d1 + d2);
  for (std::size_t i = 0; i < d1; ++i) h(i, i) = yy + shift.x;
  for (std::size_t j = 0; j < d2; ++j) h(d1 + j, d1 + j) = xx + shift.y;
  for (std::size_t i = 0; i < d1; ++i) {
    for (std::size_t j = 0; j < d2; ++j) {
      const double v = 2.0 * p.x(i, 0) * p.y(j, 0) - m(i, j);
      h(i, d1 + j) = v;
      h(d1 + j, i) = v;
    }
  }
  return h;
}

double hessian_quadratic_form(const FactorPair& p, const GroundTruth& gt,
                              const std::optional<NoiseConfig>& n, const Mat& du, const Mat& dv) {
  check_dims(p, gt);
  if (du.rows() != p.x.rows() || du.cols() != p.x.cols() || dv.rows() != p.y.rows() ||
      dv.cols() != p.y.cols()) {
    throw InvalidArgument("hessian_quadratic_form: direction shape differs from (X, Y)");
  }
  const Mat r = residual(p, gt);
  double value = 2.0 * inner(r, matmul_nt(du, dv));
  Mat cross = matmul_nt(p.x, dv);
  scale_add(cross, 1.0, matmul_nt(du, p.y));
  value += frobenius_norm_sq(cross);
  if (n) {
    const auto shift = smoothing_shift(*n, gt.d1(), gt.d2());
    value += shift.x * frobenius_norm_sq(du) + shift.y * frobenius_norm_sq(dv);
  }
  return value;
}

}  // namespace mfnoise
