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

// The factorization objective F(X, Y) = 1/2 ||X Y^T - M||_F^2 and its
// Gaussian-smoothed counterpart
//
//   Fs(X, Y) = E F(X + xi1, Y + xi2),  xi1 ~ N(0, s1^2), xi2 ~ N(0, s2^2) i.i.d.
//
// which has the closed form
//
//   Fs = F + 1/2 (d2 s2^2 ||X||^2 + d1 s1^2 ||Y||^2 + r d1 s1^2 d2 s2^2).
//
// The smoothing therefore acts as a ridge penalty with weight d2 s2^2 on X and
// d1 s1^2 on Y; every smoothed quantity below is the plain one plus that shift.

#ifndef MFNOISE_OBJECTIVE_HPP_
#define MFNOISE_OBJECTIVE_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "mfnoise/core.hpp"

namespace mfnoise {

struct FactorPair {
  Mat x;  // d1 x r
  Mat y;  // d2 x r

  std::size_t rank() const { return x.cols(); }
  std::size_t d1() const { return x.rows(); }
  std::size_t d2() const { return y.rows(); }
  bool all_finite() const { return x.all_finite() && y.all_finite(); }
  double norm_sq() const { return frobenius_norm_sq(x) + frobenius_norm_sq(y); }

  friend bool operator==(const FactorPair&, const FactorPair&) = default;
};

// Target M = A diag(sigma) B^T held in SVD-factored form.
class GroundTruth {
 public:
  GroundTruth(Mat a, std::vector<double> sigma, Mat b);

  // u* = e1 in R^d1, v* = e1 in R^d2, unit singular value.
  static GroundTruth rank1(std::size_t d1, std::size_t d2);
  // A = [I_r; 0], B = [I_r; 0].
  static GroundTruth leading_identity(std::size_t d1, std::size_t d2, std::vector<double> sigma);
  // Orthonormal A, B from Gram-Schmidt on Gaussian matrices.
  static GroundTruth random(std::size_t d1, std::size_t d2, std::vector<double> sigma, Rng& rng);

  const Mat& a() const { return a_; }
  const Mat& b() const { return b_; }
  const std::vector<double>& sigma() const { return sigma_; }
  const Mat& target() const { return m_; }
  std::size_t d1() const { return a_.rows(); }
  std::size_t d2() const { return b_.rows(); }
  std::size_t rank() const { return sigma_.size(); }
  double sigma_min() const { return sigma_.back(); }

  // Leading singular directions; for a rank-1 target these are u* and v*.
  std::vector<double> u_star() const { return a_.col(0); }
  std::vector<double> v_star() const { return b_.col(0); }

 private:
  Mat a_;
  Mat b_;
  std::vector<double> sigma_;
  Mat m_;
};

// Per-entry standard deviations of the iterate perturbations.
struct NoiseConfig {
  double sigma1 = 0.0;
  double sigma2 = 0.0;

  bool active() const { return sigma1 > 0.0 || sigma2 > 0.0; }
  // d1 s1^2 / (d2 s2^2); nullopt when sigma2 == 0.
  std::optional<double> gamma_sq(std::size_t d1, std::size_t d2) const;
  // E||xi1||^2 per column, d1 s1^2.
  double total_variance(std::size_t d1) const { return static_cast<double>(d1) * sigma1 * sigma1; }

  friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

// Diagonal shift the smoothing adds to the X and Y blocks.
struct SmoothingShift {
  double x = 0.0;  // d2 s2^2
  double y = 0.0;  // d1 s1^2
};
SmoothingShift smoothing_shift(const NoiseConfig& n, std::size_t d1, std::size_t d2);

struct Gradient {
  Mat gx;
  Mat gy;
};

// Throws InvalidArgument unless p is dimensioned for gt.
void check_dims(const FactorPair& p, const GroundTruth& gt);

// X Y^T - M.
Mat residual(const FactorPair& p, const GroundTruth& gt);

double loss(const FactorPair& p, const GroundTruth& gt);
Gradient grad(const FactorPair& p, const GroundTruth& gt);
double smoothed_loss(const FactorPair& p, const GroundTruth& gt, const NoiseConfig& n);
Gradient smoothed_grad(const FactorPair& p, const GroundTruth& gt, const NoiseConfig& n);

// Full (d1 + d2) x (d1 + d2) Hessian, ordered (x, y). Without noise this is
// [[ ||y||^2 I, 2 x y^T - M ], [ 2 y x^T - M^T, ||x||^2 I ]]; with noise the
// diagonal blocks gain d2 s2^2 I and d1 s1^2 I. Throws UnsupportedRank if r > 1.
Mat hessian_rank1(const FactorPair& p, const GroundTruth& gt,
                  const std::optional<NoiseConfig>& n = std::nullopt);

// [Hess](D, D) = 2 <XY^T - M, dU dV^T> + ||X dV^T + dU Y^T||^2
//               + d2 s2^2 ||dU||^2 + d1 s1^2 ||dV||^2
double hessian_quadratic_form(const FactorPair& p, const GroundTruth& gt,
                              const std::optional<NoiseConfig>& n, const Mat& du, const Mat& dv);

}  // namespace mfnoise

#endif  // MFNOISE_OBJECTIVE_HPP_
