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

#include "mfnoise/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfnoise/errors.hpp"

namespace mfnoise {

double condition_number_formula(double alpha) {
  if (alpha == 0.0 || !std::isfinite(alpha)) {
    throw InvalidArgument("condition_number_formula: alpha must be finite and nonzero");
  }
  const double a4 = std::pow(alpha, 4);
  return std::max(a4, 1.0 / a4) + 1.0;
}

HessianReport hessian_spectrum(const FactorPair& p, const GroundTruth& gt,
                               const std::optional<NoiseConfig>& n, double zero_tol) {
  const Mat h = hessian_rank1(p, gt, n);
  EigenDecomp eig = sym_eigen(h);

  HessianReport report;
  report.eigenvalues = std::move(eig.values);
  report.zero_tol = zero_tol;
  report.lambda_min = report.eigenvalues.front();
  report.lambda_max = report.eigenvalues.back();
  const double scale = std::max(std::abs(report.lambda_min), std::abs(report.lambda_max));
  const double cut = zero_tol * scale;
  double smallest_positive = std::numeric_limits<double>::infinity();
  for (double v : report.eigenvalues) {
    if (v < -cut) {
      ++report.num_negative;
    } else if (v <= cut) {
      ++report.num_zero_modes;
    } else {
      smallest_positive = std::min(smallest_positive, v);
    }
  }
  report.effective_condition_number = std::isfinite(smallest_positive)
                                          ? report.lambda_max / smallest_positive
                                          : std::numeric_limits<double>::infinity();
  return report;
}

double noise_gamma(const NoiseConfig& n, std::size_t d1, std::size_t d2) {
  if (!n.active()) return 1.0;
  if (n.sigma1 <= 0.0 || n.sigma2 <= 0.0) {
    throw DegenerateNoise("noise gamma undefined: one of sigma1, sigma2 is zero");
  }
  return std::sqrt(*n.gamma_sq(d1, d2));
}

SmoothedOptimaRank1 smoothed_optima_rank1(const NoiseConfig& n, const GroundTruth& gt) {
  if (gt.rank() != 1) throw UnsupportedRank("smoothed_optima_rank1: target rank must be 1");
  if (gt.sigma()[0] != 1.0) throw InvalidArgument("smoothed_optima_rank1: target must have unit norm");
  if (!(n.sigma1 > 0.0) || !(n.sigma2 > 0.0)) {
    throw DegenerateNoise("smoothed_optima_rank1: sigma1 and sigma2 must be positive");
  }
  const double gamma = noise_gamma(n, gt.d1(), gt.d2());
  const double s2 = n.total_variance(gt.d1());
  const double a1_sq = gamma - s2;
  if (!(s2 < std::min(gamma, 1.0)) || !(a1_sq > 0.0)) {
    throw DegenerateNoise("smoothed_optima_rank1: noise variance " + std::to_string(s2) +
                          " must be below min{gamma, 1} = " + std::to_string(std::min(gamma, 1.0)));
  }
  SmoothedOptimaRank1 out;
  out.alpha1 = std::sqrt(a1_sq);
  out.alpha2 = out.alpha1 / gamma;

  const Mat u = Mat::column(gt.u_star());
  const Mat v = Mat::column(gt.v_star());
  out.points[0] = FactorPair{scaled(u, out.alpha1), scaled(v, out.alpha2)};
  out.points[1] = FactorPair{scaled(u, -out.alpha1), scaled(v, -out.alpha2)};
  return out;
}

FactorPair rankr_balanced_optimum(const GroundTruth& gt, const NoiseConfig& n) {
  const double gamma = noise_gamma(n, gt.d1(), gt.d2());
  const auto shift = smoothing_shift(n, gt.d1(), gt.d2());
  const double c = std::sqrt(shift.x * shift.y);
  if (!(c < gt.sigma_min())) {
    throw DegenerateNoise("rankr_balanced_optimum: gamma * sigma^2 = " + std::to_string(c) +
                          " must be below sigma_min(M) = " + std::to_string(gt.sigma_min()));
  }
  const double root_gamma = std::sqrt(gamma);
  FactorPair out{gt.a(), gt.b()};
  for (std::size_t k = 0; k < gt.rank(); ++k) {
    const double root = std::sqrt(gt.sigma()[k] - c);
    for (std::size_t i = 0; i < gt.d1(); ++i) out.x(i, k) *= root_gamma * root;
    for (std::size_t j = 0; j < gt.d2(); ++j) out.y(j, k) *= root / root_gamma;
  }
  return out;
}

Procrustes procrustes_distance(const Mat& d1, const Mat& d2) {
  if (d1.rows() != d2.rows() || d1.cols() != d2.cols()) {
    throw InvalidArgument("procrustes_distance: shape mismatch");
  }
  if (d1.cols() > 32) throw InvalidArgument("procrustes_distance: more than 32 columns");
  const Svd svd = svd_small(matmul_tn(d2, d1));
  Procrustes out;
  out.rotation = matmul_nt(svd.u, svd.v);
  out.dist = frobenius_norm(d1 - matmul(d2, out.rotation));
  return out;
}

Mat stack(const FactorPair& p) {
  if (p.x.cols() != p.y.cols()) throw InvalidArgument("stack: column counts differ");
  Mat w(p.x.rows() + p.y.rows(), p.x.cols());
  std::copy(p.x.data().begin(), p.x.data().end(), w.data().begin());
  std::copy(p.y.data().begin(), p.y.data().end(), w.data().begin() + p.x.size());
  return w;
}

double gram_residual(const FactorPair& p, double gamma) {
  Mat g = matmul_tn(p.x, p.x);
  scale_add(g, -gamma * gamma, matmul_tn(p.y, p.y));
  return frobenius_norm(g);
}

Balancedness balancedness(const FactorPair& p, double gamma) {
  const double ny = frobenius_norm(p.y);
  if (ny == 0.0) throw UndefinedRatio("balancedness: ||Y|| = 0");
  return Balancedness{frobenius_norm(p.x) / ny, gram_residual(p, gamma)};
}

std::string_view to_string(StationaryTag tag) {
  switch (tag) {
    case StationaryTag::kGlobalOptimumFamily:
      return "GlobalOptimumFamily";
    case StationaryTag::kSaddleFamily:
      return "SaddleFamily";
    case StationaryTag::kSmoothedOptimum:
      return "SmoothedOptimum";
    case StationaryTag::kSmoothedSaddleOrigin:
      return "SmoothedSaddleOrigin";
    case StationaryTag::kNotStationary:
      return "NotStationary";
    case StationaryTag::kUnclassified:
      return "Unclassified";
  }
  return "Unknown";
}

std::optional<double> StationaryClass::residual(std::string_view name) const {
  for (const auto& [key, value] : residuals)
    if (key == name) return value;
  return std::nullopt;
}

StationaryClass classify_stationary(const FactorPair& p, const GroundTruth& gt,
                                    const std::optional<NoiseConfig>& n, double tol) {
  check_dims(p, gt);
  const bool smoothed = n && n->active();
  const Gradient g = smoothed ? smoothed_grad(p, gt, *n) : grad(p, gt);
  const double grad_norm = std::sqrt(frobenius_norm_sq(g.gx) + frobenius_norm_sq(g.gy));
  const double p_norm = std::sqrt(p.norm_sq());

  StationaryClass out;
  out.residuals.emplace_back("grad_norm", grad_norm);
  if (grad_norm > tol * (1.0 + p_norm)) {
    out.tag = StationaryTag::kNotStationary;
    return out;
  }

  if (smoothed) {
    out.residuals.emplace_back("norm", p_norm);
    if (p_norm <= tol) {
      out.tag = StationaryTag::kSmoothedSaddleOrigin;
      return out;
    }
    double dist = std::numeric_limits<double>::infinity();
    try {
      if (p.rank() == 1 && gt.rank() == 1 && gt.sigma()[0] == 1.0) {
        const auto opt = smoothed_optima_rank1(*n, gt);
        for (const auto& q : opt.points) {
          dist = std::min(dist, std::sqrt(frobenius_norm_sq(p.x - q.x) +
                                          frobenius_norm_sq(p.y - q.y)));
        }
      } else if (p.rank() == gt.rank()) {
        dist = procrustes_distance(stack(p), stack(rankr_balanced_optimum(gt, *n))).dist;
      }
    } catch (const DegenerateNoise&) {
      out.tag = StationaryTag::kUnclassified;
      return out;
    }
    out.residuals.emplace_back("dist_to_optimum", dist);
    // Stationarity within tol places an optimum within O(tol / curvature).
    out.tag = dist <= std::sqrt(tol) * (1.0 + p_norm) ? StationaryTag::kSmoothedOptimum
                                                       : StationaryTag::kSaddleFamily;
    return out;
  }

  if (p.rank() == 1 && gt.rank() == 1) {
    const auto u = gt.u_star();
    const auto v = gt.v_star();
    double a1 = 0.0, a2 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) a1 += p.x(i, 0) * u[i];
    for (std::size_t j = 0; j < v.size(); ++j) a2 += p.y(j, 0) * v[j];
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) b1 += std::pow(p.x(i, 0) - a1 * u[i], 2);
    for (std::size_t j = 0; j < v.size(); ++j) b2 += std::pow(p.y(j, 0) - a2 * v[j], 2);
    b1 = std::sqrt(b1);
    b2 = std::sqrt(b2);
    const double min_norm = std::min(frobenius_norm(p.x), frobenius_norm(p.y));
    const double product_gap = std::abs(a1 * a2 - gt.sigma()[0]);
    out.residuals.emplace_back("alpha1", a1);
    out.residuals.emplace_back("alpha2", a2);
    out.residuals.emplace_back("beta1_norm", b1);
    out.residuals.emplace_back("beta2_norm", b2);
    out.residuals.emplace_back("min_factor_norm", min_norm);
    out.residuals.emplace_back("product_gap", product_gap);
    // Saddle first: p = 0 belongs to the closure of both families.
    if (min_norm <= tol && std::abs(a1) <= tol && std::abs(a2) <= tol) {
      out.tag = StationaryTag::kSaddleFamily;
    } else if (b1 <= tol && b2 <= tol && product_gap <= tol) {
      out.tag = StationaryTag::kGlobalOptimumFamily;
    } else {
      out.tag = StationaryTag::kUnclassified;
    }
    return out;
  }

  const double fit = std::sqrt(2.0 * loss(p, gt));
  out.residuals.emplace_back("fit_residual", fit);
  out.tag = fit <= tol ? StationaryTag::kGlobalOptimumFamily : StationaryTag::kSaddleFamily;
  return out;
}

}  // namespace mfnoise
