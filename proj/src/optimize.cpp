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

#include "mfnoise/optimize.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mfnoise/errors.hpp"
#include "mfnoise/landscape.hpp"

namespace mfnoise {

void RunConfig::validate() const {
  if (!(eta_x > 0.0) || !std::isfinite(eta_x)) throw InvalidArgument("eta_x must be positive");
  if (!(eta_y > 0.0) || !std::isfinite(eta_y)) throw InvalidArgument("eta_y must be positive");
  if (record_stride == 0) throw InvalidArgument("record_stride must be at least 1");
  if (!(noise.sigma1 >= 0.0) || !std::isfinite(noise.sigma1)) {
    throw InvalidArgument("noise.sigma1 must be nonnegative");
  }
  if (!(noise.sigma2 >= 0.0) || !std::isfinite(noise.sigma2)) {
    throw InvalidArgument("noise.sigma2 must be nonnegative");
  }
  if (const auto* g = std::get_if<GaussianInit>(&init)) {
    if (!(g->sigma_x >= 0.0) || !std::isfinite(g->sigma_x)) {
      throw InvalidArgument("init.sigma_x must be nonnegative");
    }
    if (!(g->sigma_y >= 0.0) || !std::isfinite(g->sigma_y)) {
      throw InvalidArgument("init.sigma_y must be nonnegative");
    }
  } else {
    const auto& p = std::get<FactorPair>(init);
    if (p.x.cols() != p.y.cols() || p.x.cols() == 0) {
      throw InvalidArgument("init: x and y must have the same positive column count");
    }
    if (!p.all_finite()) throw InvalidArgument("init: entries must be finite");
  }
}

namespace {

FactorPair descend(const FactorPair& p, const Gradient& g, double eta_x, double eta_y) {
  FactorPair next = p;
  scale_add(next.x, -eta_x, g.gx);
  scale_add(next.y, -eta_y, g.gy);
  if (!next.all_finite()) throw NumericalFailure("non-finite iterate (step size too large?)");
  return next;
}

}  // namespace

FactorPair gd_step(const FactorPair& p, const GroundTruth& gt, double eta_x, double eta_y) {
  return descend(p, grad(p, gt), eta_x, eta_y);
}

FactorPair perturbed_step(const FactorPair& p, const GroundTruth& gt, const Mat& xi1,
                          const Mat& xi2, double eta_x, double eta_y) {
  const FactorPair perturbed{p.x + xi1, p.y + xi2};
  return descend(p, grad(perturbed, gt), eta_x, eta_y);
}

FactorPair pgd_step(const FactorPair& p, const GroundTruth& gt, const NoiseConfig& n,
                    double eta_x, double eta_y, Rng& rng) {
  Mat xi1(p.x.rows(), p.x.cols());
  Mat xi2(p.y.rows(), p.y.cols());
  rng.fill_gaussian(xi1, n.sigma1);
  rng.fill_gaussian(xi2, n.sigma2);
  return perturbed_step(p, gt, xi1, xi2, eta_x, eta_y);
}

DiagnosticsContext::DiagnosticsContext(const GroundTruth& gt, const NoiseConfig& n)
    : gt_(&gt), noise_(n), target_norm_sq_(frobenius_norm_sq(gt.target())) {
  try {
    gamma_ = noise_gamma(n, gt.d1(), gt.d2());
  } catch (const DegenerateNoise&) {
    gamma_ = 1.0;
  }
  try {
    if (n.active() && gt.rank() == 1 && gt.sigma()[0] == 1.0) {
      reference_ = smoothed_optima_rank1(n, gt).points[0];
    } else {
      reference_ = rankr_balanced_optimum(gt, n);
    }
  } catch (const DegenerateNoise&) {
    reference_.reset();
  }
}

IterateDiagnostics DiagnosticsContext::operator()(const FactorPair& p, std::uint64_t t) const {
  const GroundTruth& gt = *gt_;
  check_dims(p, gt);
  IterateDiagnostics d;
  d.t = t;
  const Mat product = matmul_nt(p.x, p.y);
  Mat res = product;
  scale_add(res, -1.0, gt.target());
  d.loss = 0.5 * frobenius_norm_sq(res);
  d.smoothed_loss = smoothed_loss(p, gt, noise_);

  const double xx = frobenius_norm_sq(p.x);
  const double yy = frobenius_norm_sq(p.y);
  d.norm_sq_sum = xx + yy;
  d.ratio_sq = yy > 0.0 ? xx / yy : std::numeric_limits<double>::infinity();
  d.gram_residual = gram_residual(p, gamma_);

  const double overlap = inner(product, gt.target());
  d.overlap = p.rank() == 1 ? overlap : overlap / target_norm_sq_;

  if (p.rank() == 1) {
    const auto u = gt.u_star();
    const auto v = gt.v_star();
    double a1 = 0.0, a2 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) a1 += p.x(i, 0) * u[i];
    for (std::size_t j = 0; j < v.size(); ++j) a2 += p.y(j, 0) * v[j];
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) b1 += std::pow(p.x(i, 0) - a1 * u[i], 2);
    for (std::size_t j = 0; j < v.size(); ++j) b2 += std::pow(p.y(j, 0) - a2 * v[j], 2);
    d.alpha1 = a1;
    d.alpha2 = a2;
    d.beta1_norm = std::sqrt(b1);
    d.beta2_norm = std::sqrt(b2);
  }

  if (reference_) {
    if (p.rank() == 1) {
      const FactorPair& q = *reference_;
      const double plus = frobenius_norm(p.x - q.x) + frobenius_norm(p.y - q.y);
      const double minus = frobenius_norm(p.x + q.x) + frobenius_norm(p.y + q.y);
      d.dist_to_opt = std::min(plus, minus);
    } else {
      d.dist_to_opt = procrustes_distance(stack(p), stack(*reference_)).dist;
    }
  }
  return d;
}

IterateDiagnostics diagnostics(const FactorPair& p, const GroundTruth& gt, const NoiseConfig& n,
                               std::uint64_t t) {
  return DiagnosticsContext(gt, n)(p, t);
}

Trajectory run(const RunConfig& cfg, const GroundTruth& gt) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  Rng rng(cfg.seed);

  FactorPair p;
  if (const auto* g = std::get_if<GaussianInit>(&cfg.init)) {
    p.x = Mat(gt.d1(), gt.rank());
    p.y = Mat(gt.d2(), gt.rank());
    rng.fill_gaussian(p.x, g->sigma_x);
    rng.fill_gaussian(p.y, g->sigma_y);
  } else {
    p = std::get<FactorPair>(cfg.init);
  }
  check_dims(p, gt);

  const DiagnosticsContext diag(gt, cfg.noise);
  Trajectory traj;
  traj.config = cfg;
  traj.records.reserve(cfg.horizon / cfg.record_stride + 2);
  traj.records.push_back(diag(p, 0));

  for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
    try {
      p = cfg.algorithm == Algorithm::kGD
              ? gd_step(p, gt, cfg.eta_x, cfg.eta_y)
              : pgd_step(p, gt, cfg.noise, cfg.eta_x, cfg.eta_y, rng);
    } catch (const NumericalFailure& e) {
      throw NumericalFailure("run: iteration " + std::to_string(t) + ": " + e.what(),
                             static_cast<std::int64_t>(t));
    }
    if (t % cfg.record_stride == 0 || t == cfg.horizon) traj.records.push_back(diag(p, t));
  }
  traj.final_state = std::move(p);
  traj.wall_time = std::chrono::steady_clock::now() - start;
  return traj;
}

std::vector<double> ema(std::span<const double> series, double decay) {
  if (!(decay >= 0.0 && decay < 1.0)) throw InvalidArgument("ema: decay must lie in [0, 1)");
  std::vector<double> out(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    out[t] = t == 0 ? series[0] : decay * out[t - 1] + (1.0 - decay) * series[t];
  }
  return out;
}

}  // namespace mfnoise
