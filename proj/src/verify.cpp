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

#include "mfnoise/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>

#include "mfnoise/errors.hpp"
#include "mfnoise/landscape.hpp"

namespace mfnoise {

namespace {

double& coordinate(FactorPair& p, std::size_t k) {
  return k < p.x.size() ? p.x.data()[k] : p.y.data()[k - p.x.size()];
}

Mat random_mat(std::size_t rows, std::size_t cols, double sigma, Rng& rng) {
  Mat m(rows, cols);
  rng.fill_gaussian(m, sigma);
  return m;
}

FactorPair random_pair(std::size_t d1, std::size_t d2, std::size_t r, Rng& rng) {
  return FactorPair{random_mat(d1, r, 1.0, rng), random_mat(d2, r, 1.0, rng)};
}

double max_relative_error(const Gradient& analytic, const Gradient& numeric) {
  const double scale = std::sqrt(frobenius_norm_sq(analytic.gx) + frobenius_norm_sq(analytic.gy));
  const double err = std::sqrt(frobenius_norm_sq(analytic.gx - numeric.gx) +
                               frobenius_norm_sq(analytic.gy - numeric.gy));
  return err / std::max(scale, 1.0);
}

// Noise with E||xi1||^2 = gamma^2 E||xi2||^2 and d1 s1^2 = s2_total.
NoiseConfig noise_for(double gamma, double total_variance, std::size_t d1, std::size_t d2) {
  return NoiseConfig{std::sqrt(total_variance / static_cast<double>(d1)),
                     std::sqrt(total_variance / (gamma * gamma * static_cast<double>(d2)))};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

using Check = std::function<CheckReport(Rng&, const VerifyHooks&)>;

Gradient smoothed_grad_hooked(const FactorPair& p, const GroundTruth& gt, const NoiseConfig& n,
                              const VerifyHooks& hooks) {
  if (!hooks.flip_smoothing_sign) return smoothed_grad(p, gt, n);
  Gradient g = grad(p, gt);
  const auto shift = smoothing_shift(n, gt.d1(), gt.d2());
  scale_add(g.gx, -shift.x, p.x);
  scale_add(g.gy, -shift.y, p.y);
  return g;
}

double grad_norm(const Gradient& g) {
  return std::sqrt(frobenius_norm_sq(g.gx) + frobenius_norm_sq(g.gy));
}

std::vector<std::pair<std::string, Check>> registry() {
  std::vector<std::pair<std::string, Check>> checks;

  checks.emplace_back("grad_vs_finite_differences", [](Rng& rng, const VerifyHooks&) {
    const auto gt = GroundTruth::random(6, 7, {2.0, 1.0}, rng);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const auto p = random_pair(6, 7, 2, rng);
      const PairFunction f = [&](const FactorPair& q) { return loss(q, gt); };
      worst = std::max(worst, max_relative_error(grad(p, gt), finite_diff_grad(f, p, 1e-5)));
    }
    return make_check("grad_vs_finite_differences", worst, 0.0, 1e-5, ToleranceKind::kAbsolute,
                      "max relative error over 10 random rank-2 points");
  });

  checks.emplace_back("smoothed_grad_vs_finite_differences", [](Rng& rng, const VerifyHooks& h) {
    const auto gt = GroundTruth::random(6, 7, {2.0, 1.0}, rng);
    const NoiseConfig n{0.2, 0.15};
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const auto p = random_pair(6, 7, 2, rng);
      const PairFunction f = [&](const FactorPair& q) { return smoothed_loss(q, gt, n); };
      worst = std::max(worst, max_relative_error(smoothed_grad_hooked(p, gt, n, h),
                                                 finite_diff_grad(f, p, 1e-5)));
    }
    return make_check("smoothed_grad_vs_finite_differences", worst, 0.0, 1e-5,
                      ToleranceKind::kAbsolute, "max relative error over 10 random rank-2 points");
  });

  checks.emplace_back("hessian_quadratic_form_vs_matrix", [](Rng& rng, const VerifyHooks&) {
    const auto gt = GroundTruth::rank1(5, 4);
    const NoiseConfig n{0.1, 0.2};
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const auto p = random_pair(5, 4, 1, rng);
      const auto dir = random_pair(5, 4, 1, rng);
      const Mat z = stack(dir);
      const double direct = inner(z, matmul(hessian_rank1(p, gt, n), z));
      const double form = hessian_quadratic_form(p, gt, n, dir.x, dir.y);
      worst = std::max(worst, std::abs(direct - form) / (1.0 + std::abs(direct)));
    }
    return make_check("hessian_quadratic_form_vs_matrix", worst, 0.0, 1e-10,
                      ToleranceKind::kAbsolute, "z^T H z against the quadratic form, rank 1");
  });

  checks.emplace_back("hessian_quadratic_form_vs_finite_differences",
                      [](Rng& rng, const VerifyHooks&) {
    const auto gt = GroundTruth::random(5, 6, {1.5, 0.5}, rng);
    const NoiseConfig n{0.1, 0.2};
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const auto p = random_pair(5, 6, 2, rng);
      const auto dir = random_pair(5, 6, 2, rng);
      const PairFunction f = [&](const FactorPair& q) { return smoothed_loss(q, gt, n); };
      const double fd = finite_diff_curvature(f, p, dir.x, dir.y, 1e-3);
      const double form = hessian_quadratic_form(p, gt, n, dir.x, dir.y);
      worst = std::max(worst, std::abs(fd - form) / std::max(1.0, std::abs(form)));
    }
    return make_check("hessian_quadratic_form_vs_finite_differences", worst, 0.0, 1e-4,
                      ToleranceKind::kAbsolute, "rank-2 smoothed curvature");
  });

  for (const double alpha : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const std::string name = "condition_number_alpha_" + fmt(alpha);
    checks.emplace_back(name, [alpha, name](Rng&, const VerifyHooks&) {
      const auto gt = GroundTruth::rank1(20, 30);
      const FactorPair p{scaled(Mat::column(gt.u_star()), alpha),
                         scaled(Mat::column(gt.v_star()), 1.0 / alpha)};
      const auto report = hessian_spectrum(p, gt, std::nullopt);
      return make_check(name, report.effective_condition_number, condition_number_formula(alpha),
                        1e-8, ToleranceKind::kRelative,
                        "zero modes: " + std::to_string(report.num_zero_modes));
    });
  }

  checks.emplace_back("hessian_spectrum_multiplicities", [](Rng&, const VerifyHooks&) {
    constexpr std::size_t d1 = 20, d2 = 30;
    const auto gt = GroundTruth::rank1(d1, d2);
    double worst = 0.0;
    for (const double alpha : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const FactorPair p{scaled(Mat::column(gt.u_star()), alpha),
                         scaled(Mat::column(gt.v_star()), 1.0 / alpha)};
      const auto eig = sym_eigen(hessian_rank1(p, gt)).values;
      std::vector<double> expected;
      expected.push_back(0.0);
      expected.insert(expected.end(), d1 - 1, 1.0 / (alpha * alpha));
      expected.insert(expected.end(), d2 - 1, alpha * alpha);
      expected.push_back(alpha * alpha + 1.0 / (alpha * alpha));
      std::sort(expected.begin(), expected.end());
      for (std::size_t k = 0; k < eig.size(); ++k)
        worst = std::max(worst, std::abs(eig[k] - expected[k]));
    }
    return make_check("hessian_spectrum_multiplicities", worst, 0.0, 1e-9,
                      ToleranceKind::kAbsolute, "max eigenvalue deviation, 5 values of alpha");
  });

  const std::pair<double, double> optimum_settings[] = {{1.0, 0.0975}, {std::sqrt(0.5), 0.01}};
  for (const auto& [gamma, s2] : optimum_settings) {
    const std::string name = "smoothed_optimum_stationary_gamma_" + fmt(gamma);
    checks.emplace_back(name, [gamma, s2, name](Rng&, const VerifyHooks& h) {
      const auto gt = GroundTruth::rank1(20, 30);
      const NoiseConfig n = noise_for(gamma, s2, 20, 30);
      const auto opt = smoothed_optima_rank1(n, gt);
      double worst = 0.0;
      for (const auto& q : opt.points) worst = std::max(worst, grad_norm(smoothed_grad_hooked(q, gt, n, h)));
      return make_check(name, worst, 0.0, 1e-10, ToleranceKind::kAbsolute,
                        "sigma^2 = " + fmt(s2) + ", alpha1 = " + fmt(opt.alpha1));
    });
  }

  checks.emplace_back("origin_strict_saddle", [](Rng&, const VerifyHooks&) {
    // Balanced noise: the origin Hessian restricted to (u*, v*) is
    // [[s^2, -1], [-1, s^2]], so lambda_min = s^2 - 1.
    const auto gt = GroundTruth::rank1(20, 30);
    const double s2 = 0.3;
    const NoiseConfig n = noise_for(1.0, s2, 20, 30);
    const FactorPair origin{Mat(20, 1), Mat(30, 1)};
    const auto report = hessian_spectrum(origin, gt, n);
    return make_check("origin_strict_saddle", report.lambda_min, s2 - 1.0, 1e-10,
                      ToleranceKind::kAbsolute, "sigma^2 = 0.3");
  });

  checks.emplace_back("balanced_optimum_stationary", [](Rng& rng, const VerifyHooks& h) {
    double worst = 0.0;
    for (const double gamma : {1.0, std::sqrt(0.5)}) {
      const auto gt = GroundTruth::random(6, 8, {2.0, 1.0}, rng);
      const NoiseConfig n = noise_for(gamma, gamma * gamma * 0.05, 6, 8);
      worst = std::max(worst, grad_norm(smoothed_grad_hooked(rankr_balanced_optimum(gt, n), gt, n, h)));
    }
    return make_check("balanced_optimum_stationary", worst, 0.0, 1e-10, ToleranceKind::kAbsolute,
                      "random rank-2 targets, gamma in {1, sqrt(0.5)}");
  });

  checks.emplace_back("balanced_optimum_gram_condition", [](Rng& rng, const VerifyHooks&) {
    double worst = 0.0;
    for (const double gamma : {1.0, std::sqrt(0.5)}) {
      const auto gt = GroundTruth::random(6, 8, {2.0, 1.0}, rng);
      const NoiseConfig n = noise_for(gamma, gamma * gamma * 0.05, 6, 8);
      worst = std::max(worst, gram_residual(rankr_balanced_optimum(gt, n), gamma));
    }
    return make_check("balanced_optimum_gram_condition", worst, 0.0, 1e-10,
                      ToleranceKind::kAbsolute, "||U^T U - gamma^2 V^T V||_F");
  });

  checks.emplace_back("procrustes_recovers_rotation", [](Rng& rng, const VerifyHooks&) {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const Mat d = random_mat(9, 3, 1.0, rng);
      const Mat r0 = svd_small(random_mat(3, 3, 1.0, rng)).u;
      worst = std::max(worst, procrustes_distance(d, matmul(d, r0)).dist);
    }
    return make_check("procrustes_recovers_rotation", worst, 0.0, 1e-9, ToleranceKind::kAbsolute,
                      "dist_R(D, D R0) over 10 random draws");
  });

  checks.emplace_back("procrustes_vs_grid_search", [](Rng& rng, const VerifyHooks&) {
    const Mat d1 = random_mat(5, 2, 1.0, rng);
    const Mat d2 = random_mat(5, 2, 1.0, rng);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 1800; ++k) {
      const double th = 2.0 * std::numbers::pi * k / 1800.0;
      for (const double refl : {1.0, -1.0}) {
        const Mat r{{std::cos(th), -refl * std::sin(th)}, {std::sin(th), refl * std::cos(th)}};
        best = std::min(best, frobenius_norm(d1 - matmul(d2, r)));
      }
    }
    return make_check("procrustes_vs_grid_search", procrustes_distance(d1, d2).dist, best, 1e-3,
                      ToleranceKind::kAbsolute, "3600-point grid over O(2)");
  });

  for (const std::size_t r : {std::size_t{1}, std::size_t{2}}) {
    const std::string name = "smoothed_loss_vs_monte_carlo_rank_" + std::to_string(r);
    checks.emplace_back(name, [r, name](Rng& rng, const VerifyHooks&) {
      std::vector<double> sigma(r, 1.0);
      const auto gt = GroundTruth::random(4, 5, sigma, rng);
      const NoiseConfig n{0.3, 0.2};
      const auto p = random_pair(4, 5, r, rng);
      const auto mc = monte_carlo_smoothed_loss(p, gt, n, 200000, rng.next());
      return make_check(name, smoothed_loss(p, gt, n), mc.mean, 4.0 * mc.std_error,
                        ToleranceKind::kAbsolute, "4 standard errors, 2e5 samples");
    });
  }
  return checks;
}

}  // namespace

Gradient finite_diff_grad(const PairFunction& f, const FactorPair& p, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite_diff_grad: h must be positive");
  Gradient g{Mat(p.x.rows(), p.x.cols()), Mat(p.y.rows(), p.y.cols())};
  FactorPair q = p;
  const std::size_t total = p.x.size() + p.y.size();
  for (std::size_t k = 0; k < total; ++k) {
    double& c = coordinate(q, k);
    const double saved = c;
    c = saved + h;
    const double up = f(q);
    c = saved - h;
    const double down = f(q);
    c = saved;
    const double d = (up - down) / (2.0 * h);
    if (k < p.x.size()) {
      g.gx.data()[k] = d;
    } else {
      g.gy.data()[k - p.x.size()] = d;
    }
  }
  return g;
}

double finite_diff_curvature(const PairFunction& f, const FactorPair& p, const Mat& zx,
                             const Mat& zy, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite_diff_curvature: h must be positive");
  FactorPair up = p;
  FactorPair down = p;
  scale_add(up.x, h, zx);
  scale_add(up.y, h, zy);
  scale_add(down.x, -h, zx);
  scale_add(down.y, -h, zy);
  return (f(up) - 2.0 * f(p) + f(down)) / (h * h);
}

MonteCarloEstimate monte_carlo_smoothed_loss(const FactorPair& p, const GroundTruth& gt,
                                             const NoiseConfig& n, std::size_t samples,
                                             std::uint64_t seed) {
  if (samples < 2) throw InvalidArgument("monte_carlo_smoothed_loss: need at least 2 samples");
  check_dims(p, gt);
  Rng rng(mix_seed(seed, kOracleSeedDomain));
  FactorPair q = p;
  // Welford accumulation.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    for (std::size_t i = 0; i < q.x.size(); ++i)
      q.x.data()[i] = p.x.data()[i] + rng.gaussian(0.0, n.sigma1);
    for (std::size_t i = 0; i < q.y.size(); ++i)
      q.y.data()[i] = p.y.data()[i] + rng.gaussian(0.0, n.sigma2);
    const double v = loss(q, gt);
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  return MonteCarloEstimate{mean, std::sqrt(var / static_cast<double>(samples))};
}

CheckReport make_check(std::string name, double observed, double expected, double tolerance,
                       ToleranceKind kind, std::string detail) {
  CheckReport c{std::move(name), observed, expected, tolerance, kind, false, std::move(detail)};
  const double gap = std::abs(observed - expected);
  const double bound = kind == ToleranceKind::kAbsolute
                           ? tolerance
                           : tolerance * std::max(std::abs(observed), std::abs(expected));
  c.passed = std::isfinite(observed) && gap <= bound;
  return c;
}

std::size_t registered_check_count() { return registry().size(); }

std::vector<CheckReport> run_verification_suite(std::uint64_t seed, const VerifyHooks& hooks) {
  const auto checks = registry();
  std::vector<CheckReport> out;
  out.reserve(checks.size());
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Rng rng(mix_seed(mix_seed(seed, kOracleSeedDomain), i));
    try {
      out.push_back(checks[i].second(rng, hooks));
    } catch (const std::exception& e) {
      CheckReport failed;
      failed.name = checks[i].first;
      failed.passed = false;
      failed.detail = std::string("exception: ") + e.what();
      out.push_back(std::move(failed));
    }
  }
  return out;
}

}  // namespace mfnoise
