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

#include "mfnoise/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <thread>

namespace mfnoise {

using nlohmann::json;

FiveNumberSummary five_number_summary(std::span<const double> values) {
  FiveNumberSummary s;
  s.count = values.size();
  if (values.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.min = s.q1 = s.median = s.q3 = s.max = nan;
    return s;
  }
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
  };
  s.min = v.front();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.max = v.back();
  return s;
}

void recompute_aggregates(SweepSummary& s) {
  std::vector<double> ratio, loss, dist;
  for (const auto& row : s.rows) {
    ratio.push_back(row.final.ratio_sq);
    loss.push_back(row.final.loss);
    if (row.final.dist_to_opt) dist.push_back(*row.final.dist_to_opt);
  }
  s.ratio_sq = five_number_summary(ratio);
  s.loss = five_number_summary(loss);
  s.dist_to_opt = five_number_summary(dist);
}

SweepSummary run_sweep(const ExperimentSetup& setup, std::string preset, std::size_t repeats,
                       std::uint64_t master_seed, std::size_t jobs) {
  setup.config.validate();
  const GroundTruth gt = setup.target.build();
  SweepSummary out;
  out.preset = std::move(preset);
  out.master_seed = master_seed;
  out.setup = setup;
  out.rows.resize(repeats);

  std::vector<std::exception_ptr> errors(repeats);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < repeats; i = next++) {
      try {
        RunConfig cfg = setup.config;
        cfg.seed = mix_seed(master_seed, i);
        // Only the final iterate is kept, so skip intermediate records.
        cfg.record_stride = std::max<std::uint64_t>(cfg.horizon, 1);
        const Trajectory traj = run(cfg, gt);
        out.rows[i] = SweepRow{i, cfg.seed, traj.records.back()};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(repeats, 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  recompute_aggregates(out);
  return out;
}

namespace {

json five_json(const FiveNumberSummary& s) {
  const auto real = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return json{{"count", s.count}, {"min", real(s.min)},       {"q1", real(s.q1)},
              {"median", real(s.median)}, {"q3", real(s.q3)}, {"max", real(s.max)}};
}

std::optional<double> opt_real(const json& j, const std::string& key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number()) throw ConfigError(key, "expected a number");
  return j.at(key).get<double>();
}

double real_or_inf(const json& j, const std::string& key) {
  const auto v = opt_real(j, key);
  return v ? *v : std::numeric_limits<double>::infinity();
}

bool same(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return a == b || std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

void check_five(const json& stored, const FiveNumberSummary& fresh, const std::string& name) {
  const auto get = [&](const char* k) {
    const auto v = opt_real(stored, k);
    return v ? *v : std::numeric_limits<double>::quiet_NaN();
  };
  if (!stored.contains("count") || stored.at("count").get<std::size_t>() != fresh.count ||
      !same(get("min"), fresh.min) || !same(get("q1"), fresh.q1) ||
      !same(get("median"), fresh.median) || !same(get("q3"), fresh.q3) ||
      !same(get("max"), fresh.max)) {
    throw ConfigError("aggregate." + name, "stored aggregate disagrees with per-seed rows");
  }
}

}  // namespace

json to_json(const SweepSummary& s) {
  json rows = json::array();
  for (const auto& r : s.rows) {
    json row = to_json(r.final);
    row["index"] = r.index;
    row["seed"] = r.seed;
    rows.push_back(std::move(row));
  }
  return json{{"schema_version", kSchemaVersion},
              {"preset", s.preset},
              {"master_seed", s.master_seed},
              {"repeats", s.rows.size()},
              {"setup", to_json(s.setup)},
              {"rows", std::move(rows)},
              {"aggregate",
               {{"ratio_sq", five_json(s.ratio_sq)},
                {"loss", five_json(s.loss)},
                {"dist_to_opt", five_json(s.dist_to_opt)}}}};
}

SweepSummary sweep_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("", "sweep summary must be an object");
  if (j.value("schema_version", 0) != kSchemaVersion) {
    throw ConfigError("schema_version", "unsupported schema version");
  }
  SweepSummary s;
  s.preset = j.value("preset", "");
  s.master_seed = j.value("master_seed", std::uint64_t{0});
  if (j.contains("setup")) s.setup = apply_config(j.at("setup"), default_setup());
  for (const auto& r : j.at("rows")) {
    SweepRow row;
    row.index = r.at("index").get<std::size_t>();
    row.seed = r.at("seed").get<std::uint64_t>();
    auto& d = row.final;
    d.t = r.at("t").get<std::uint64_t>();
    d.loss = real_or_inf(r, "loss");
    d.smoothed_loss = real_or_inf(r, "smoothed_loss");
    d.alpha1 = opt_real(r, "alpha1");
    d.alpha2 = opt_real(r, "alpha2");
    d.beta1_norm = opt_real(r, "beta1_norm");
    d.beta2_norm = opt_real(r, "beta2_norm");
    d.overlap = real_or_inf(r, "overlap");
    d.ratio_sq = real_or_inf(r, "ratio_sq");
    d.gram_residual = real_or_inf(r, "gram_residual");
    d.dist_to_opt = opt_real(r, "dist_to_opt");
    d.norm_sq_sum = real_or_inf(r, "norm_sq_sum");
    s.rows.push_back(std::move(row));
  }
  recompute_aggregates(s);
  const auto& agg = j.at("aggregate");
  check_five(agg.at("ratio_sq"), s.ratio_sq, "ratio_sq");
  check_five(agg.at("loss"), s.loss, "loss");
  check_five(agg.at("dist_to_opt"), s.dist_to_opt, "dist_to_opt");
  return s;
}

}  // namespace mfnoise
