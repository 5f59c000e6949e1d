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

#include "mfnoise/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

namespace mfnoise {

using nlohmann::json;

const std::vector<std::string> kTrajectoryColumns = {
    "t",       "loss",     "smoothed_loss", "alpha1",        "alpha2",      "beta1_norm",
    "beta2_norm", "overlap", "ratio_sq",    "gram_residual", "dist_to_opt", "norm_sq_sum"};

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

json optional_json(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? json(*v) : json(nullptr);
}

json real_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  for (std::size_t i = 0; i < kTrajectoryColumns.size(); ++i)
    out << (i ? "," : "") << kTrajectoryColumns[i];
  out << '\n';
  for (const auto& d : traj.records) {
    out << d.t << ',' << format_real(d.loss) << ',' << format_real(d.smoothed_loss) << ','
        << cell(d.alpha1) << ',' << cell(d.alpha2) << ',' << cell(d.beta1_norm) << ','
        << cell(d.beta2_norm) << ',' << format_real(d.overlap) << ',' << format_real(d.ratio_sq)
        << ',' << format_real(d.gram_residual) << ',' << cell(d.dist_to_opt) << ','
        << format_real(d.norm_sq_sum) << '\n';
  }
}

json to_json(const Mat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw ConfigError(key, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  std::vector<double> data;
  for (const auto& row : j) {
    if (!row.is_array() || row.empty()) throw ConfigError(key, "each row must be a non-empty array");
    if (cols == 0) cols = row.size();
    if (row.size() != cols) throw ConfigError(key, "rows have different lengths");
    for (const auto& v : row) {
      if (!v.is_number()) throw ConfigError(key, "entries must be numbers");
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw ConfigError(key, "entries must be finite");
      data.push_back(x);
    }
  }
  return Mat(rows, cols, std::move(data));
}

json to_json(const FactorPair& p) { return json{{"x", to_json(p.x)}, {"y", to_json(p.y)}}; }

FactorPair factor_pair_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("", "factor pair must be an object with keys x and y");
  for (const auto& [key, _] : j.items()) {
    if (key != "x" && key != "y") throw ConfigError(key, "unknown key");
  }
  if (!j.contains("x") || !j.contains("y")) throw ConfigError("x", "factor pair needs both x and y");
  FactorPair p{mat_from_json(j.at("x"), "x"), mat_from_json(j.at("y"), "y")};
  if (p.x.cols() != p.y.cols()) throw ConfigError("y", "x and y must have the same column count");
  return p;
}

json to_json(const IterateDiagnostics& d) {
  return json{{"t", d.t},
              {"loss", real_json(d.loss)},
              {"smoothed_loss", real_json(d.smoothed_loss)},
              {"alpha1", optional_json(d.alpha1)},
              {"alpha2", optional_json(d.alpha2)},
              {"beta1_norm", optional_json(d.beta1_norm)},
              {"beta2_norm", optional_json(d.beta2_norm)},
              {"overlap", real_json(d.overlap)},
              {"ratio_sq", real_json(d.ratio_sq)},
              {"gram_residual", real_json(d.gram_residual)},
              {"dist_to_opt", optional_json(d.dist_to_opt)},
              {"norm_sq_sum", real_json(d.norm_sq_sum)}};
}

namespace {

json config_json(const RunConfig& c) {
  json init;
  if (const auto* g = std::get_if<GaussianInit>(&c.init)) {
    init = json{{"kind", "gaussian"}, {"sigma_x", g->sigma_x}, {"sigma_y", g->sigma_y}};
  } else {
    const auto& p = std::get<FactorPair>(c.init);
    init = json{{"kind", "explicit"}, {"x", to_json(p.x)}, {"y", to_json(p.y)}};
  }
  return json{{"algorithm", c.algorithm == Algorithm::kGD ? "gd" : "pgd"},
              {"eta_x", c.eta_x},
              {"eta_y", c.eta_y},
              {"horizon", c.horizon},
              {"seed", c.seed},
              {"init", init},
              {"noise", {{"sigma1", c.noise.sigma1}, {"sigma2", c.noise.sigma2}}},
              {"record_stride", c.record_stride}};
}

json target_json(const TargetSpec& t) {
  switch (t.kind) {
    case TargetKind::kRank1:
      return json{{"kind", "rank1"}, {"d1", t.d1}, {"d2", t.d2}};
    case TargetKind::kScalar2d:
      return json{{"kind", "scalar2d"}};
    case TargetKind::kRankR:
      return json{{"kind", "rankr"}, {"d1", t.d1}, {"d2", t.d2}, {"sigma", t.sigma}};
  }
  return json();
}

double positive_real(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key, "expected a number");
  const double v = j.get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be positive and finite");
  return v;
}

double nonnegative_real(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key, "expected a number");
  const double v = j.get<double>();
  if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be nonnegative and finite");
  return v;
}

std::uint64_t unsigned_int(const json& j, const std::string& key) {
  if (!j.is_number_unsigned()) throw ConfigError(key, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

void require_keys(const json& j, const std::string& prefix, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(prefix, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(prefix.empty() ? key : prefix + "." + key, "unknown key");
  }
}

TargetSpec target_from_json(const json& j) {
  require_keys(j, "target", {"kind", "d1", "d2", "sigma"});
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw ConfigError("target.kind", "must be one of rank1, rankr, scalar2d");
  }
  const auto kind = j.at("kind").get<std::string>();
  TargetSpec t;
  if (kind == "scalar2d") {
    if (j.size() != 1) throw ConfigError("target", "scalar2d takes no other keys");
    return TargetSpec{TargetKind::kScalar2d, 1, 1, {1.0}};
  }
  if (kind != "rank1" && kind != "rankr") {
    throw ConfigError("target.kind", "must be one of rank1, rankr, scalar2d");
  }
  t.kind = kind == "rank1" ? TargetKind::kRank1 : TargetKind::kRankR;
  if (j.contains("d1")) t.d1 = unsigned_int(j.at("d1"), "target.d1");
  if (j.contains("d2")) t.d2 = unsigned_int(j.at("d2"), "target.d2");
  if (t.d1 == 0) throw ConfigError("target.d1", "must be positive");
  if (t.d2 == 0) throw ConfigError("target.d2", "must be positive");
  if (t.kind == TargetKind::kRank1) {
    if (j.contains("sigma")) throw ConfigError("target.sigma", "only valid for rankr targets");
    t.sigma = {1.0};
  } else {
    if (!j.contains("sigma") || !j.at("sigma").is_array() || j.at("sigma").empty()) {
      throw ConfigError("target.sigma", "rankr targets need a non-empty array of singular values");
    }
    t.sigma.clear();
    for (const auto& v : j.at("sigma")) t.sigma.push_back(positive_real(v, "target.sigma"));
    for (std::size_t k = 1; k < t.sigma.size(); ++k) {
      if (t.sigma[k] > t.sigma[k - 1]) throw ConfigError("target.sigma", "must be non-increasing");
    }
    if (t.sigma.size() > std::min(t.d1, t.d2)) throw ConfigError("target.sigma", "rank exceeds dimension");
  }
  return t;
}

}  // namespace

json to_json(const ExperimentSetup& s) {
  json j = config_json(s.config);
  j["target"] = target_json(s.target);
  return j;
}

json to_json(const Trajectory& traj) {
  json records = json::array();
  for (const auto& d : traj.records) records.push_back(to_json(d));
  return json{{"schema_version", kSchemaVersion},
              {"config", config_json(traj.config)},
              {"records", std::move(records)},
              {"final_state", to_json(traj.final_state)}};
}

json to_json(const CheckReport& c) {
  return json{{"name", c.name},
              {"observed", real_json(c.observed)},
              {"expected", real_json(c.expected)},
              {"tolerance", real_json(c.tolerance)},
              {"tolerance_kind", c.kind == ToleranceKind::kAbsolute ? "absolute" : "relative"},
              {"passed", c.passed},
              {"detail", c.detail}};
}

json reports_to_json(const std::vector<CheckReport>& reports) {
  json checks = json::array();
  std::size_t passed = 0;
  for (const auto& c : reports) {
    checks.push_back(to_json(c));
    passed += c.passed ? 1 : 0;
  }
  return json{{"schema_version", kSchemaVersion},
              {"total", reports.size()},
              {"passed", passed},
              {"all_passed", passed == reports.size()},
              {"checks", std::move(checks)}};
}

ExperimentSetup default_setup() {
  ExperimentSetup s;
  s.target = TargetSpec{TargetKind::kRank1, 20, 30, {1.0}};
  s.config = RunConfig{};
  return s;
}

ExperimentSetup apply_config(const json& j, ExperimentSetup base) {
  require_keys(j, "", {"algorithm", "eta_x", "eta_y", "horizon", "seed", "record_stride", "noise",
                       "init", "target"});
  RunConfig& c = base.config;
  if (j.contains("algorithm")) {
    const auto& a = j.at("algorithm");
    if (!a.is_string()) throw ConfigError("algorithm", "must be \"gd\" or \"pgd\"");
    const auto s = a.get<std::string>();
    if (s == "gd") {
      c.algorithm = Algorithm::kGD;
    } else if (s == "pgd") {
      c.algorithm = Algorithm::kPerturbedGD;
    } else {
      throw ConfigError("algorithm", "must be \"gd\" or \"pgd\"");
    }
  }
  if (j.contains("eta_x")) c.eta_x = positive_real(j.at("eta_x"), "eta_x");
  if (j.contains("eta_y")) c.eta_y = positive_real(j.at("eta_y"), "eta_y");
  if (j.contains("horizon")) c.horizon = unsigned_int(j.at("horizon"), "horizon");
  if (j.contains("seed")) c.seed = unsigned_int(j.at("seed"), "seed");
  if (j.contains("record_stride")) {
    c.record_stride = unsigned_int(j.at("record_stride"), "record_stride");
    if (c.record_stride == 0) throw ConfigError("record_stride", "must be at least 1");
  }
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    require_keys(n, "noise", {"sigma1", "sigma2"});
    if (n.contains("sigma1")) c.noise.sigma1 = nonnegative_real(n.at("sigma1"), "noise.sigma1");
    if (n.contains("sigma2")) c.noise.sigma2 = nonnegative_real(n.at("sigma2"), "noise.sigma2");
  }
  if (j.contains("init")) {
    const auto& in = j.at("init");
    require_keys(in, "init", {"kind", "sigma_x", "sigma_y", "x", "y"});
    const std::string kind =
        in.contains("kind") && in.at("kind").is_string() ? in.at("kind").get<std::string>() : "";
    if (kind == "gaussian") {
      if (in.contains("x") || in.contains("y")) throw ConfigError("init", "gaussian init takes sigma_x, sigma_y");
      GaussianInit g;
      if (const auto* prev = std::get_if<GaussianInit>(&c.init)) g = *prev;
      if (in.contains("sigma_x")) g.sigma_x = nonnegative_real(in.at("sigma_x"), "init.sigma_x");
      if (in.contains("sigma_y")) g.sigma_y = nonnegative_real(in.at("sigma_y"), "init.sigma_y");
      c.init = g;
    } else if (kind == "explicit") {
      if (in.contains("sigma_x") || in.contains("sigma_y")) {
        throw ConfigError("init", "explicit init takes x, y");
      }
      if (!in.contains("x") || !in.contains("y")) throw ConfigError("init", "explicit init needs x and y");
      FactorPair p{mat_from_json(in.at("x"), "init.x"), mat_from_json(in.at("y"), "init.y")};
      if (p.x.cols() != p.y.cols()) throw ConfigError("init.y", "column count differs from init.x");
      c.init = std::move(p);
    } else {
      throw ConfigError("init.kind", "must be \"gaussian\" or \"explicit\"");
    }
  }
  if (j.contains("target")) base.target = target_from_json(j.at("target"));
  return base;
}

ExperimentSetup load_config(const std::filesystem::path& path, ExperimentSetup base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "malformed JSON in " + path.string() + ": " + e.what());
  }
  return apply_config(j, std::move(base));
}

}  // namespace mfnoise
