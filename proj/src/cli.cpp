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

#include "mfnoise/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfnoise/errors.hpp"
#include "mfnoise/landscape.hpp"
#include "mfnoise/optimize.hpp"
#include "mfnoise/presets.hpp"
#include "mfnoise/serialize.hpp"
#include "mfnoise/sweep.hpp"
#include "mfnoise/verify.hpp"

namespace mfnoise {

using nlohmann::json;

namespace {

class UsageError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Writes to `path`, or to `fallback` when path is empty or "-".
void emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw UsageError("cannot open output file " + path);
  write(file);
  if (!file) throw UsageError("failed writing output file " + path);
}

std::size_t default_jobs() {
  if (const char* env = std::getenv("MFNOISE_JOBS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Flags shared by run, sweep and phase for building an ExperimentSetup.
struct SetupFlags {
  std::string preset;
  std::string config;
  double eta_x = 0.0;
  double eta_y = 0.0;
  std::uint64_t horizon = 0;
  std::uint64_t stride = 0;
  CLI::Option* eta_x_opt = nullptr;
  CLI::Option* eta_y_opt = nullptr;
  CLI::Option* horizon_opt = nullptr;
  CLI::Option* stride_opt = nullptr;

  void attach(CLI::App* app, const std::string& default_preset) {
    preset = default_preset;
    app->add_option("--preset", preset, "Named experiment preset")->capture_default_str();
    app->add_option("--config", config, "JSON config overlaid on the preset");
    eta_x_opt = app->add_option("--eta-x", eta_x, "Step size for X")->check(CLI::PositiveNumber);
    eta_y_opt = app->add_option("--eta-y", eta_y, "Step size for Y")->check(CLI::PositiveNumber);
    horizon_opt = app->add_option("--horizon", horizon, "Number of iterations");
    stride_opt = app->add_option("--stride", stride, "Record every N iterations")
                     ->check(CLI::PositiveNumber);
  }

  // preset < config file < flags
  ExperimentSetup resolve(const ExperimentPreset** preset_out = nullptr) const {
    ExperimentSetup setup;
    const ExperimentPreset* p = nullptr;
    if (!preset.empty()) {
      p = &find_preset(preset);
      setup = ExperimentSetup{p->target, p->config};
    } else {
      setup = default_setup();
    }
    if (!config.empty()) setup = load_config(config, std::move(setup));
    if (eta_x_opt->count()) setup.config.eta_x = eta_x;
    if (eta_y_opt->count()) setup.config.eta_y = eta_y;
    if (horizon_opt->count()) setup.config.horizon = horizon;
    if (stride_opt->count()) setup.config.record_stride = stride;
    setup.config.validate();
    if (preset_out) *preset_out = p;
    return setup;
  }
};

NoiseConfig parse_noise(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--noise expects s1,s2");
  try {
    std::size_t used1 = 0, used2 = 0;
    const std::string a = text.substr(0, comma);
    const std::string b = text.substr(comma + 1);
    NoiseConfig n{std::stod(a, &used1), std::stod(b, &used2)};
    if (used1 != a.size() || used2 != b.size()) throw UsageError("--noise expects s1,s2");
    if (!(n.sigma1 >= 0.0) || !(n.sigma2 >= 0.0)) throw UsageError("--noise values must be >= 0");
    return n;
  } catch (const std::logic_error&) {
    throw UsageError("--noise expects two numbers, got '" + text + "'");
  }
}

json spectrum_json(const HessianReport& r) {
  json j{{"lambda_min", r.lambda_min},
         {"lambda_max", r.lambda_max},
         {"zero_tol", r.zero_tol},
         {"num_zero_modes", r.num_zero_modes},
         {"num_negative", r.num_negative},
         {"eigenvalues", r.eigenvalues}};
  j["effective_condition_number"] = std::isfinite(r.effective_condition_number)
                                        ? json(r.effective_condition_number)
                                        : json(nullptr);
  return j;
}

json landscape_report(const std::vector<double>& alphas, const std::string& at_path,
                      const std::optional<NoiseConfig>& noise, std::size_t d1, std::size_t d2,
                      double zero_tol) {
  json report{{"schema_version", kSchemaVersion}};
  std::optional<FactorPair> at;
  if (!at_path.empty()) {
    std::ifstream in(at_path);
    if (!in) throw ConfigError("", "cannot open " + at_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("", std::string("malformed JSON in ") + at_path + ": " + e.what());
    }
    at = factor_pair_from_json(j);
    d1 = at->d1();
    d2 = at->d2();
  }
  const GroundTruth gt = GroundTruth::rank1(d1, d2);
  report["d1"] = d1;
  report["d2"] = d2;
  if (noise) report["noise"] = json{{"sigma1", noise->sigma1}, {"sigma2", noise->sigma2}};

  json alpha_rows = json::array();
  for (const double alpha : alphas) {
    const FactorPair p{scaled(Mat::column(gt.u_star()), alpha),
                       scaled(Mat::column(gt.v_star()), 1.0 / alpha)};
    json row = spectrum_json(hessian_spectrum(p, gt, noise, zero_tol));
    row["alpha"] = alpha;
    row["formula"] = condition_number_formula(alpha);
    alpha_rows.push_back(std::move(row));
  }
  if (!alpha_rows.empty()) report["alpha"] = std::move(alpha_rows);

  if (at) {
    json a;
    const NoiseConfig n = noise.value_or(NoiseConfig{});
    a["loss"] = loss(*at, gt);
    a["smoothed_loss"] = smoothed_loss(*at, gt, n);
    const auto cls = classify_stationary(*at, gt, noise);
    a["classification"] = std::string(to_string(cls.tag));
    json residuals = json::object();
    for (const auto& [k, v] : cls.residuals) residuals[k] = std::isfinite(v) ? json(v) : json(nullptr);
    a["residuals"] = residuals;
    if (at->rank() == 1) a["spectrum"] = spectrum_json(hessian_spectrum(*at, gt, noise, zero_tol));
    report["at"] = std::move(a);
  }

  if (noise && noise->active()) {
    try {
      const auto opt = smoothed_optima_rank1(*noise, gt);
      report["smoothed_optima"] = json{{"alpha1", opt.alpha1},
                                       {"alpha2", opt.alpha2},
                                       {"gamma", noise_gamma(*noise, d1, d2)},
                                       {"total_variance", noise->total_variance(d1)}};
    } catch (const DegenerateNoise& e) {
      report["smoothed_optima"] = json{{"error", e.what()}};
    }
  }
  return report;
}

void write_phase_csv(std::ostream& out, const Trajectory& pgd, const Trajectory& gd, double decay) {
  std::vector<double> pgd_loss, gd_loss;
  for (const auto& r : pgd.records) pgd_loss.push_back(r.loss);
  for (const auto& r : gd.records) gd_loss.push_back(r.loss);
  const auto pgd_ema = ema(pgd_loss, decay);
  const auto gd_ema = ema(gd_loss, decay);
  out << "t,pgd_loss,pgd_loss_ema,pgd_ratio_sq,pgd_overlap,gd_loss,gd_loss_ema,gd_ratio_sq,gd_overlap\n";
  for (std::size_t i = 0; i < pgd.records.size(); ++i) {
    const auto& a = pgd.records[i];
    const auto& b = gd.records[i];
    out << a.t << ',' << format_real(a.loss) << ',' << format_real(pgd_ema[i]) << ','
        << format_real(a.ratio_sq) << ',' << format_real(a.overlap) << ',' << format_real(b.loss)
        << ',' << format_real(gd_ema[i]) << ',' << format_real(b.ratio_sq) << ','
        << format_real(b.overlap) << '\n';
  }
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Perturbed gradient descent for nonconvex matrix factorization", "mfnoise"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Run one trajectory and write diagnostics");
  SetupFlags run_flags;
  run_flags.attach(run_cmd, "fig2a");
  std::uint64_t run_seed = 0;
  auto* run_seed_opt = run_cmd->add_option("--seed", run_seed, "PRNG seed");
  std::string run_out, run_format = "csv";
  run_cmd->add_option("--out", run_out, "Output path (default stdout)");
  run_cmd->add_option("--format", run_format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Repeat a preset over derived seeds and summarize");
  SetupFlags sweep_flags;
  sweep_flags.attach(sweep_cmd, "fig2a");
  std::uint64_t master_seed = 0;
  std::size_t repeats = 0;
  std::size_t jobs = default_jobs();
  std::string sweep_out, sweep_format = "json";
  sweep_cmd->add_option("--master-seed", master_seed, "Master seed")->capture_default_str();
  auto* repeats_opt = sweep_cmd->add_option("--repeats", repeats, "Number of runs (default: preset)");
  sweep_cmd->add_option("--jobs", jobs, "Worker threads (default: MFNOISE_JOBS or core count)")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sweep_out, "Output path (default stdout)");
  sweep_cmd->add_option("--format", sweep_format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  // landscape
  auto* land_cmd = app.add_subcommand("landscape", "Hessian spectra, conditioning and smoothed optima");
  std::vector<double> alphas;
  std::string at_path, noise_text, land_out;
  std::size_t land_d1 = 20, land_d2 = 30;
  double zero_tol = 1e-8;
  land_cmd->add_option("--alpha", alphas, "Report at (alpha u*, v*/alpha); repeatable");
  land_cmd->add_option("--at", at_path, "JSON factor pair {\"x\": [[..]], \"y\": [[..]]}");
  land_cmd->add_option("--noise", noise_text, "Per-entry noise stds s1,s2");
  land_cmd->add_option("--d1", land_d1)->capture_default_str()->check(CLI::PositiveNumber);
  land_cmd->add_option("--d2", land_d2)->capture_default_str()->check(CLI::PositiveNumber);
  land_cmd->add_option("--zero-tol", zero_tol)->capture_default_str()->check(CLI::PositiveNumber);
  land_cmd->add_option("--out", land_out, "Output path (default stdout)");

  // phase
  auto* phase_cmd = app.add_subcommand("phase", "PGD vs GD from the same start, with loss EMA");
  SetupFlags phase_flags;
  phase_flags.attach(phase_cmd, "phase2d");
  std::uint64_t phase_seed = 1;
  double decay = 0.99;
  std::string phase_out, phase_format = "csv";
  phase_cmd->add_option("--seed", phase_seed)->capture_default_str();
  phase_cmd->add_option("--ema-decay", decay)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  phase_cmd->add_option("--out", phase_out, "Output path (default stdout)");
  phase_cmd->add_option("--format", phase_format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Run the numerical oracle suite");
  std::uint64_t verify_seed = 0;
  std::string verify_out;
  verify_cmd->add_option("--seed", verify_seed)->capture_default_str();
  verify_cmd->add_option("--out", verify_out, "Output path (default stdout)");

  // list-presets
  auto* list_cmd = app.add_subcommand("list-presets", "Print the preset registry");
  std::string list_format = "text";
  list_cmd->add_option("--format", list_format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) {
      ExperimentSetup setup = run_flags.resolve();
      if (run_seed_opt->count()) setup.config.seed = run_seed;
      const Trajectory traj = run(setup.config, setup.target.build());
      emit(run_out, out, [&](std::ostream& os) {
        if (run_format == "csv") {
          write_trajectory_csv(os, traj);
        } else {
          json j = to_json(traj);
          j["target"] = to_json(setup)["target"];
          os << j.dump(2) << '\n';
        }
      });
    } else if (*sweep_cmd) {
      const ExperimentPreset* preset = nullptr;
      const ExperimentSetup setup = sweep_flags.resolve(&preset);
      if (!repeats_opt->count()) repeats = preset ? preset->repeats : 100;
      const SweepSummary summary = run_sweep(setup, sweep_flags.preset, repeats, master_seed, jobs);
      emit(sweep_out, out, [&](std::ostream& os) {
        if (sweep_format == "json") {
          os << to_json(summary).dump(2) << '\n';
          return;
        }
        os << "index,seed";
        for (const auto& c : kTrajectoryColumns) os << ',' << c;
        os << '\n';
        for (const auto& row : summary.rows) {
          std::ostringstream line;
          Trajectory one;
          one.records.push_back(row.final);
          write_trajectory_csv(line, one);
          const std::string text = line.str();
          const auto body = text.substr(text.find('\n') + 1);
          os << row.index << ',' << row.seed << ',' << body;
        }
      });
    } else if (*land_cmd) {
      std::optional<NoiseConfig> noise;
      if (!noise_text.empty()) noise = parse_noise(noise_text);
      if (alphas.empty() && at_path.empty()) alphas = {0.25, 0.5, 1.0, 2.0, 4.0};
      const json report = landscape_report(alphas, at_path, noise, land_d1, land_d2, zero_tol);
      emit(land_out, out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
    } else if (*phase_cmd) {
      ExperimentSetup setup = phase_flags.resolve();
      setup.config.seed = phase_seed;
      const GroundTruth gt = setup.target.build();
      RunConfig pgd_cfg = setup.config;
      pgd_cfg.algorithm = Algorithm::kPerturbedGD;
      RunConfig gd_cfg = setup.config;
      gd_cfg.algorithm = Algorithm::kGD;
      const Trajectory pgd = run(pgd_cfg, gt);
      const Trajectory gd = run(gd_cfg, gt);
      emit(phase_out, out, [&](std::ostream& os) {
        if (phase_format == "csv") {
          write_phase_csv(os, pgd, gd, decay);
          return;
        }
        std::vector<double> pgd_loss;
        for (const auto& r : pgd.records) pgd_loss.push_back(r.loss);
        json j{{"schema_version", kSchemaVersion},
               {"ema_decay", decay},
               {"pgd", to_json(pgd)},
               {"gd", to_json(gd)},
               {"pgd_loss_ema", ema(pgd_loss, decay)}};
        os << j.dump(2) << '\n';
      });
    } else if (*verify_cmd) {
      const auto reports = run_verification_suite(verify_seed);
      const json j = reports_to_json(reports);
      emit(verify_out, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
      for (const auto& r : reports) {
        if (!r.passed) err << "FAILED " << r.name << ": " << r.detail << '\n';
      }
      if (!j.at("all_passed").get<bool>()) return kExitVerification;
    } else if (*list_cmd) {
      if (list_format == "json") {
        json arr = json::array();
        for (const auto& p : preset_registry()) {
          arr.push_back(json{{"name", p.name},
                             {"figure_ref", p.figure_ref},
                             {"repeats", p.repeats},
                             {"setup", to_json(ExperimentSetup{p.target, p.config})}});
        }
        out << json{{"schema_version", kSchemaVersion}, {"presets", arr}}.dump(2) << '\n';
      } else {
        for (const auto& p : preset_registry()) {
          out << p.name << "\t" << p.target.describe() << "\t"
              << (p.config.algorithm == Algorithm::kGD ? "gd" : "pgd") << "\teta=("
              << p.config.eta_x << "," << p.config.eta_y << ")\tT=" << p.config.horizon
              << "\trepeats=" << p.repeats << "\t" << p.figure_ref << '\n';
        }
      }
    }
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace mfnoise
