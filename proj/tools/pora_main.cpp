// Copyright 2026 The PORA Authors
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

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pora/pora.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

struct CommonRiskOptions
{
  double beta{1.5};
  double reaction_time{2.5};
  double decel{3.4};
  double cell_size{0.5};
};

struct OutputOptions
{
  std::string out_dir;
  std::string format{"csv"};
};

void add_risk_options(CLI::App * cmd, CommonRiskOptions & opt)
{
  cmd->add_option("--beta", opt.beta, "Cox adjustment coefficient")->check(CLI::NonNegativeNumber);
  cmd->add_option("--reaction-time", opt.reaction_time, "perception-reaction time [s]");
  cmd->add_option("--decel", opt.decel, "design deceleration rate [m/s^2]");
  cmd->add_option("--cell-size", opt.cell_size, "safety-box grid cell size [m]")
    ->check(CLI::PositiveNumber);
}

void add_output_options(CLI::App * cmd, OutputOptions & opt)
{
  const char * env = std::getenv("PORA_OUT_DIR");
  opt.out_dir = env ? env : "pora_out";
  cmd->add_option("--out", opt.out_dir, "output directory (default $PORA_OUT_DIR or ./pora_out)");
  cmd->add_option("--format", opt.format, "summary format")
    ->check(CLI::IsMember({"csv", "json"}));
}

pora::PoraParams to_pora_params(const CommonRiskOptions & opt)
{
  pora::PoraParams p;
  p.cox.beta = opt.beta;
  p.ssd.reaction_time = opt.reaction_time;
  p.ssd.decel_rate = opt.decel;
  p.cell_size = opt.cell_size;
  return p;
}

void write_manifest(const fs::path & out_dir, const std::string & command, const json & config)
{
  json manifest = {{"command", command}, {"config", config}, {"schema_version", 1}};
  pora::write_text_file((out_dir / "manifest.json").string(), manifest.dump(2) + "\n");
}

fs::path prepare_out_dir(const OutputOptions & opt)
{
  fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  return dir;
}

pora::ScenarioSpec load_scenario_or_family(
  const std::string & scenario_path, const std::string & family, std::uint64_t seed,
  double severity)
{
  if (!scenario_path.empty()) {
    if (!fs::exists(scenario_path)) {
      throw CLI::ValidationError("--scenario", "file not found: " + scenario_path);
    }
    return pora::scenario_from_json(json::parse(pora::read_text_file(scenario_path)));
  }
  if (family.empty()) {
    throw CLI::ValidationError("scenario", "either --scenario or --family is required");
  }
  pora::FamilyParams params;
  params.severity = severity;
  return pora::make_family_scenario(pora::parse_family(family), seed, params);
}

std::string metric_trace_csv(const std::vector<pora::MetricSample> & trace)
{
  std::ostringstream out;
  out << "t,value\n";
  for (const auto & m : trace) {
    out << pora::format_double(m.t) << ',' << pora::format_double(m.value) << '\n';
  }
  return out.str();
}

pora::PlannedTrajectory load_plan_csv(const std::string & path)
{
  const std::string text = pora::read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("plan csv: empty file");
  std::vector<pora::TrajectorySample> samples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = pora::split_csv_line(line);
    if (f.size() < 6) throw std::invalid_argument("plan csv: need t,x,y,heading,vx,vy");
    pora::TrajectorySample s;
    s.t = std::strtod(f[0].c_str(), nullptr);
    s.pose = {std::strtod(f[1].c_str(), nullptr), std::strtod(f[2].c_str(), nullptr),
              std::strtod(f[3].c_str(), nullptr)};
    s.velocity = {std::strtod(f[4].c_str(), nullptr), std::strtod(f[5].c_str(), nullptr)};
    samples.push_back(s);
  }
  return pora::make_planned_trajectory(std::move(samples));
}

std::vector<pora::AgentState> load_agents_csv(const std::string & path)
{
  const std::string text = pora::read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("agents csv: empty file");
  std::vector<pora::AgentState> agents;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = pora::split_csv_line(line);
    if (f.size() < 11) {
      throw std::invalid_argument("agents csv: need t,id,kind,x,y,heading,vx,vy,ax,length,width");
    }
    pora::AgentState a;
    a.id = f[1];
    a.kind = pora::parse_participant_kind(f[2]);
    a.box.center = {std::strtod(f[3].c_str(), nullptr), std::strtod(f[4].c_str(), nullptr),
                    std::strtod(f[5].c_str(), nullptr)};
    a.velocity = {std::strtod(f[6].c_str(), nullptr), std::strtod(f[7].c_str(), nullptr)};
    a.acceleration = std::strtod(f[8].c_str(), nullptr);
    a.box.length = std::strtod(f[9].c_str(), nullptr);
    a.box.width = std::strtod(f[10].c_str(), nullptr);
    agents.push_back(a);
  }
  return agents;
}

pora::Dimensions parse_dims(const std::string & text)
{
  const auto x = text.find('x');
  if (x == std::string::npos) throw std::invalid_argument("dimensions must look like 4.5x1.8");
  return {std::strtod(text.substr(0, x).c_str(), nullptr),
          std::strtod(text.substr(x + 1).c_str(), nullptr)};
}

// ---------------------------------------------------------------------------

int cmd_sim_run(
  const std::string & scenario_path, const std::string & family, std::uint64_t seed,
  double severity, const std::string & metric, const CommonRiskOptions & risk,
  const OutputOptions & output, bool log_trajectory)
{
  const pora::ScenarioSpec spec = load_scenario_or_family(scenario_path, family, seed, severity);
  pora::MetricConfig cfg;
  cfg.metric = pora::parse_metric(metric);
  cfg.pora = to_pora_params(risk);
  cfg.record_trajectory = log_trajectory;
  pora::ControllerPolicy policy;

  const pora::EpisodeReport report = pora::run_episode(spec, cfg, policy);

  const fs::path dir = prepare_out_dir(output);
  pora::write_text_file((dir / "scenario.json").string(), pora::scenario_to_json(spec).dump(2) + "\n");
  pora::write_text_file((dir / "report.json").string(), pora::report_to_json(report).dump(2) + "\n");
  pora::write_text_file((dir / "metric_trace.csv").string(), metric_trace_csv(report.metric_trace));
  if (log_trajectory) {
    pora::write_text_file((dir / "trajectory.csv").string(), pora::trajectory_to_csv(report.trajectory));
  }
  write_manifest(
    dir, "sim run",
    {{"scenario", scenario_path},
     {"family", family},
     {"seed", seed},
     {"severity", severity},
     {"metric", metric},
     {"beta", risk.beta},
     {"reaction_time", risk.reaction_time},
     {"decel", risk.decel},
     {"cell_size", risk.cell_size},
     {"log_trajectory", log_trajectory}});
  std::cout << "outcome=" << (report.outcome == pora::Outcome::Crash ? "crash" : "safe")
            << " conflicts=" << report.conflicts << " return=" << report.total_return << "\n";
  return 0;
}

int cmd_sim_batch(
  const std::string & scenario_path, const std::string & family, std::uint64_t seed,
  double severity, int episodes, const std::string & metric, const CommonRiskOptions & risk,
  const OutputOptions & output, int workers, double penetration)
{
  const pora::ScenarioSpec base = load_scenario_or_family(scenario_path, family, seed, severity);
  std::vector<pora::ScenarioSpec> specs;
  for (int e = 0; e < episodes; ++e) {
    pora::ScenarioSpec s =
      scenario_path.empty()
        ? load_scenario_or_family("", family, pora::mix64(seed + static_cast<std::uint64_t>(e)), severity)
        : base;
    s.seed = pora::mix64(seed + static_cast<std::uint64_t>(e));
    s.av_penetration = penetration;
    specs.push_back(std::move(s));
  }

  pora::MetricConfig cfg;
  cfg.metric = pora::parse_metric(metric);
  cfg.pora = to_pora_params(risk);
  pora::ControllerPolicy policy;

  const auto [reports, summary] = pora::run_batch(specs, cfg, policy, workers);

  const fs::path dir = prepare_out_dir(output);
  json reports_json = json::array();
  for (const auto & r : reports) reports_json.push_back(pora::report_to_json(r, false));
  pora::write_text_file((dir / "reports.json").string(), reports_json.dump(2) + "\n");
  if (output.format == "json") {
    pora::write_text_file((dir / "summary.json").string(), pora::summary_to_json(summary).dump(2) + "\n");
  } else {
    pora::write_text_file((dir / "summary.csv").string(), pora::summary_to_csv(summary));
  }
  write_manifest(
    dir, "sim batch",
    {{"scenario", scenario_path},
     {"family", family},
     {"seed", seed},
     {"severity", severity},
     {"episodes", episodes},
     {"metric", metric},
     {"beta", risk.beta},
     {"reaction_time", risk.reaction_time},
     {"decel", risk.decel},
     {"cell_size", risk.cell_size},
     {"penetration", penetration},
     {"format", output.format}});
  std::cout << "episodes=" << summary.episodes << " avg_conflicts=" << summary.avg_conflicts
            << " collisions_per_100=" << summary.collisions_per_100 << "\n";
  return 0;
}

int cmd_sim_sweep(
  const std::string & scenario_path, const std::string & family, std::uint64_t seed,
  double severity, const std::vector<double> & levels, int episodes_per_level,
  const std::string & metric, const CommonRiskOptions & risk, const OutputOptions & output,
  int workers)
{
  const pora::ScenarioSpec base = load_scenario_or_family(scenario_path, family, seed, severity);
  const auto specs = pora::make_penetration_sweep(base, levels, episodes_per_level);

  pora::MetricConfig cfg;
  cfg.metric = pora::parse_metric(metric);
  cfg.pora = to_pora_params(risk);
  pora::ControllerPolicy policy;

  const fs::path dir = prepare_out_dir(output);
  std::ostringstream csv;
  csv << "penetration,episodes,avg_conflicts,collisions_per_100,avg_return,min_return\n";
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const std::vector<pora::ScenarioSpec> slice(
      specs.begin() + static_cast<std::ptrdiff_t>(li * episodes_per_level),
      specs.begin() + static_cast<std::ptrdiff_t>((li + 1) * episodes_per_level));
    const auto [reports, summary] = pora::run_batch(slice, cfg, policy, workers);
    csv << pora::format_double(levels[li]) << ',' << summary.episodes << ','
        << pora::format_double(summary.avg_conflicts) << ','
        << pora::format_double(summary.collisions_per_100) << ','
        << pora::format_double(summary.avg_return) << ','
        << pora::format_double(summary.min_return) << '\n';
  }
  pora::write_text_file((dir / "sweep.csv").string(), csv.str());
  write_manifest(
    dir, "sim sweep",
    {{"scenario", scenario_path},
     {"family", family},
     {"seed", seed},
     {"severity", severity},
     {"levels", levels},
     {"episodes_per_level", episodes_per_level},
     {"metric", metric}});
  std::cout << "sweep levels=" << levels.size() << " episodes_per_level=" << episodes_per_level
            << "\n";
  return 0;
}

int cmd_risk_eval(
  const std::string & plan_path, const std::vector<std::string> & grid_paths,
  const std::string & agents_path, const std::string & predictor_mode,
  const std::vector<std::string> & dims, const CommonRiskOptions & risk,
  const OutputOptions & output, bool export_fields)
{
  const pora::PlannedTrajectory plan = load_plan_csv(plan_path);

  std::vector<pora::AgentState> agents;
  if (!agents_path.empty()) agents = load_agents_csv(agents_path);

  std::vector<pora::OrientedBox> others;
  for (const auto & a : agents) others.push_back(a.box);
  for (const auto & d : dims) {
    const pora::Dimensions dim = parse_dims(d);
    others.push_back({{0.0, 0.0, 0.0}, dim.length, dim.width});
  }

  std::vector<pora::OccupancyGrid> grids;
  if (predictor_mode == "file") {
    if (grid_paths.size() != plan.samples.size()) {
      throw std::invalid_argument("risk eval: need one grid file per plan sample");
    }
    for (const auto & p : grid_paths) grids.push_back(pora::load_grid(p));
  } else {
    if (agents.empty()) {
      throw std::invalid_argument("risk eval: analytic predictor requires --agents");
    }
    // Span the union of safety-box windows along the plan, with margin.
    pora::PredictorConfig pc;
    pc.horizon_steps = static_cast<int>(plan.samples.size());
    pc.step_dt = plan.samples.size() > 1 ? plan.dt : 0.5;
    double min_x = 1e18, min_y = 1e18, max_x = -1e18, max_y = -1e18;
    for (const auto & s : plan.samples) {
      min_x = std::min(min_x, s.pose.x - 90.0);
      max_x = std::max(max_x, s.pose.x + 90.0);
      min_y = std::min(min_y, s.pose.y - 90.0);
      max_y = std::max(max_y, s.pose.y + 90.0);
    }
    pora::GridSpec spec;
    spec.cell_size = risk.cell_size;
    spec.origin = {min_x, min_y, 0.0};
    spec.cols = static_cast<int>(std::ceil((max_x - min_x) / spec.cell_size));
    spec.rows = static_cast<int>(std::ceil((max_y - min_y) / spec.cell_size));
    const double t0 = plan.samples.front().t - pc.step_dt;
    grids = pora::predict_occupancy(agents, spec, pc, t0);
  }

  if (others.empty()) {
    throw std::invalid_argument("risk eval: supply participant dimensions via --agents or --dims");
  }

  const auto entries =
    pora::pora_trajectory(plan, grids, {4.5, 1.8}, others, to_pora_params(risk));

  const fs::path dir = prepare_out_dir(output);
  std::ostringstream scores;
  scores << "t,score\n";
  for (const auto & e : entries) {
    scores << pora::format_double(e.t) << ',' << pora::format_double(e.score) << '\n';
  }
  pora::write_text_file((dir / "scores.csv").string(), scores.str());

  if (export_fields) {
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const pora::RiskField & f = entries[k].field;
      auto dump_field = [&](const std::string & name, const std::vector<double> & values) {
        if (values.empty()) return;
        pora::OccupancyGrid g = pora::make_grid(f.spec, entries[k].t);
        g.values = values;
        char fname[64];
        std::snprintf(fname, sizeof(fname), "field_k%02zu_%s.csv", k + 1, name.c_str());
        pora::save_grid((dir / fname).string(), g);
      };
      dump_field("p_occ", f.p_occ);
      dump_field("p_coll_given_occ", f.p_coll_given_occ);
      dump_field("p_coll", f.p_coll);
      dump_field("delta_p", f.delta_p);
      dump_field("risk_norm", f.risk_norm);
    }
  }
  write_manifest(
    dir, "risk eval",
    {{"plan", plan_path},
     {"grids", grid_paths},
     {"agents", agents_path},
     {"predictor", predictor_mode},
     {"dims", dims},
     {"beta", risk.beta},
     {"reaction_time", risk.reaction_time},
     {"decel", risk.decel},
     {"cell_size", risk.cell_size},
     {"export_fields", export_fields}});
  std::cout << "steps=" << entries.size() << "\n";
  return 0;
}

int cmd_analyze_correlate(
  int scenarios, std::uint64_t seed, const CommonRiskOptions & risk, const OutputOptions & output,
  int workers)
{
  std::vector<pora::ScenarioSpec> specs;
  for (int i = 0; i < scenarios; ++i) {
    specs.push_back(pora::make_approach_separate_scenario(pora::mix64(seed + static_cast<std::uint64_t>(i))));
  }
  pora::MetricConfig cfg;
  cfg.metric = pora::MetricKind::Pora;
  cfg.pora = to_pora_params(risk);
  cfg.record_all_metrics = true;
  // Inert thresholds keep the scripted kinematics untouched.
  pora::ControllerPolicy inert;
  inert.proceed_below = 1.0;
  inert.brake_above = 1.0;
  const auto [reports, summary] = pora::run_batch(specs, cfg, inert, workers);
  (void)summary;

  std::vector<pora::PairedSeries> traces;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    pora::PairedSeries series;
    series.id = "scenario" + std::to_string(i);
    for (const auto & m : reports[i].pair_distance_trace) series.distance.push_back(m.value);
    for (const auto & m : reports[i].occ_max_trace) series.occupancy.push_back(m.value);
    traces.push_back(std::move(series));
  }
  const pora::CorrelationSummary corr = pora::correlate_delta_p(traces);

  const fs::path dir = prepare_out_dir(output);
  std::ostringstream csv;
  csv << "scenario,n,pearson,spearman,kendall\n";
  for (const auto & sc : corr.per_scenario) {
    csv << sc.id << ',' << sc.n << ',' << pora::format_double(sc.pearson) << ','
        << pora::format_double(sc.spearman) << ',' << pora::format_double(sc.kendall) << '\n';
  }
  pora::write_text_file((dir / "correlation.csv").string(), csv.str());
  const json summary_json = {
    {"pearson", corr.pearson},
    {"spearman", corr.spearman},
    {"kendall", corr.kendall},
    {"scenarios", corr.per_scenario.size()},
    {"excluded", corr.excluded}};
  pora::write_text_file((dir / "correlation_summary.json").string(), summary_json.dump(2) + "\n");
  write_manifest(dir, "analyze correlate", {{"scenarios", scenarios}, {"seed", seed}});
  std::cout << "pearson=" << corr.pearson << " spearman=" << corr.spearman
            << " kendall=" << corr.kendall << "\n";
  return 0;
}

int cmd_analyze_separate(
  int episodes, std::uint64_t seed, int bins, const CommonRiskOptions & risk,
  const OutputOptions & output, int workers)
{
  const pora::ScenarioFamily families[] = {
    pora::ScenarioFamily::Nominal, pora::ScenarioFamily::PedestrianViolation,
    pora::ScenarioFamily::LaneIncursion, pora::ScenarioFamily::BrakeCutin};
  std::vector<pora::ScenarioSpec> specs;
  for (int i = 0; i < episodes; ++i) {
    pora::FamilyParams params;
    params.severity = 0.75;
    specs.push_back(pora::make_family_scenario(
      families[i % 4], pora::mix64(seed + static_cast<std::uint64_t>(i)), params));
  }
  pora::MetricConfig cfg;
  cfg.metric = pora::MetricKind::Pora;
  cfg.pora = to_pora_params(risk);
  cfg.record_all_metrics = true;
  const auto [reports, summary] = pora::run_batch(specs, cfg, pora::ControllerPolicy{}, workers);
  (void)summary;

  // Pool the per-tick metric values of safe vs crash episodes.
  std::vector<double> pora_safe, pora_crash, ttc1_safe, ttc1_crash;
  for (const auto & r : reports) {
    const bool crash = r.outcome == pora::Outcome::Crash;
    for (const auto & m : r.pora_trace) (crash ? pora_crash : pora_safe).push_back(m.value);
    for (const auto & m : r.ttc1_risk_trace) (crash ? ttc1_crash : ttc1_safe).push_back(m.value);
  }
  const pora::SeparationReport sep_pora = pora::kl_separation(pora_safe, pora_crash, bins);
  const pora::SeparationReport sep_ttc1 = pora::kl_separation(ttc1_safe, ttc1_crash, bins);

  const fs::path dir = prepare_out_dir(output);
  std::ostringstream csv;
  csv << "bin_lo,bin_hi,pora_safe,pora_crash,ttc1_safe,ttc1_crash\n";
  for (int b = 0; b < bins; ++b) {
    csv << pora::format_double(static_cast<double>(b) / bins) << ','
        << pora::format_double(static_cast<double>(b + 1) / bins) << ','
        << pora::format_double(sep_pora.safe_hist[static_cast<std::size_t>(b)]) << ','
        << pora::format_double(sep_pora.crash_hist[static_cast<std::size_t>(b)]) << ','
        << pora::format_double(sep_ttc1.safe_hist[static_cast<std::size_t>(b)]) << ','
        << pora::format_double(sep_ttc1.crash_hist[static_cast<std::size_t>(b)]) << '\n';
  }
  pora::write_text_file((dir / "histograms.csv").string(), csv.str());
  auto sep_json = [](const pora::SeparationReport & s) {
    json j = {{"kl", s.kl}, {"bins", s.bins}};
    if (s.proceed_below) j["proceed_below"] = *s.proceed_below;
    if (s.brake_above) j["brake_above"] = *s.brake_above;
    return j;
  };
  const json out_json = {
    {"pora", sep_json(sep_pora)},
    {"ttc1", sep_json(sep_ttc1)},
    {"episodes", reports.size()},
    {"crashes", pora_crash.size()}};
  pora::write_text_file((dir / "separation.json").string(), out_json.dump(2) + "\n");
  write_manifest(
    dir, "analyze separate", {{"episodes", episodes}, {"seed", seed}, {"bins", bins}});
  std::cout << "kl_pora=" << sep_pora.kl << " kl_ttc1=" << sep_ttc1.kl << "\n";
  return 0;
}

int cmd_analyze_calibrate(
  const std::string & mode, int episodes, std::uint64_t seed, double beta_min, double beta_max,
  double beta_step, const CommonRiskOptions & risk, const OutputOptions & output, int workers)
{
  std::vector<double> grid;
  for (double b = beta_min; b <= beta_max + 1e-12; b += beta_step) grid.push_back(b);

  const fs::path dir = prepare_out_dir(output);
  json result;

  if (mode == "sim") {
    std::vector<pora::ScenarioSpec> base;
    base.push_back(pora::make_family_scenario(pora::ScenarioFamily::BrakeCutin, seed));
    base.push_back(pora::make_family_scenario(pora::ScenarioFamily::LaneIncursion, seed + 1));
    pora::MetricConfig cfg;
    cfg.pora = to_pora_params(risk);
    const pora::BetaSimCalibration cal =
      pora::calibrate_beta_sim(base, grid, episodes, cfg, pora::ControllerPolicy{}, workers);
    std::ostringstream csv;
    csv << "beta,cost,collisions_per_100,avg_conflicts\n";
    for (const auto & p : cal.table) {
      csv << pora::format_double(p.beta) << ',' << pora::format_double(p.cost) << ','
          << pora::format_double(p.collisions_per_100) << ','
          << pora::format_double(p.avg_conflicts) << '\n';
    }
    pora::write_text_file((dir / "calibration_table.csv").string(), csv.str());
    result = {{"mode", "sim"}, {"beta", cal.beta}};
  } else if (mode == "labeled") {
    // Build labeled crash scenarios with the simulator: crash episodes give
    // the collision time; risk traces are re-evaluated per grid beta.
    std::vector<pora::LabeledRiskTraces> labeled;
    int tried = 0;
    for (int i = 0; static_cast<int>(labeled.size()) < episodes && tried < 40 * episodes; ++i, ++tried) {
      pora::FamilyParams params;
      params.severity = 1.0;
      pora::ScenarioSpec spec = pora::make_family_scenario(
        pora::ScenarioFamily::BrakeCutin, pora::mix64(seed + static_cast<std::uint64_t>(i)), params);
      pora::MetricConfig cfg;
      cfg.metric = pora::MetricKind::Ttc2;  // passive controller; let crashes happen
      cfg.pora = to_pora_params(risk);
      cfg.record_all_metrics = true;
      pora::ControllerPolicy inert;
      inert.proceed_below = 1.0;
      inert.brake_above = 1.0;
      pora::EpisodeReport rep = pora::run_episode(spec, cfg, inert);
      if (rep.outcome != pora::Outcome::Crash || rep.pora_trace.size() < 3) continue;
      pora::LabeledRiskTraces traces;
      traces.id = "crash" + std::to_string(labeled.size());
      traces.collision_step = rep.pora_trace.size() - 1;
      for (double beta : grid) {
        pora::MetricConfig cfg_b = cfg;
        cfg_b.pora.cox.beta = beta;
        pora::EpisodeReport rb = pora::run_episode(spec, cfg_b, inert);
        std::vector<double> trace;
        for (const auto & m : rb.pora_trace) trace.push_back(m.value);
        traces.risk_per_beta.push_back(std::move(trace));
      }
      labeled.push_back(std::move(traces));
    }
    if (labeled.empty()) throw std::runtime_error("calibrate labeled: no crash scenarios found");
    const pora::BetaCalibration cal = pora::calibrate_beta_labeled(labeled, grid);
    result = {
      {"mode", "labeled"},
      {"beta", cal.beta},
      {"feasible", cal.feasible},
      {"objective", cal.objective},
      {"violation", cal.violation},
      {"scenarios", labeled.size()}};
  } else {
    throw CLI::ValidationError("--mode", "must be labeled or sim");
  }

  pora::write_text_file((dir / "calibration.json").string(), result.dump(2) + "\n");
  write_manifest(
    dir, "analyze calibrate",
    {{"mode", mode},
     {"episodes", episodes},
     {"seed", seed},
     {"beta_min", beta_min},
     {"beta_max", beta_max},
     {"beta_step", beta_step}});
  std::cout << "beta=" << result["beta"] << "\n";
  return 0;
}

int cmd_bench(
  const std::vector<std::string> & windows, int reps, const OutputOptions & output)
{
  std::vector<std::pair<int, int>> sizes;
  for (const auto & w : windows) {
    const auto x = w.find('x');
    if (x == std::string::npos) throw CLI::ValidationError("--window", "expected ROWSxCOLS");
    sizes.emplace_back(std::stoi(w.substr(0, x)), std::stoi(w.substr(x + 1)));
  }
  if (sizes.empty()) sizes.emplace_back(30, 40);

  const auto rows = pora::bench_latency(sizes, reps);

  const fs::path dir = prepare_out_dir(output);
  std::ostringstream csv;
  csv << "component,rows,cols,median_ms,p95_ms\n";
  for (const auto & r : rows) {
    csv << r.component << ',' << r.rows << ',' << r.cols << ','
        << pora::format_double(r.median_ms) << ',' << pora::format_double(r.p95_ms) << '\n';
  }
  pora::write_text_file((dir / "latency.csv").string(), csv.str());
  write_manifest(dir, "bench", {{"windows", windows}, {"reps", reps}});
  for (const auto & r : rows) {
    std::cout << r.component << " " << r.rows << "x" << r.cols << " median_ms=" << r.median_ms
              << " p95_ms=" << r.p95_ms << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"PORA collision-risk engine and Monte Carlo harness"};
  app.require_subcommand(1);

  // shared option storage
  std::string scenario_path, family, metric{"pora"}, plan_path, agents_path, predictor_mode{"file"};
  std::string calibrate_mode{"sim"};
  std::uint64_t seed = 1;
  double severity = 0.5, penetration = 0.0;
  int episodes = 100, episodes_per_level = 20, workers = 0, bins = 50, scenarios = 30, reps = 1000;
  double beta_min = 0.0, beta_max = 5.0, beta_step = 0.25;
  std::vector<double> levels{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<std::string> grid_paths, dims, windows;
  bool log_trajectory = false, export_fields = false;
  CommonRiskOptions risk;
  OutputOptions output;

  CLI::App * sim = app.add_subcommand("sim", "seeded traffic simulation");
  CLI::App * sim_run = sim->add_subcommand("run", "run one episode");
  sim_run->add_option("--scenario", scenario_path, "scenario JSON file");
  sim_run->add_option("--family", family, "scenario family template");
  sim_run->add_option("--seed", seed, "scenario seed");
  sim_run->add_option("--severity", severity, "family severity in [0,1]");
  sim_run->add_option("--metric", metric)->check(CLI::IsMember({"pora", "ttc1", "ttc2"}));
  sim_run->add_flag("--log-trajectory", log_trajectory, "write per-tick trajectory CSV");
  add_risk_options(sim_run, risk);
  add_output_options(sim_run, output);

  CLI::App * sim_batch = sim->add_subcommand("batch", "run a seeded batch");
  sim_batch->add_option("--scenario", scenario_path);
  sim_batch->add_option("--family", family);
  sim_batch->add_option("--seed", seed);
  sim_batch->add_option("--severity", severity);
  sim_batch->add_option("--episodes", episodes)->check(CLI::PositiveNumber);
  sim_batch->add_option("--metric", metric)->check(CLI::IsMember({"pora", "ttc1", "ttc2"}));
  sim_batch->add_option("--workers", workers, "0 = available parallelism");
  sim_batch->add_option("--penetration", penetration)->check(CLI::Range(0.0, 1.0));
  add_risk_options(sim_batch, risk);
  add_output_options(sim_batch, output);

  CLI::App * sim_sweep = sim->add_subcommand("sweep", "penetration sweep");
  sim_sweep->add_option("--scenario", scenario_path);
  sim_sweep->add_option("--family", family);
  sim_sweep->add_option("--seed", seed);
  sim_sweep->add_option("--severity", severity);
  sim_sweep->add_option("--levels", levels, "penetration levels");
  sim_sweep->add_option("--episodes-per-level", episodes_per_level)->check(CLI::PositiveNumber);
  sim_sweep->add_option("--metric", metric)->check(CLI::IsMember({"pora", "ttc1", "ttc2"}));
  sim_sweep->add_option("--workers", workers);
  add_risk_options(sim_sweep, risk);
  add_output_options(sim_sweep, output);

  CLI::App * risk_cmd = app.add_subcommand("risk", "risk evaluation");
  CLI::App * risk_eval = risk_cmd->add_subcommand("eval", "score a trajectory against grids");
  risk_eval->add_option("--plan", plan_path, "plan CSV (t,x,y,heading,vx,vy)")->required();
  risk_eval->add_option("--grid", grid_paths, "grid file per timestep (CSV or JSON)");
  risk_eval->add_option("--agents", agents_path, "agent state CSV (trajectory-log format)");
  risk_eval->add_option("--predictor", predictor_mode)->check(CLI::IsMember({"analytic", "file"}));
  risk_eval->add_option("--dims", dims, "participant dimensions LxW used for the safety box");
  risk_eval->add_flag("--export-fields", export_fields, "write per-step risk fields");
  add_risk_options(risk_eval, risk);
  add_output_options(risk_eval, output);

  CLI::App * analyze = app.add_subcommand("analyze", "statistical analyses");
  CLI::App * corr = analyze->add_subcommand("correlate", "occupancy-change vs distance-change");
  corr->add_option("--scenarios", scenarios)->check(CLI::PositiveNumber);
  corr->add_option("--seed", seed);
  corr->add_option("--workers", workers);
  add_risk_options(corr, risk);
  add_output_options(corr, output);

  CLI::App * sep = analyze->add_subcommand("separate", "safe/crash KL separation");
  sep->add_option("--episodes", episodes)->check(CLI::PositiveNumber);
  sep->add_option("--seed", seed);
  sep->add_option("--bins", bins)->check(CLI::Range(2, 1000));
  sep->add_option("--workers", workers);
  add_risk_options(sep, risk);
  add_output_options(sep, output);

  CLI::App * cal = analyze->add_subcommand("calibrate", "beta calibration");
  cal->add_option("--mode", calibrate_mode)->check(CLI::IsMember({"labeled", "sim"}));
  cal->add_option("--episodes", episodes)->check(CLI::PositiveNumber);
  cal->add_option("--seed", seed);
  cal->add_option("--beta-min", beta_min);
  cal->add_option("--beta-max", beta_max);
  cal->add_option("--beta-step", beta_step)->check(CLI::PositiveNumber);
  cal->add_option("--workers", workers);
  add_risk_options(cal, risk);
  add_output_options(cal, output);

  CLI::App * bench_sub = analyze->add_subcommand("bench", "latency benchmark");
  CLI::App * bench_top = app.add_subcommand("bench", "latency benchmark");
  for (CLI::App * b : {bench_sub, bench_top}) {
    b->add_option("--window", windows, "window geometry ROWSxCOLS");
    b->add_option("--reps", reps)->check(CLI::Range(100, 1000000));
    add_output_options(b, output);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim_run->parsed()) {
      return cmd_sim_run(
        scenario_path, family, seed, severity, metric, risk, output, log_trajectory);
    }
    if (sim_batch->parsed()) {
      return cmd_sim_batch(
        scenario_path, family, seed, severity, episodes, metric, risk, output, workers,
        penetration);
    }
    if (sim_sweep->parsed()) {
      return cmd_sim_sweep(
        scenario_path, family, seed, severity, levels, episodes_per_level, metric, risk, output,
        workers);
    }
    if (risk_eval->parsed()) {
      return cmd_risk_eval(
        plan_path, grid_paths, agents_path, predictor_mode, dims, risk, output, export_fields);
    }
    if (corr->parsed()) return cmd_analyze_correlate(scenarios, seed, risk, output, workers);
    if (sep->parsed()) return cmd_analyze_separate(episodes, seed, bins, risk, output, workers);
    if (cal->parsed()) {
      return cmd_analyze_calibrate(
        calibrate_mode, episodes, seed, beta_min, beta_max, beta_step, risk, output, workers);
    }
    if (bench_sub->parsed() || bench_top->parsed()) return cmd_bench(windows, reps, output);
    std::cerr << app.help();
    return 2;
  } catch (const CLI::ValidationError & e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument & e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
