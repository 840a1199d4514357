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

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pora/risk.hpp"
#include "pora/rng.hpp"
#include "pora/sim.hpp"
#include "pora/stats.hpp"

namespace pora
{

// ---------------------------------------------------------------------------
// Beta calibration from labeled collision scenarios

struct LabeledRiskTraces
{
  std::string id;
  // risk_per_beta[b][k]: trajectory risk score at step k evaluated with the
  // b-th beta of the calibration grid
  std::vector<std::vector<double>> risk_per_beta;
  std::size_t collision_step{0};  // index of the known collision time
};

struct BetaCalibration
{
  double beta{0.0};
  bool feasible{false};
  double objective{0.0};  // mean risk at the collision time (feasible case)
  double violation{0.0};  // total constraint violation (infeasible case)
};

/// Grid search for the beta that maximizes the risk at the known collision
/// time, subject to the collision time carrying the trajectory maximum in
/// every scenario. If no grid point is feasible, returns the one minimizing
/// the total peak-misplacement violation and reports infeasibility.
inline BetaCalibration calibrate_beta_labeled(
  const std::vector<LabeledRiskTraces> & scenarios, const std::vector<double> & beta_grid)
{
  if (scenarios.empty()) throw std::invalid_argument("calibrate: empty scenario set");
  if (beta_grid.empty()) throw std::invalid_argument("calibrate: empty beta grid");

  BetaCalibration best_feasible;
  best_feasible.objective = -1.0;
  BetaCalibration best_infeasible;
  best_infeasible.violation = std::numeric_limits<double>::infinity();

  for (std::size_t b = 0; b < beta_grid.size(); ++b) {
    double objective = 0.0;
    double violation = 0.0;
    bool feasible = true;
    for (const LabeledRiskTraces & sc : scenarios) {
      if (b >= sc.risk_per_beta.size()) {
        throw std::invalid_argument("calibrate: scenario lacks a trace for every beta");
      }
      const std::vector<double> & trace = sc.risk_per_beta[b];
      if (sc.collision_step >= trace.size()) {
        throw std::invalid_argument("calibrate: collision step outside the horizon");
      }
      const double at_collision = trace[sc.collision_step];
      objective += at_collision;
      for (double r : trace) {
        if (r > at_collision) {
          feasible = false;
          violation += r - at_collision;
        }
      }
    }
    objective /= static_cast<double>(scenarios.size());

    if (feasible && objective > best_feasible.objective) {
      best_feasible = {beta_grid[b], true, objective, 0.0};
    }
    if (!feasible && violation < best_infeasible.violation) {
      best_infeasible = {beta_grid[b], false, objective, violation};
    }
  }
  return best_feasible.objective >= 0.0 ? best_feasible : best_infeasible;
}

/// Default calibration grid: 0 to 5 in steps of 0.05.
inline std::vector<double> default_beta_grid()
{
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(0.05 * i);
  return grid;
}

// ---------------------------------------------------------------------------
// Beta calibration through simulation

struct BetaSimPoint
{
  double beta{0.0};
  double cost{0.0};  // collisions/100 ep + 0.1 * avg episode conflicts
  double collisions_per_100{0.0};
  double avg_conflicts{0.0};
};

struct BetaSimCalibration
{
  double beta{0.0};
  std::vector<BetaSimPoint> table;
};

/// Evaluates the collision cost of the PORA threshold controller over a
/// seeded batch for every beta on the grid; smallest cost wins, ties to the
/// smaller beta.
inline BetaSimCalibration calibrate_beta_sim(
  const std::vector<ScenarioSpec> & base_specs, const std::vector<double> & beta_grid,
  int episodes_per_beta, MetricConfig cfg, const ControllerPolicy & policy, int workers = 0)
{
  if (base_specs.empty()) throw std::invalid_argument("calibrate sim: empty base specs");
  if (beta_grid.empty()) throw std::invalid_argument("calibrate sim: empty beta grid");
  if (episodes_per_beta < 1) throw std::invalid_argument("calibrate sim: episodes must be >= 1");

  std::vector<ScenarioSpec> specs;
  for (int e = 0; e < episodes_per_beta; ++e) {
    ScenarioSpec s = base_specs[static_cast<std::size_t>(e) % base_specs.size()];
    s.seed = mix64(s.seed ^ mix64(static_cast<std::uint64_t>(e) + 0x5eedULL));
    specs.push_back(std::move(s));
  }

  cfg.metric = MetricKind::Pora;
  BetaSimCalibration out;
  double best_cost = std::numeric_limits<double>::infinity();
  for (double beta : beta_grid) {
    cfg.pora.cox.beta = beta;
    const auto [reports, summary] = run_batch(specs, cfg, policy, workers);
    BetaSimPoint point;
    point.beta = beta;
    point.collisions_per_100 = summary.collisions_per_100;
    point.avg_conflicts = summary.avg_conflicts;
    point.cost = summary.collisions_per_100 + 0.1 * summary.avg_conflicts;
    out.table.push_back(point);
    if (point.cost < best_cost) {
      best_cost = point.cost;
      out.beta = beta;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Occupancy-change vs relative-motion correlation

struct PairedSeries
{
  std::string id;
  std::vector<double> distance;  // center-to-center distance per timestep
  std::vector<double> occupancy; // window max occupancy per timestep
};

struct ScenarioCorrelation
{
  std::string id;
  int n{0};
  double pearson{0.0};
  double spearman{0.0};
  double kendall{0.0};
};

struct CorrelationSummary
{
  std::vector<ScenarioCorrelation> per_scenario;
  std::vector<std::string> excluded;  // degenerate (zero-variance) scenarios
  double pearson{0.0};
  double spearman{0.0};
  double kendall{0.0};
};

/// Correlates per-timestep changes of the center distance against changes of
/// the window occupancy maximum, then aggregates across scenarios with n-3
/// weights (Fisher z for Pearson/Spearman, weighted mean for Kendall).
inline CorrelationSummary correlate_delta_p(const std::vector<PairedSeries> & traces)
{
  CorrelationSummary summary;
  std::vector<double> pearsons, spearmans, kendalls, weights;

  for (const PairedSeries & trace : traces) {
    if (trace.distance.size() != trace.occupancy.size() || trace.distance.size() < 5) {
      throw std::invalid_argument("correlate: series need >= 5 aligned samples");
    }
    std::vector<double> dx, dy;
    for (std::size_t i = 1; i < trace.distance.size(); ++i) {
      dx.push_back(trace.distance[i] - trace.distance[i - 1]);
      dy.push_back(trace.occupancy[i] - trace.occupancy[i - 1]);
    }
    const int n = static_cast<int>(dx.size());
    if (n < 4) {
      summary.excluded.push_back(trace.id);
      continue;
    }
    ScenarioCorrelation sc;
    sc.id = trace.id;
    sc.n = n;
    try {
      sc.pearson = pearson(dx, dy);
      sc.spearman = spearman(dx, dy);
      sc.kendall = kendall(dx, dy);
    } catch (const std::invalid_argument &) {
      summary.excluded.push_back(trace.id);
      continue;
    }
    summary.per_scenario.push_back(sc);
    pearsons.push_back(sc.pearson);
    spearmans.push_back(sc.spearman);
    kendalls.push_back(sc.kendall);
    weights.push_back(static_cast<double>(n - 3));
  }

  if (summary.per_scenario.empty()) {
    throw std::invalid_argument("correlate: every scenario was degenerate");
  }
  summary.pearson = fisher_z_aggregate(pearsons, weights);
  summary.spearman = fisher_z_aggregate(spearmans, weights);
  summary.kendall = weighted_mean(kendalls, weights);
  return summary;
}

// ---------------------------------------------------------------------------
// Safe/crash separation

struct SeparationReport
{
  int bins{50};
  std::vector<double> safe_hist;   // smoothed, normalized
  std::vector<double> crash_hist;  // smoothed, normalized
  double kl{0.0};                  // KL(crash || safe), nats
  std::optional<double> proceed_below;
  std::optional<double> brake_above;
};

/// Histograms both sample sets over [0, 1], Laplace-smooths, and reports
/// KL(crash || safe) plus threshold suggestions read off the densities.
inline SeparationReport kl_separation(
  const std::vector<double> & safe_samples, const std::vector<double> & crash_samples, int bins = 50)
{
  if (safe_samples.empty() || crash_samples.empty()) {
    throw std::invalid_argument("separation: both sample sets must be non-empty");
  }
  SeparationReport rep;
  rep.bins = bins;
  rep.safe_hist = laplace_normalize(histogram_unit(safe_samples, bins));
  rep.crash_hist = laplace_normalize(histogram_unit(crash_samples, bins));
  rep.kl = kl_divergence(rep.crash_hist, rep.safe_hist);

  // Largest edge below which safe density dominates throughout.
  int lo = 0;
  while (lo < bins && rep.safe_hist[static_cast<std::size_t>(lo)] >
                        rep.crash_hist[static_cast<std::size_t>(lo)]) {
    ++lo;
  }
  if (lo > 0) rep.proceed_below = static_cast<double>(lo) / bins;

  // Smallest edge above which crash density dominates throughout.
  int hi = bins;
  while (hi > 0 && rep.crash_hist[static_cast<std::size_t>(hi - 1)] >
                     rep.safe_hist[static_cast<std::size_t>(hi - 1)]) {
    --hi;
  }
  if (hi < bins) rep.brake_above = static_cast<double>(hi) / bins;
  return rep;
}

// ---------------------------------------------------------------------------
// Latency benchmark

struct LatencyRow
{
  std::string component;
  int rows{0};
  int cols{0};
  double median_ms{0.0};
  double p95_ms{0.0};
};

/// Wall-clock timing of the three per-step PORA stages on synthetic data:
/// window extraction for both timesteps (crop+rotate), the collision map
/// multiply against the precomputed conditional field, and the Cox adjustment
/// with max reduction.
inline std::vector<LatencyRow> bench_latency(
  const std::vector<std::pair<int, int>> & window_sizes, int repetitions)
{
  if (repetitions < 100) throw std::invalid_argument("bench: need at least 100 repetitions");

  using clock = std::chrono::steady_clock;
  std::vector<LatencyRow> out;

  for (const auto & [rows, cols] : window_sizes) {
    const double cell = 0.5;
    Rng rng(20240901u, static_cast<std::uint64_t>(rows * 10007 + cols));

    // Global field with random occupancy; ego rotated so the crop resamples.
    GridSpec global_spec;
    global_spec.origin = {-60.0, -60.0, 0.0};
    global_spec.cell_size = cell;
    global_spec.rows = 240;
    global_spec.cols = 240;
    OccupancyGrid global_prev = make_grid(global_spec, 0.0);
    OccupancyGrid global_curr = make_grid(global_spec, 0.5);
    for (double & v : global_prev.values) v = rng.uniform();
    for (double & v : global_curr.values) v = rng.uniform();

    SafetyBox box;
    box.width = rows * cell;
    box.length = cols * cell;
    box.sub_length = 5.0;
    box.sub_width = 2.4;
    box.rear_extent = 5.0;
    box.anchor = {2.0, -1.5, 0.5};
    const GridSpec window = safety_box_window(box, cell);
    const OccupancyGrid cgo = collision_given_occupancy(box, window);
    const CoxParams cox{1.5};

    std::vector<double> t_crop, t_map, t_cox;
    t_crop.reserve(repetitions);
    t_map.reserve(repetitions);
    t_cox.reserve(repetitions);

    for (int rep = 0; rep < repetitions; ++rep) {
      auto t0 = clock::now();
      const OccupancyGrid h_prev = resample_window(global_prev, window);
      const OccupancyGrid h_curr = resample_window(global_curr, window);
      auto t1 = clock::now();
      std::vector<double> p_coll(h_curr.values.size());
      for (std::size_t i = 0; i < p_coll.size(); ++i) {
        p_coll[i] = cgo.values[i] * h_curr.values[i];
      }
      auto t2 = clock::now();
      std::vector<double> delta(h_curr.values.size());
      for (std::size_t i = 0; i < delta.size(); ++i) {
        delta[i] = h_curr.values[i] - h_prev.values[i];
      }
      const std::vector<double> adjusted = cox_adjust(p_coll, delta, cox, 2);
      double score = 0.0;
      for (double v : adjusted) score = std::max(score, v);
      auto t3 = clock::now();
      if (score > 2.0) throw std::logic_error("bench: unreachable");  // keep the work alive

      const auto ms = [](auto d) { return std::chrono::duration<double, std::milli>(d).count(); };
      t_crop.push_back(ms(t1 - t0));
      t_map.push_back(ms(t2 - t1));
      t_cox.push_back(ms(t3 - t2));
    }

    out.push_back({"crop_rotate", rows, cols, median(t_crop), percentile(t_crop, 95.0)});
    out.push_back({"collision_map", rows, cols, median(t_map), percentile(t_map, 95.0)});
    out.push_back({"cox_reduce", rows, cols, median(t_cox), percentile(t_cox, 95.0)});
  }
  return out;
}

}  // namespace pora
