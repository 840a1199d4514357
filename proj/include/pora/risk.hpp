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

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pora/core.hpp"
#include "pora/grid.hpp"

namespace pora
{

struct SsdParams
{
  double reaction_time{2.5};  // [s]
  double decel_rate{3.4};     // [m/s^2]
};

/// Stopping sight distance for a speed given in km/h:
/// reaction-time travel plus braking distance at the design deceleration.
inline double stopping_sight_distance(double speed_kmh, const SsdParams & p)
{
  if (p.reaction_time < 0.0 || p.decel_rate <= 0.0) {
    throw std::invalid_argument("ssd: reaction_time >= 0 and decel_rate > 0 required");
  }
  return 0.278 * speed_kmh * p.reaction_time +
         speed_kmh * speed_kmh / ((254.0 / 9.81) * p.decel_rate);
}

/// Outer region where occupancy threatens the ego, and the inner subarea
/// where occupancy guarantees contact. Axes follow the anchor heading; the
/// subarea is centered on the ego body center, while the outer box extends
/// further forward by the stopping distance.
struct SafetyBox
{
  double width{0.0};        // outer box, across heading
  double length{0.0};       // outer box, along heading (includes SSD)
  double sub_length{0.0};   // guaranteed-collision subarea, along heading
  double sub_width{0.0};    // guaranteed-collision subarea, across heading
  Pose2 anchor;             // ego body-center pose
  double rear_extent{0.0};  // anchor to the rear edge of the outer box
};

inline SafetyBox build_safety_box(
  const OrientedBox & av, double av_speed_kmh, const std::vector<OrientedBox> & others,
  const SsdParams & p)
{
  if (others.empty()) throw std::invalid_argument("safety box: no surrounding participants");

  double max_len = 0.0;
  double min_wid = others.front().width;
  for (const OrientedBox & o : others) {
    max_len = std::max(max_len, o.length);
    min_wid = std::min(min_wid, o.width);
  }

  SafetyBox box;
  box.width = av.width + max_len;
  box.length = av.length + max_len + stopping_sight_distance(av_speed_kmh, p);
  box.sub_length = av.length + min_wid;
  box.sub_width = av.width + min_wid;
  box.anchor = av.center;
  // Braking only extends the box forward; behind the ego we keep half the
  // largest participant length as margin.
  box.rear_extent = 0.5 * av.length + 0.5 * max_len;
  return box;
}

/// Grid spec covering the safety box, axis-aligned with the anchor heading.
/// Columns run along the heading. The ceil-padded slack is split evenly so
/// the grid stays centered on the box.
inline GridSpec safety_box_window(const SafetyBox & box, double cell_size)
{
  if (cell_size <= 0.0) throw std::invalid_argument("safety box window: cell_size must be > 0");
  GridSpec spec;
  spec.cell_size = cell_size;
  spec.cols = static_cast<int>(std::ceil(box.length / cell_size - 1e-9));
  spec.rows = static_cast<int>(std::ceil(box.width / cell_size - 1e-9));
  const double pad_s = 0.5 * (spec.cols * cell_size - box.length);
  const double pad_t = 0.5 * (spec.rows * cell_size - box.width);
  const Vec2 corner =
    local_to_world(box.anchor, {-box.rear_extent - pad_s, -0.5 * box.width - pad_t});
  spec.origin = {corner.x, corner.y, box.anchor.heading};
  return spec;
}

/// AV-centered heatmap: the global grid translated, rotated, resampled, and
/// trimmed to the safety-box window.
inline OccupancyGrid extract_av_centered(
  const OccupancyGrid & global, const SafetyBox & box, double cell_size)
{
  return resample_window(global, safety_box_window(box, cell_size));
}

/// Conditional collision probability per cell:
///   1 inside the guaranteed subarea, 0 outside the outer box, and a linear
///   falloff in between. The falloff distance is normalized per axis from the
///   subarea edge to the outer edge and combined by maximum, so the weight is
///   constant on rectangular rings.
inline OccupancyGrid collision_given_occupancy(const SafetyBox & box, const GridSpec & spec)
{
  if (!spec.same_geometry(safety_box_window(box, spec.cell_size), 1e-6)) {
    throw std::invalid_argument("collision_given_occupancy: spec does not match the safety box");
  }

  const double fwd_extent = box.length - box.rear_extent;
  const double half_sub_l = 0.5 * box.sub_length;
  const double half_sub_w = 0.5 * box.sub_width;
  const double half_w = 0.5 * box.width;

  auto axis_falloff = [](double excess, double span) {
    if (excess <= 0.0) return 0.0;
    return span > 0.0 ? excess / span : 1.0;
  };

  OccupancyGrid out = make_grid(spec);
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      const Vec2 local = world_to_local(box.anchor, cell_center_world(spec, r, c));
      const double s = local.x;  // along heading, from the ego center
      const double t = local.y;

      const bool in_outer = s >= -box.rear_extent && s <= fwd_extent && std::abs(t) <= half_w;
      if (!in_outer) continue;  // stays 0

      if (std::abs(s) <= half_sub_l && std::abs(t) <= half_sub_w) {
        out.at(r, c) = 1.0;
        continue;
      }

      const double d_s = s >= 0.0 ? axis_falloff(s - half_sub_l, fwd_extent - half_sub_l)
                                  : axis_falloff(-s - half_sub_l, box.rear_extent - half_sub_l);
      const double d_t = axis_falloff(std::abs(t) - half_sub_w, half_w - half_sub_w);
      out.at(r, c) = std::clamp(1.0 - std::max(d_s, d_t), 0.0, 1.0);
    }
  }
  return out;
}

struct CoxParams
{
  double beta{1.5};
};

/// Cox-model risk update, normalized back into [0, 1]:
///   k = 1     -> the collision probability unchanged;
///   otherwise -> P(C) * exp(beta * (dP - 1)).
inline std::vector<double> cox_adjust(
  const std::vector<double> & p_coll, const std::vector<double> & delta_p, const CoxParams & cox,
  int step_index)
{
  if (cox.beta < 0.0) throw std::invalid_argument("cox: beta must be non-negative");
  if (p_coll.size() != delta_p.size()) throw std::invalid_argument("cox: field size mismatch");
  if (step_index == 1) return p_coll;

  std::vector<double> out(p_coll.size());
  for (std::size_t i = 0; i < p_coll.size(); ++i) {
    out[i] = p_coll[i] * std::exp(cox.beta * (delta_p[i] - 1.0));
  }
  return out;
}

/// Per-cell fields over the safety-box window for one timestep.
struct RiskField
{
  GridSpec spec;
  std::vector<double> p_occ;              // P(O)
  std::vector<double> p_coll_given_occ;   // P(C|O)
  std::vector<double> p_coll;             // P(C)
  std::vector<double> delta_p;            // P_k(O) - P_{k-1}(O); zero at k=1
  std::vector<double> risk_norm;          // normalized adjusted risk
};

struct PoraParams
{
  SsdParams ssd{};
  CoxParams cox{};
  double cell_size{0.5};
};

struct PoraStepResult
{
  double score{0.0};
  RiskField field;
};

/// One PORA evaluation at planned step k (1-based).
///
/// Both timesteps' global grids are resampled into the *current* step's
/// safety-box window, so the per-cell difference is taken at fixed indices in
/// the ego frame; that difference is what stands in for relative motion.
inline PoraStepResult pora_step(
  const OccupancyGrid * global_prev, const OccupancyGrid & global_curr, const OrientedBox & av,
  const Velocity2 & av_velocity, const std::vector<OrientedBox> & others, const PoraParams & params,
  int step_index)
{
  if (step_index < 1) throw std::invalid_argument("pora_step: step index is 1-based");
  if (step_index > 1 && global_prev && global_prev->t >= global_curr.t) {
    throw std::invalid_argument("pora_step: previous grid must precede the current one");
  }
  if (others.empty()) return {};  // no participants, no risk

  const SafetyBox box = build_safety_box(av, speed_kmh(av_velocity), others, params.ssd);
  const GridSpec window = safety_box_window(box, params.cell_size);

  RiskField field;
  field.spec = window;
  field.p_occ = resample_window(global_curr, window).values;
  field.p_coll_given_occ = collision_given_occupancy(box, window).values;

  const std::size_t n = field.p_occ.size();
  field.p_coll.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    field.p_coll[i] = field.p_coll_given_occ[i] * field.p_occ[i];
  }

  field.delta_p.assign(n, 0.0);
  if (step_index > 1) {
    if (!global_prev) throw std::invalid_argument("pora_step: missing previous grid for k > 1");
    const std::vector<double> prev = resample_window(*global_prev, window).values;
    for (std::size_t i = 0; i < n; ++i) field.delta_p[i] = field.p_occ[i] - prev[i];
  }

  field.risk_norm = cox_adjust(field.p_coll, field.delta_p, params.cox, step_index);

  double score = 0.0;
  for (double v : field.risk_norm) score = std::max(score, v);
  return {score, std::move(field)};
}

struct PoraTrajectoryEntry
{
  double t{0.0};
  double score{0.0};
  RiskField field;
};

/// PORA along a planned trajectory; grid k pairs with plan sample k and the
/// first step uses the unadjusted branch.
inline std::vector<PoraTrajectoryEntry> pora_trajectory(
  const PlannedTrajectory & plan, const std::vector<OccupancyGrid> & grids,
  const Dimensions & av_dims, const std::vector<OrientedBox> & others, const PoraParams & params)
{
  if (grids.size() != plan.samples.size()) {
    throw std::invalid_argument("pora_trajectory: one grid per plan sample required");
  }
  for (std::size_t k = 0; k < grids.size(); ++k) {
    if (std::abs(grids[k].t - plan.samples[k].t) > 1e-6) {
      throw std::invalid_argument("pora_trajectory: grid/plan timestamps misaligned");
    }
  }

  std::vector<PoraTrajectoryEntry> out;
  out.reserve(grids.size());
  for (std::size_t k = 0; k < grids.size(); ++k) {
    const TrajectorySample & sample = plan.samples[k];
    const OrientedBox av{sample.pose, av_dims.length, av_dims.width};
    const OccupancyGrid * prev = k > 0 ? &grids[k - 1] : nullptr;
    PoraStepResult step = pora_step(
      prev, grids[k], av, sample.velocity, others, params, static_cast<int>(k) + 1);
    out.push_back({sample.t, step.score, std::move(step.field)});
  }
  return out;
}

}  // namespace pora
