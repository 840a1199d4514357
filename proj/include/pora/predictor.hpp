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

enum class MotionModel { ConstantVelocity, ConstantAcceleration };

struct PredictorConfig
{
  int horizon_steps{6};      // K
  double step_dt{0.5};       // [s]
  double position_sigma0{0.1};   // [m] uncertainty at k=0
  double sigma_growth{0.15};     // [m/s] uncertainty growth rate
  MotionModel motion_model{MotionModel::ConstantVelocity};
  std::optional<OccupancyGrid> drivable_mask;  // >0.5 means drivable

  void validate() const
  {
    if (horizon_steps < 1) throw std::invalid_argument("predictor: horizon_steps must be >= 1");
    if (step_dt <= 0.0) throw std::invalid_argument("predictor: step_dt must be positive");
    if (position_sigma0 < 0.0 || sigma_growth < 0.0) {
      throw std::invalid_argument("predictor: sigma parameters must be non-negative");
    }
  }
};

namespace detail
{

/// Body center advected by dt under the configured motion model.
inline Vec2 advected_center(const AgentState & a, double dt, MotionModel model)
{
  Vec2 c = a.box.center.position() + Vec2{a.velocity.vx, a.velocity.vy} * dt;
  if (model == MotionModel::ConstantAcceleration) {
    c = c + a.box.center.forward() * (0.5 * a.acceleration * dt * dt);
  }
  return c;
}

/// Peak cell probability for a body of the given half extent whose center
/// position is Gaussian with sigma_pos: the value of the footprint indicator
/// convolved with the position density, evaluated at the mean (per axis).
inline double occupancy_peak(double half_extent, double sigma_pos)
{
  if (sigma_pos <= 0.0) return 1.0;
  return std::erf(half_extent / (std::sqrt(2.0) * sigma_pos));
}

/// Stamp one agent's probability blob into the grid by noisy-or.
/// Gaussian in the agent frame, sized footprint-half-extent plus positional
/// uncertainty, with the peak given by the convolution value above: near 1
/// while the position is well known, decaying as uncertainty grows.
inline void stamp_blob(
  OccupancyGrid & g, const Vec2 & center, double heading, double sigma_along,
  double sigma_across, double amplitude, const OccupancyGrid * mask)
{
  const double cell = g.spec.cell_size;
  const double reach = 3.0 * std::max(sigma_along, sigma_across);

  const auto [rc, cc] = world_to_cell(g.spec, {center.x, center.y, 0.0});
  const int r_lo = std::max(0, static_cast<int>(std::floor(rc - reach / cell)) - 1);
  const int r_hi = std::min(g.spec.rows - 1, static_cast<int>(std::ceil(rc + reach / cell)) + 1);
  const int c_lo = std::max(0, static_cast<int>(std::floor(cc - reach / cell)) - 1);
  const int c_hi = std::min(g.spec.cols - 1, static_cast<int>(std::ceil(cc + reach / cell)) + 1);

  const double ch = std::cos(heading);
  const double sh = std::sin(heading);
  for (int r = r_lo; r <= r_hi; ++r) {
    for (int c = c_lo; c <= c_hi; ++c) {
      if (mask && mask->at(r, c) <= 0.5) continue;
      const Vec2 w = cell_center_world(g.spec, r, c);
      const double dx = w.x - center.x;
      const double dy = w.y - center.y;
      const double da = (ch * dx + sh * dy) / sigma_along;
      const double dc = (-sh * dx + ch * dy) / sigma_across;
      const double r2 = da * da + dc * dc;
      if (r2 > 9.0) continue;  // 3-sigma truncation
      const double p = std::min(1.0, amplitude * std::exp(-0.5 * r2));
      double & v = g.at(r, c);
      v = 1.0 - (1.0 - v) * (1.0 - p);
    }
  }
}

}  // namespace detail

/// Analytic occupancy predictor: advects every agent footprint under the
/// motion model and rasterizes it as a truncated Gaussian blob; agents
/// combine per cell by noisy-or. Grid k carries timestamp t0 + k*step_dt.
inline std::vector<OccupancyGrid> predict_occupancy(
  const std::vector<AgentState> & agents, const GridSpec & spec, const PredictorConfig & cfg,
  double t0 = 0.0)
{
  cfg.validate();
  if (cfg.drivable_mask && !cfg.drivable_mask->spec.same_geometry(spec)) {
    throw std::invalid_argument("predictor: drivable mask spec mismatch");
  }
  for (const AgentState & a : agents) {
    if (!agent_state_finite(a)) throw std::invalid_argument("predictor: non-finite agent state");
  }

  std::vector<OccupancyGrid> out;
  out.reserve(cfg.horizon_steps);
  for (int k = 1; k <= cfg.horizon_steps; ++k) {
    const double dt = k * cfg.step_dt;
    OccupancyGrid g = make_grid(spec, t0 + dt);
    for (const AgentState & a : agents) {
      const double sigma_pos = cfg.position_sigma0 + cfg.sigma_growth * dt;
      const double sigma_along = 0.5 * a.box.length + sigma_pos;
      const double sigma_across = 0.5 * a.box.width + sigma_pos;
      // A cell counts as occupied when the footprint touches it, so each
      // half extent is dilated by half a cell.
      const double dilation = 0.5 * spec.cell_size;
      const double amplitude =
        detail::occupancy_peak(0.5 * a.box.length + dilation, sigma_pos) *
        detail::occupancy_peak(0.5 * a.box.width + dilation, sigma_pos);
      const OccupancyGrid * mask =
        (cfg.drivable_mask && a.kind != ParticipantKind::Pedestrian) ? &*cfg.drivable_mask
                                                                     : nullptr;
      detail::stamp_blob(
        g, detail::advected_center(a, dt, cfg.motion_model), a.box.center.heading, sigma_along,
        sigma_across, amplitude, mask);
    }
    out.push_back(std::move(g));
  }
  return out;
}

/// Binary rasterization of current agent bodies: 1 where a cell center lies
/// inside any oriented box.
inline OccupancyGrid ground_truth_grid(
  const std::vector<AgentState> & agents, const GridSpec & spec, double t = 0.0)
{
  OccupancyGrid g = make_grid(spec, t);
  for (const AgentState & a : agents) {
    // Limit the scan to the box's bounding cells.
    double min_r = g.spec.rows, max_r = -1, min_c = g.spec.cols, max_c = -1;
    for (const Vec2 & corner : box_corners(a.box)) {
      const auto [r, c] = world_to_cell(spec, {corner.x, corner.y, 0.0});
      min_r = std::min(min_r, r);
      max_r = std::max(max_r, r);
      min_c = std::min(min_c, c);
      max_c = std::max(max_c, c);
    }
    const int r_lo = std::max(0, static_cast<int>(std::floor(min_r)) - 1);
    const int r_hi = std::min(spec.rows - 1, static_cast<int>(std::ceil(max_r)) + 1);
    const int c_lo = std::max(0, static_cast<int>(std::floor(min_c)) - 1);
    const int c_hi = std::min(spec.cols - 1, static_cast<int>(std::ceil(max_c)) + 1);
    for (int r = r_lo; r <= r_hi; ++r) {
      for (int c = c_lo; c <= c_hi; ++c) {
        if (point_in_box(a.box, cell_center_world(spec, r, c))) g.at(r, c) = 1.0;
      }
    }
  }
  return g;
}

}  // namespace pora
