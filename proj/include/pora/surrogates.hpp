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
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pora/core.hpp"

namespace pora
{

struct TtcResult
{
  std::optional<double> value;  // [s]; empty when no collision is predicted
  std::pair<std::string, std::string> pair_ids;
};

/// First-order time-to-collision: bumper gap over closing speed, both
/// projected onto the follower's heading axis. Restricted to lead-follow
/// geometry: a leader outside the follower's width corridor yields none, so
/// lateral conflicts are invisible to this measure.
inline TtcResult ttc1(const AgentState & follower, const AgentState & leader)
{
  TtcResult res;
  res.pair_ids = {follower.id, leader.id};

  const Vec2 axis = follower.box.center.forward();
  const Vec2 offset = leader.box.center.position() - follower.box.center.position();
  const double lateral = offset.dot(follower.box.center.left());
  if (std::abs(lateral) > 0.5 * (follower.box.width + leader.box.width)) return res;

  const double gap = offset.dot(axis) - 0.5 * (follower.box.length + leader.box.length);
  const double closing =
    (follower.velocity.vx - leader.velocity.vx) * axis.x +
    (follower.velocity.vy - leader.velocity.vy) * axis.y;

  if (gap > 0.0 && closing > 0.0) res.value = gap / closing;
  return res;
}

namespace detail
{

/// Fixed steering wheel, steady pedal: heading rotates at the constant yaw
/// rate while the longitudinal speed ramps at the constant acceleration.
/// Braking clamps the speed at zero (the body stops instead of reversing).
struct BallisticState
{
  Pose2 pose0;
  double speed0;   // signed longitudinal speed
  double accel;
  double yaw_rate;
  double t_stop;   // time at which the speed reaches zero, +inf if never

  explicit BallisticState(const AgentState & a)
  : pose0(a.box.center),
    speed0(a.velocity.vx * std::cos(a.box.center.heading) +
           a.velocity.vy * std::sin(a.box.center.heading)),
    accel(a.acceleration),
    yaw_rate(a.yaw_rate),
    t_stop(std::numeric_limits<double>::infinity())
  {
    if (accel != 0.0 && speed0 != 0.0 && std::signbit(accel) != std::signbit(speed0)) {
      t_stop = -speed0 / accel;
    }
  }

  Pose2 pose_at(double t) const
  {
    if (t > t_stop) t = t_stop;  // frozen once stopped
    const double theta0 = pose0.heading;
    const double theta = theta0 + yaw_rate * t;
    const double s = speed0 + accel * t;
    double dx, dy;
    if (std::abs(yaw_rate) < 1e-9) {
      const double dist = speed0 * t + 0.5 * accel * t * t;
      dx = dist * std::cos(theta0);
      dy = dist * std::sin(theta0);
    } else {
      const double w = yaw_rate;
      dx = (s * std::sin(theta) - speed0 * std::sin(theta0)) / w +
           accel / (w * w) * (std::cos(theta) - std::cos(theta0));
      dy = -(s * std::cos(theta) - speed0 * std::cos(theta0)) / w +
           accel / (w * w) * (std::sin(theta) - std::sin(theta0));
    }
    return {pose0.x + dx, pose0.y + dy, normalize_angle(theta)};
  }
};

}  // namespace detail

/// Second-order time-to-collision: propagate both bodies under constant
/// acceleration and yaw rate, scan for the first oriented-box overlap at dt
/// resolution, then bisect the bracket down to 1e-4 s.
inline TtcResult ttc2(const AgentState & a, const AgentState & b, double dt, double horizon)
{
  if (dt <= 0.0 || horizon <= 0.0) throw std::invalid_argument("ttc2: dt and horizon must be > 0");

  TtcResult res;
  res.pair_ids = {a.id, b.id};

  const detail::BallisticState sa(a);
  const detail::BallisticState sb(b);
  auto overlap_at = [&](double t) {
    const OrientedBox box_a{sa.pose_at(t), a.box.length, a.box.width};
    const OrientedBox box_b{sb.pose_at(t), b.box.length, b.box.width};
    return obb_overlap(box_a, box_b);
  };

  double lo = 0.0;
  double hit = -1.0;
  for (double t = dt; t <= horizon + 0.5 * dt; t += dt) {
    const double tt = std::min(t, horizon);
    if (overlap_at(tt)) {
      hit = tt;
      break;
    }
    lo = tt;
  }
  if (hit < 0.0) return res;

  // Refine well past the 1e-4 contract so the value is also stable under
  // rigid transforms of the inputs.
  while (hit - lo > 1e-9) {
    const double mid = 0.5 * (lo + hit);
    if (overlap_at(mid)) {
      hit = mid;
    } else {
      lo = mid;
    }
  }
  res.value = hit;
  return res;
}

/// Minimum second-order TTC between the ego and any other participant.
inline TtcResult min_ttc2_over_agents(
  const AgentState & ego, const std::vector<AgentState> & others, double dt, double horizon)
{
  TtcResult best;
  best.pair_ids = {ego.id, ""};
  for (const AgentState & other : others) {
    TtcResult r = ttc2(ego, other, dt, horizon);
    if (r.value && (!best.value || *r.value < *best.value)) best = r;
  }
  return best;
}

/// Minimum first-order TTC between the ego and any other participant.
inline TtcResult min_ttc1_over_agents(const AgentState & ego, const std::vector<AgentState> & others)
{
  TtcResult best;
  best.pair_ids = {ego.id, ""};
  for (const AgentState & other : others) {
    TtcResult r = ttc1(ego, other);
    if (r.value && (!best.value || *r.value < *best.value)) best = r;
  }
  return best;
}

}  // namespace pora
