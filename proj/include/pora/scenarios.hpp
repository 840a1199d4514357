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

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pora/rng.hpp"
#include "pora/sim.hpp"

namespace pora
{

struct FamilyParams
{
  double severity{0.5};  // 0 = benign timing/margins, 1 = worst case
  int n_background{4};
  double ego_desired_speed{13.0};
};

namespace detail
{

/// Background vehicles scattered ahead of the ego with seeded gaps and speeds.
inline void add_background_traffic(
  ScenarioSpec & spec, Rng & rng, int count, double s_from, double s_to, double speed_lo,
  double speed_hi)
{
  const int lanes = static_cast<int>(spec.road.lanes.size());
  std::vector<double> last_s(static_cast<std::size_t>(lanes), s_from);
  for (int i = 0; i < count; ++i) {
    AgentSpawn a;
    a.id = "veh" + std::to_string(i + 1);
    a.kind = rng.uniform() < 0.2 ? ParticipantKind::Truck : ParticipantKind::Car;
    a.lane = static_cast<int>(rng.below(static_cast<std::uint64_t>(lanes)));
    double & cursor = last_s[static_cast<std::size_t>(a.lane)];
    cursor += rng.uniform(25.0, (s_to - s_from) / std::max(1, count / lanes));
    a.s0 = cursor;
    a.speed0 = rng.uniform(speed_lo, speed_hi);
    a.desired_speed = rng.uniform(speed_lo, speed_hi);
    spec.agents.push_back(a);
  }
}

}  // namespace detail

/// Seeded scenario instance for one of the rare-event families (or nominal
/// traffic). The severity knob tightens the event timing and margins.
inline ScenarioSpec make_family_scenario(
  ScenarioFamily family, std::uint64_t seed, const FamilyParams & params = {})
{
  Rng rng(seed, 0xfa111);
  ScenarioSpec spec;
  spec.seed = seed;
  spec.family = family;
  spec.duration = 40.0;
  spec.tick_dt = 0.1;

  const bool highway = family == ScenarioFamily::BrakeCutin;
  const double ego_speed = highway ? 25.0 : params.ego_desired_speed;
  spec.road = make_straight_road(2, highway ? 900.0 : 500.0);
  spec.speed_limit = highway ? 33.0 : 16.0;

  spec.ego.id = "ego";
  spec.ego.kind = ParticipantKind::Car;
  spec.ego.lane = 0;
  spec.ego.s0 = 20.0;
  spec.ego.speed0 = ego_speed;
  spec.ego.desired_speed = ego_speed;

  switch (family) {
    case ScenarioFamily::Nominal: {
      detail::add_background_traffic(
        spec, rng, params.n_background, spec.ego.s0 + 45.0, 420.0, 0.7 * ego_speed,
        1.05 * ego_speed);
      break;
    }
    case ScenarioFamily::PedestrianViolation: {
      detail::add_background_traffic(
        spec, rng, std::max(1, params.n_background - 2), spec.ego.s0 + 120.0, 420.0,
        0.8 * ego_speed, 1.05 * ego_speed);
      // Mid-block crossing timed against the ego's nominal arrival: the
      // walker reaches the ego lane slightly early, so a non-reacting
      // controller meets it while a braking one lets it pass.
      const double walk_speed = rng.uniform(1.2, 2.0);
      const double cross_x = spec.ego.s0 + rng.uniform(70.0, 130.0);
      const double start_y = 5.5;
      const double t_arrive = (cross_x - spec.ego.s0) / ego_speed;
      const double t_walk = start_y / walk_speed;
      const double early = rng.uniform(-0.4, 0.8) + (1.0 - params.severity) * rng.uniform(0.5, 2.5);
      AgentSpawn ped;
      ped.id = "ped1";
      ped.kind = ParticipantKind::Pedestrian;
      ped.lane = -1;
      ped.free_pose = {cross_x, start_y, -kPi / 2.0};
      ped.speed0 = 0.0;
      ped.desired_speed = 0.0;
      ped.script.push_back(
        {BehaviorEvent::Type::SetSpeed, std::max(0.0, t_arrive - t_walk - early), walk_speed, 0.0, 0});
      spec.agents.push_back(ped);
      break;
    }
    case ScenarioFamily::LaneIncursion: {
      detail::add_background_traffic(
        spec, rng, std::max(1, params.n_background - 2), spec.ego.s0 + 150.0, 440.0,
        0.8 * ego_speed, 1.05 * ego_speed);
      const double headway = rng.uniform(6.0, 18.0) * (1.0 - 0.6 * params.severity);
      AgentSpawn cutter;
      cutter.id = "cutter";
      cutter.kind = ParticipantKind::Car;
      cutter.lane = 1;
      cutter.s0 = spec.ego.s0 + default_dimensions(cutter.kind).length + headway;
      cutter.speed0 = ego_speed * rng.uniform(0.85, 0.95);
      cutter.desired_speed = cutter.speed0;
      cutter.script.push_back(
        {BehaviorEvent::Type::LaneChange, rng.uniform(2.0, 6.0), 0.0, rng.uniform(1.2, 2.2), 0});
      spec.agents.push_back(cutter);
      break;
    }
    case ScenarioFamily::BrakeCutin: {
      detail::add_background_traffic(
        spec, rng, std::max(1, params.n_background - 2), spec.ego.s0 + 220.0, 800.0,
        0.8 * ego_speed, 1.02 * ego_speed);
      const double t_cut = rng.uniform(2.0, 5.0);
      const double cut_duration = rng.uniform(1.0, 1.8);
      const double decel = 3.0 + 5.0 * params.severity + rng.uniform(-0.5, 0.5);
      AgentSpawn cutter;
      cutter.id = "cutter";
      cutter.kind = ParticipantKind::Car;
      cutter.lane = 1;
      cutter.s0 = spec.ego.s0 + rng.uniform(18.0, 30.0) * (1.0 - 0.4 * params.severity) +
                  default_dimensions(cutter.kind).length;
      cutter.speed0 = ego_speed * rng.uniform(0.95, 1.05);
      cutter.desired_speed = cutter.speed0;
      cutter.script.push_back({BehaviorEvent::Type::LaneChange, t_cut, 0.0, cut_duration, 0});
      cutter.script.push_back(
        {BehaviorEvent::Type::Brake, t_cut + cut_duration + 0.3, decel, rng.uniform(1.5, 2.5), 0});
      spec.agents.push_back(cutter);
      break;
    }
  }
  return spec;
}

/// Two-vehicle scenario for the occupancy-change correlation study. The ego
/// drives slowly so its safety-box window is short, and the partner's gap
/// oscillates through the window-edge band, where the window occupancy is
/// most sensitive to distance. Longitudinal jitter keeps the series from
/// being deterministic.
inline ScenarioSpec make_approach_separate_scenario(std::uint64_t seed)
{
  Rng rng(seed, 0xc0441);
  ScenarioSpec spec;
  spec.seed = seed;
  spec.family = ScenarioFamily::Nominal;
  spec.duration = 36.0;
  spec.tick_dt = 0.1;
  spec.road = make_straight_road(2, 400.0);
  spec.speed_limit = 30.0;
  spec.accel_noise = 0.4;

  const double ego_speed = rng.uniform(4.0, 6.0);
  spec.ego.id = "ego";
  spec.ego.lane = 0;
  spec.ego.s0 = 10.0;
  spec.ego.speed0 = ego_speed;
  spec.ego.desired_speed = ego_speed;

  AgentSpawn lead;
  lead.id = "lead";
  lead.kind = ParticipantKind::Car;
  // A quarter of the scenarios put the partner in the adjacent lane so the
  // geometry is not purely longitudinal.
  lead.lane = rng.uniform() < 0.25 ? 1 : 0;
  lead.s0 = spec.ego.s0 + rng.uniform(18.0, 30.0);
  lead.speed0 = ego_speed - rng.uniform(1.2, 2.2);
  lead.desired_speed = lead.speed0;
  bool closing = true;
  for (double t = rng.uniform(4.5, 7.5); t < spec.duration; t += rng.uniform(4.5, 7.5)) {
    closing = !closing;
    const double target = ego_speed + (closing ? -1.0 : 1.0) * rng.uniform(1.2, 2.2);
    lead.script.push_back({BehaviorEvent::Type::SetSpeed, t, target, 0.0, 0});
  }
  spec.agents.push_back(lead);
  return spec;
}

}  // namespace pora
