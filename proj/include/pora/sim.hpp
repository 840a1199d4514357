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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pora/core.hpp"
#include "pora/grid.hpp"
#include "pora/predictor.hpp"
#include "pora/risk.hpp"
#include "pora/rng.hpp"
#include "pora/surrogates.hpp"

namespace pora
{

// ---------------------------------------------------------------------------
// Road model

struct LaneSegment
{
  enum class Type { Straight, Arc };
  Type type{Type::Straight};
  double length{0.0};      // straight [m]
  double radius{0.0};      // arc [m], > 0
  double arc_angle{0.0};   // arc sweep [rad], signed (+ = left turn)
};

struct Lane
{
  Pose2 start;
  double width{3.5};
  std::vector<LaneSegment> segments;

  double length() const
  {
    double total = 0.0;
    for (const LaneSegment & seg : segments) {
      total += seg.type == LaneSegment::Type::Straight ? seg.length
                                                       : std::abs(seg.arc_angle) * seg.radius;
    }
    return total;
  }

  /// Centerline pose at arclength s, clamped to [0, length].
  Pose2 pose_at(double s) const
  {
    Pose2 p = start;
    s = std::clamp(s, 0.0, length());
    for (const LaneSegment & seg : segments) {
      const double seg_len = seg.type == LaneSegment::Type::Straight
                               ? seg.length
                               : std::abs(seg.arc_angle) * seg.radius;
      const double step = std::min(s, seg_len);
      if (seg.type == LaneSegment::Type::Straight) {
        p.x += step * std::cos(p.heading);
        p.y += step * std::sin(p.heading);
      } else {
        const double sweep = (seg.arc_angle >= 0.0 ? 1.0 : -1.0) * step / seg.radius;
        const Vec2 center = p.position() + p.left() * (seg.arc_angle >= 0.0 ? seg.radius : -seg.radius);
        const Vec2 radial = p.position() - center;
        const double c = std::cos(sweep), sn = std::sin(sweep);
        p.x = center.x + c * radial.x - sn * radial.y;
        p.y = center.y + sn * radial.x + c * radial.y;
        p.heading = normalize_angle(p.heading + sweep);
      }
      s -= step;
      if (s <= 0.0) break;
    }
    return p;
  }
};

struct Road
{
  std::vector<Lane> lanes;
};

/// Parallel straight lanes along +x; lane i is centered at y = i * lane_width.
inline Road make_straight_road(int n_lanes, double length, double lane_width = 3.5)
{
  Road road;
  for (int i = 0; i < n_lanes; ++i) {
    Lane lane;
    lane.start = {0.0, i * lane_width, 0.0};
    lane.width = lane_width;
    lane.segments.push_back({LaneSegment::Type::Straight, length, 0.0, 0.0});
    road.lanes.push_back(lane);
  }
  return road;
}

/// Two single-lane roads crossing at the origin (east-bound and north-bound).
inline Road make_four_leg_intersection(double approach_length = 120.0, double lane_width = 3.5)
{
  Road road;
  Lane east;
  east.start = {-approach_length, 0.0, 0.0};
  east.width = lane_width;
  east.segments.push_back({LaneSegment::Type::Straight, 2.0 * approach_length, 0.0, 0.0});
  Lane north;
  north.start = {0.0, -approach_length, kPi / 2.0};
  north.width = lane_width;
  north.segments.push_back({LaneSegment::Type::Straight, 2.0 * approach_length, 0.0, 0.0});
  road.lanes.push_back(east);
  road.lanes.push_back(north);
  return road;
}

// ---------------------------------------------------------------------------
// Scenario description

struct BehaviorEvent
{
  enum class Type { Brake, SetSpeed, LaneChange };
  Type type{Type::Brake};
  double t{0.0};
  double value{0.0};     // Brake: deceleration [m/s^2]; SetSpeed: target [m/s]
  double duration{0.0};  // Brake / LaneChange
  int target_lane{0};    // LaneChange
};

struct AgentSpawn
{
  std::string id;
  ParticipantKind kind{ParticipantKind::Car};
  int lane{0};      // -1 = free-moving from free_pose
  double s0{0.0};   // arclength along the lane
  double speed0{0.0};
  double desired_speed{0.0};
  Pose2 free_pose;  // used when lane < 0
  std::vector<BehaviorEvent> script;
};

enum class ScenarioFamily { Nominal, PedestrianViolation, LaneIncursion, BrakeCutin };

inline std::string family_name(ScenarioFamily f)
{
  switch (f) {
    case ScenarioFamily::Nominal: return "nominal";
    case ScenarioFamily::PedestrianViolation: return "pedestrian_violation";
    case ScenarioFamily::LaneIncursion: return "lane_incursion";
    case ScenarioFamily::BrakeCutin: return "brake_cutin";
  }
  throw std::invalid_argument("unknown scenario family");
}

inline ScenarioFamily parse_family(const std::string & name)
{
  if (name == "nominal") return ScenarioFamily::Nominal;
  if (name == "pedestrian_violation") return ScenarioFamily::PedestrianViolation;
  if (name == "lane_incursion") return ScenarioFamily::LaneIncursion;
  if (name == "brake_cutin") return ScenarioFamily::BrakeCutin;
  throw std::invalid_argument("unknown scenario family: " + name);
}

struct ScenarioSpec
{
  std::uint64_t seed{0};
  double duration{30.0};
  double tick_dt{0.1};
  Road road;
  AgentSpawn ego;
  std::vector<AgentSpawn> agents;
  ScenarioFamily family{ScenarioFamily::Nominal};
  double av_penetration{0.0};  // fraction of background vehicles under the controller
  double goal_s{0.0};          // 0 = end of the ego lane

  // physical limits
  double speed_limit{30.0};
  double accel_limit{2.5};
  double brake_limit{8.0};
  double headway_time{1.5};
  double min_gap{2.0};
  double accel_noise{0.25};  // background longitudinal jitter, std dev [m/s^2]

  void validate() const
  {
    if (tick_dt <= 0.0) throw std::invalid_argument("scenario: tick_dt must be > 0");
    if (duration <= 0.0) throw std::invalid_argument("scenario: duration must be > 0");
    if (av_penetration < 0.0 || av_penetration > 1.0) {
      throw std::invalid_argument("scenario: av_penetration must be in [0, 1]");
    }
    if (road.lanes.empty()) throw std::invalid_argument("scenario: road needs at least one lane");
    auto check_lane = [&](int lane, const std::string & id) {
      if (lane >= static_cast<int>(road.lanes.size())) {
        throw std::invalid_argument("scenario: agent " + id + " references missing lane");
      }
    };
    check_lane(ego.lane, ego.id);
    for (const AgentSpawn & a : agents) check_lane(a.lane, a.id);
  }
};

// ---------------------------------------------------------------------------
// Controller and metric plumbing

enum class MetricKind { Pora, Ttc1, Ttc2 };

inline std::string metric_name(MetricKind m)
{
  switch (m) {
    case MetricKind::Pora: return "pora";
    case MetricKind::Ttc1: return "ttc1";
    case MetricKind::Ttc2: return "ttc2";
  }
  throw std::invalid_argument("unknown metric");
}

inline MetricKind parse_metric(const std::string & name)
{
  if (name == "pora") return MetricKind::Pora;
  if (name == "ttc1") return MetricKind::Ttc1;
  if (name == "ttc2") return MetricKind::Ttc2;
  throw std::invalid_argument("unknown metric: " + name);
}

/// Threshold policy over a [0, 1] risk signal.
struct ControllerPolicy
{
  double proceed_below{0.65};
  double brake_above{0.9};
  double replan_decel{2.0};  // comfortable deceleration in the middle band
  double brake_decel{8.0};   // maximum deceleration above the upper threshold

  void validate() const
  {
    if (!(0.0 <= proceed_below && proceed_below <= brake_above && brake_above <= 1.0)) {
      throw std::invalid_argument("policy: thresholds must satisfy 0 <= lower <= upper <= 1");
    }
  }
};

struct RewardWeights
{
  double alpha{1.0};   // per second of travel time
  double delta{50.0};  // per conflict event
  double gamma{10.0};  // per unit of risk
};

struct MetricConfig
{
  MetricKind metric{MetricKind::Pora};
  PoraParams pora{};
  PredictorConfig predictor{};
  double ttc_eval_dt{0.05};
  double ttc_horizon{10.0};
  double conflict_ttc{2.0};
  double ttc_risk_cap{10.0};  // risk = clamp(1 - ttc / cap, 0, 1)
  RewardWeights reward{};
  bool record_all_metrics{false};
  bool record_trajectory{false};
};

/// Shared [0, 1] scale so every metric can drive the same threshold policy.
inline double ttc_to_risk(const std::optional<double> & ttc, double cap)
{
  if (!ttc) return 0.0;
  return std::clamp(1.0 - *ttc / cap, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Episode results

enum class Outcome { Safe, Crash };

struct MetricSample
{
  double t{0.0};
  double value{0.0};
};

struct TrajectoryRow
{
  double t{0.0};
  std::string id;
  ParticipantKind kind{ParticipantKind::Car};
  double x{0.0}, y{0.0}, heading{0.0}, vx{0.0}, vy{0.0}, ax{0.0};
  double length{0.0}, width{0.0};
};

struct EpisodeReport
{
  std::uint64_t seed{0};
  Outcome outcome{Outcome::Safe};
  int conflicts{0};
  int collisions{0};
  std::vector<MetricSample> metric_trace;   // controller risk signal
  std::vector<MetricSample> reward_trace;
  double travel_time{0.0};
  double total_return{0.0};

  // optional analysis extras (record_all_metrics)
  std::vector<MetricSample> pora_trace;
  std::vector<MetricSample> ttc1_risk_trace;
  std::vector<MetricSample> ttc2_risk_trace;
  std::vector<double> min_ttc2_trace;  // NaN when no collision is predicted
  std::vector<MetricSample> occ_max_trace;        // window max occupancy at k=1
  std::vector<MetricSample> pair_distance_trace;  // ego to nearest vehicle center

  std::vector<TrajectoryRow> trajectory;
  std::vector<std::string> controlled_ids;  // agents driven by the threshold policy
};

namespace detail
{

struct SimAgent
{
  const AgentSpawn * spawn{nullptr};
  AgentState state;
  int lane{-1};
  double s{0.0};
  double lat{0.0};       // lateral offset from the lane centerline
  double speed{0.0};     // longitudinal, >= 0
  double desired{0.0};
  bool controlled{false};
  bool active{true};     // lane agents despawn at the end of their lane
  // lane change in progress
  bool changing{false};
  double lc_t_end{0.0};
  double lc_rate{0.0};
  std::size_t next_event{0};
  Rng noise;

  SimAgent() : noise(0) {}
};

inline void refresh_world_state(SimAgent & a, const Road & road, double prev_heading, double dt)
{
  Pose2 pose;
  if (a.lane >= 0) {
    const Lane & lane = road.lanes[static_cast<std::size_t>(a.lane)];
    const Pose2 center = lane.pose_at(a.s);
    const Vec2 pos = center.position() + center.left() * a.lat;
    double heading = center.heading;
    if (a.changing && a.speed > 0.5) {
      heading = normalize_angle(heading + std::atan2(a.lc_rate, a.speed));
    }
    pose = {pos.x, pos.y, heading};
  } else {
    pose = a.state.box.center;  // free agents keep their own pose
  }
  a.state.box.center = pose;
  a.state.velocity = {a.speed * std::cos(pose.heading), a.speed * std::sin(pose.heading)};
  a.state.yaw_rate = dt > 0.0 ? normalize_angle(pose.heading - prev_heading) / dt : 0.0;
}

/// Bumper gap and closing speed to the nearest leader in the same lane.
inline std::optional<std::pair<double, double>> leader_gap(
  const std::vector<SimAgent> & agents, std::size_t self)
{
  const SimAgent & me = agents[self];
  if (me.lane < 0) return std::nullopt;
  double best_gap = std::numeric_limits<double>::infinity();
  double best_closing = 0.0;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (i == self) continue;
    const SimAgent & other = agents[i];
    if (!other.active || other.lane != me.lane) continue;
    const double ds = other.s - me.s;
    if (ds <= 0.0) continue;
    const double gap = ds - 0.5 * (me.state.box.length + other.state.box.length);
    if (gap < best_gap) {
      best_gap = gap;
      best_closing = me.speed - other.speed;
    }
  }
  if (!std::isfinite(best_gap)) return std::nullopt;
  return std::make_pair(best_gap, best_closing);
}

/// Constant-desired-speed gap keeping: brake proportionally once the bumper
/// gap falls under the headway distance, otherwise track the desired speed.
inline double car_following_accel(
  const ScenarioSpec & spec, const std::vector<SimAgent> & agents, std::size_t self)
{
  const SimAgent & me = agents[self];
  double a = 0.8 * (me.desired - me.speed);
  if (const auto lead = leader_gap(agents, self)) {
    const double gap = lead->first;
    const double d_ref = std::max(spec.min_gap, me.speed * spec.headway_time);
    if (gap <= 0.0) {
      a = -spec.brake_limit;
    } else if (gap < d_ref) {
      a = std::min(a, spec.brake_limit * (gap - d_ref) / d_ref);
    }
  }
  return std::clamp(a, -spec.brake_limit, spec.accel_limit);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// PORA evaluation inside the simulator

/// PORA risk signal for one agent at the current instant: worst score over
/// the prediction horizon of the constant-course plan.
/// Returns the per-step scores plus the k=1 window occupancy maximum.
struct PoraTickEval
{
  double risk{0.0};
  double occ_max_k1{0.0};
};

inline PoraTickEval evaluate_pora_tick(
  const AgentState & ego, const std::vector<AgentState> & others, double now,
  const PoraParams & params, const PredictorConfig & predictor)
{
  if (others.empty()) return {};

  std::vector<OrientedBox> other_boxes;
  other_boxes.reserve(others.size());
  for (const AgentState & o : others) other_boxes.push_back(o.box);

  // Constant-course plan over the prediction horizon, one sample per step.
  std::vector<TrajectorySample> samples;
  const double speed = speed_mps(ego.velocity);
  for (int k = 1; k <= predictor.horizon_steps; ++k) {
    const double dt = k * predictor.step_dt;
    const Vec2 pos = ego.box.center.position() + Vec2{ego.velocity.vx, ego.velocity.vy} * dt;
    samples.push_back(
      {now + dt, {pos.x, pos.y, ego.box.center.heading}, ego.velocity});
  }
  const PlannedTrajectory plan = make_planned_trajectory(std::move(samples));

  // One world-aligned global grid covering every step's safety-box window.
  const SafetyBox box0 =
    build_safety_box(ego.box, speed_kmh(ego.velocity), other_boxes, params.ssd);
  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_y;
  for (const TrajectorySample & s : plan.samples) {
    SafetyBox box = box0;
    box.anchor = s.pose;
    const GridSpec w = safety_box_window(box, params.cell_size);
    const double ext_x = w.cols * w.cell_size;
    const double ext_y = w.rows * w.cell_size;
    const Vec2 corners[4] = {
      local_to_world(w.origin, {0.0, 0.0}), local_to_world(w.origin, {ext_x, 0.0}),
      local_to_world(w.origin, {0.0, ext_y}), local_to_world(w.origin, {ext_x, ext_y})};
    for (const Vec2 & c : corners) {
      min_x = std::min(min_x, c.x);
      max_x = std::max(max_x, c.x);
      min_y = std::min(min_y, c.y);
      max_y = std::max(max_y, c.y);
    }
  }
  const double pad =
    3.0 * (predictor.position_sigma0 + predictor.sigma_growth * predictor.horizon_steps * predictor.step_dt) +
    8.0;
  GridSpec global;
  global.cell_size = params.cell_size;
  global.origin = {min_x - pad, min_y - pad, 0.0};
  global.cols = static_cast<int>(std::ceil((max_x - min_x + 2.0 * pad) / params.cell_size));
  global.rows = static_cast<int>(std::ceil((max_y - min_y + 2.0 * pad) / params.cell_size));

  const std::vector<OccupancyGrid> grids = predict_occupancy(others, global, predictor, now);
  const Dimensions av_dims{ego.box.length, ego.box.width};
  const auto entries = pora_trajectory(plan, grids, av_dims, other_boxes, params);

  PoraTickEval eval;
  for (const auto & e : entries) eval.risk = std::max(eval.risk, e.score);
  if (!entries.empty()) {
    for (double v : entries.front().field.p_occ) eval.occ_max_k1 = std::max(eval.occ_max_k1, v);
  }
  return eval;
}

// ---------------------------------------------------------------------------
// Episode execution

inline EpisodeReport run_episode(
  const ScenarioSpec & spec, const MetricConfig & cfg, const ControllerPolicy & policy)
{
  spec.validate();
  policy.validate();
  cfg.predictor.validate();

  using detail::SimAgent;

  std::vector<SimAgent> agents;
  auto init_agent = [&](const AgentSpawn & spawn, std::uint64_t stream) {
    SimAgent a;
    a.spawn = &spawn;
    a.lane = spawn.lane;
    a.s = spawn.s0;
    a.speed = spawn.speed0;
    a.desired = spawn.desired_speed;
    a.noise = Rng(spec.seed, stream);
    const Dimensions dims = default_dimensions(spawn.kind);
    a.state.id = spawn.id;
    a.state.kind = spawn.kind;
    a.state.box.length = dims.length;
    a.state.box.width = dims.width;
    if (a.lane < 0) a.state.box.center = spawn.free_pose;
    detail::refresh_world_state(a, spec.road, spawn.free_pose.heading, 0.0);
    return a;
  };

  agents.push_back(init_agent(spec.ego, 0));
  for (std::size_t i = 0; i < spec.agents.size(); ++i) {
    agents.push_back(init_agent(spec.agents[i], i + 1));
  }
  agents[0].controlled = true;

  // Seeded penetration selection among background vehicles.
  {
    std::vector<std::size_t> vehicle_idx;
    for (std::size_t i = 1; i < agents.size(); ++i) {
      if (agents[i].state.kind != ParticipantKind::Pedestrian) vehicle_idx.push_back(i);
    }
    const auto want = static_cast<std::size_t>(
      std::llround(spec.av_penetration * static_cast<double>(vehicle_idx.size())));
    Rng rng(spec.seed, 0xa11ce);
    for (std::size_t i = vehicle_idx.size(); i > 1; --i) {
      std::swap(vehicle_idx[i - 1], vehicle_idx[rng.below(i)]);
    }
    for (std::size_t i = 0; i < want && i < vehicle_idx.size(); ++i) {
      agents[vehicle_idx[i]].controlled = true;
    }
  }

  EpisodeReport rep;
  rep.seed = spec.seed;
  for (const detail::SimAgent & a : agents) {
    if (a.controlled) rep.controlled_ids.push_back(a.state.id);
  }

  const double goal_s =
    spec.goal_s > 0.0
      ? spec.goal_s
      : (spec.ego.lane >= 0 ? spec.road.lanes[static_cast<std::size_t>(spec.ego.lane)].length()
                            : std::numeric_limits<double>::infinity());

  const int n_ticks = static_cast<int>(std::ceil(spec.duration / spec.tick_dt));
  bool in_conflict = false;
  double t = 0.0;

  auto other_states = [&](std::size_t self) {
    std::vector<AgentState> others;
    others.reserve(agents.size() - 1);
    for (std::size_t i = 0; i < agents.size(); ++i) {
      if (i != self && agents[i].active) others.push_back(agents[i].state);
    }
    return others;
  };

  auto risk_signal = [&](std::size_t self, const std::vector<AgentState> & others,
                         const std::optional<double> & ttc2_min) {
    switch (cfg.metric) {
      case MetricKind::Pora:
        return evaluate_pora_tick(agents[self].state, others, t, cfg.pora, cfg.predictor).risk;
      case MetricKind::Ttc1:
        return ttc_to_risk(min_ttc1_over_agents(agents[self].state, others).value, cfg.ttc_risk_cap);
      case MetricKind::Ttc2: {
        if (ttc2_min) return ttc_to_risk(*ttc2_min, cfg.ttc_risk_cap);
        return ttc_to_risk(
          min_ttc2_over_agents(agents[self].state, others, cfg.ttc_eval_dt, cfg.ttc_horizon).value,
          cfg.ttc_risk_cap);
      }
    }
    return 0.0;
  };

  for (int tick = 0; tick < n_ticks; ++tick) {
    // --- evaluate metrics at the current state
    const std::vector<AgentState> ego_others = other_states(0);
    const TtcResult ttc2_min = min_ttc2_over_agents(
      agents[0].state, ego_others, cfg.ttc_eval_dt, cfg.ttc_horizon);

    double ego_risk = 0.0;
    double pora_risk = 0.0, occ_max = 0.0;
    const bool need_pora = cfg.metric == MetricKind::Pora || cfg.record_all_metrics;
    if (need_pora && !ego_others.empty()) {
      const PoraTickEval eval =
        evaluate_pora_tick(agents[0].state, ego_others, t, cfg.pora, cfg.predictor);
      pora_risk = eval.risk;
      occ_max = eval.occ_max_k1;
    }
    switch (cfg.metric) {
      case MetricKind::Pora: ego_risk = pora_risk; break;
      case MetricKind::Ttc1:
        ego_risk = ttc_to_risk(min_ttc1_over_agents(agents[0].state, ego_others).value, cfg.ttc_risk_cap);
        break;
      case MetricKind::Ttc2: ego_risk = ttc_to_risk(ttc2_min.value, cfg.ttc_risk_cap); break;
    }

    rep.metric_trace.push_back({t, ego_risk});
    if (cfg.record_all_metrics) {
      rep.pora_trace.push_back({t, pora_risk});
      rep.ttc1_risk_trace.push_back(
        {t, ttc_to_risk(min_ttc1_over_agents(agents[0].state, ego_others).value, cfg.ttc_risk_cap)});
      rep.ttc2_risk_trace.push_back({t, ttc_to_risk(ttc2_min.value, cfg.ttc_risk_cap)});
      rep.min_ttc2_trace.push_back(
        ttc2_min.value ? *ttc2_min.value : std::numeric_limits<double>::quiet_NaN());
      rep.occ_max_trace.push_back({t, occ_max});
      double nearest = std::numeric_limits<double>::quiet_NaN();
      for (const AgentState & o : ego_others) {
        if (o.kind == ParticipantKind::Pedestrian) continue;
        const double d = (o.box.center.position() - agents[0].state.box.center.position()).norm();
        if (std::isnan(nearest) || d < nearest) nearest = d;
      }
      rep.pair_distance_trace.push_back({t, nearest});
    }
    if (cfg.record_trajectory) {
      for (const SimAgent & a : agents) {
        if (!a.active) continue;
        rep.trajectory.push_back(
          {t, a.state.id, a.state.kind, a.state.box.center.x, a.state.box.center.y,
           a.state.box.center.heading, a.state.velocity.vx, a.state.velocity.vy,
           a.state.acceleration, a.state.box.length, a.state.box.width});
      }
    }

    // --- conflict bookkeeping (rising edge of the sub-threshold interval)
    bool conflict_started = false;
    const bool below = ttc2_min.value && *ttc2_min.value < cfg.conflict_ttc;
    if (below && !in_conflict) {
      ++rep.conflicts;
      conflict_started = true;
    }
    in_conflict = below;

    // --- reward
    const double reward = -cfg.reward.alpha * spec.tick_dt -
                          cfg.reward.delta * (conflict_started ? 1.0 : 0.0) -
                          cfg.reward.gamma * ego_risk;
    rep.reward_trace.push_back({t, reward});
    rep.total_return += reward;

    // --- decide accelerations
    std::vector<double> accel(agents.size(), 0.0);
    for (std::size_t i = 0; i < agents.size(); ++i) {
      SimAgent & a = agents[i];
      if (!a.active) continue;
      double cmd = detail::car_following_accel(spec, agents, i);
      if (a.state.kind == ParticipantKind::Pedestrian) {
        cmd = 2.0 * (a.desired - a.speed);  // pedestrians just track their walking speed
      } else if (i > 0) {
        cmd += spec.accel_noise * a.noise.normal();
      }

      // scripted overrides
      const auto & script = a.spawn->script;
      while (a.next_event < script.size() && script[a.next_event].t <= t) {
        const BehaviorEvent & ev = script[a.next_event];
        if (ev.type == BehaviorEvent::Type::SetSpeed) {
          a.desired = ev.value;
        } else if (ev.type == BehaviorEvent::Type::LaneChange && a.lane >= 0 && !a.changing) {
          const Lane & from = spec.road.lanes[static_cast<std::size_t>(a.lane)];
          const Lane & to = spec.road.lanes[static_cast<std::size_t>(ev.target_lane)];
          const Vec2 pos = from.pose_at(a.s).position() + from.pose_at(a.s).left() * a.lat;
          const Pose2 target_center = to.pose_at(a.s);
          a.lat = world_to_local(target_center, pos).y;
          a.lane = ev.target_lane;
          a.changing = true;
          a.lc_t_end = t + std::max(ev.duration, spec.tick_dt);
          a.lc_rate = -a.lat / std::max(ev.duration, spec.tick_dt);
        }
        ++a.next_event;
      }
      for (const BehaviorEvent & ev : script) {
        if (ev.type == BehaviorEvent::Type::Brake && ev.value != 0.0 && t >= ev.t &&
            t < ev.t + ev.duration) {
          cmd = -ev.value;
        }
      }

      // threshold policy for controller-driven vehicles
      if (a.controlled) {
        double risk = ego_risk;
        if (i != 0) {
          const std::vector<AgentState> others = other_states(i);
          risk = others.empty() ? 0.0 : risk_signal(i, others, std::nullopt);
        }
        if (risk > policy.brake_above) {
          cmd = -policy.brake_decel;
        } else if (risk >= policy.proceed_below) {
          cmd = std::min(cmd, -policy.replan_decel);
        }
      }

      accel[i] = std::clamp(cmd, -spec.brake_limit, spec.accel_limit);
    }

    // --- integrate
    for (std::size_t i = 0; i < agents.size(); ++i) {
      SimAgent & a = agents[i];
      if (!a.active) continue;
      const double prev_heading = a.state.box.center.heading;
      a.state.acceleration = accel[i];
      a.speed = std::clamp(a.speed + accel[i] * spec.tick_dt, 0.0, spec.speed_limit);
      if (a.lane >= 0) {
        a.s += a.speed * spec.tick_dt;
        if (a.changing) {
          a.lat += a.lc_rate * spec.tick_dt;
          if (t + spec.tick_dt >= a.lc_t_end || std::abs(a.lat) < 0.05) {
            a.lat = 0.0;
            a.changing = false;
          }
        }
        if (i > 0 && a.s >= spec.road.lanes[static_cast<std::size_t>(a.lane)].length()) {
          a.active = false;  // reached the end of its route
        }
      } else {
        a.state.box.center.x += a.speed * spec.tick_dt * std::cos(prev_heading);
        a.state.box.center.y += a.speed * spec.tick_dt * std::sin(prev_heading);
      }
      detail::refresh_world_state(a, spec.road, prev_heading, spec.tick_dt);
    }
    t += spec.tick_dt;

    // --- collision check at the new state
    int overlaps = 0;
    for (std::size_t i = 1; i < agents.size(); ++i) {
      if (agents[i].active && obb_overlap(agents[0].state.box, agents[i].state.box)) ++overlaps;
    }
    if (overlaps > 0) {
      rep.outcome = Outcome::Crash;
      rep.collisions = overlaps;
      break;
    }
    if (agents[0].s >= goal_s) break;
  }

  rep.travel_time = t;
  return rep;
}

// ---------------------------------------------------------------------------
// Batch execution

struct BatchSummary
{
  int episodes{0};
  int crashes{0};
  double avg_conflicts{0.0};
  double collisions_per_100{0.0};
  double avg_return{0.0};
  double min_return{0.0};
};

inline BatchSummary summarize(const std::vector<EpisodeReport> & reports)
{
  BatchSummary s;
  s.episodes = static_cast<int>(reports.size());
  if (reports.empty()) return s;
  double conflicts = 0.0, collisions = 0.0, ret = 0.0;
  s.min_return = std::numeric_limits<double>::infinity();
  for (const EpisodeReport & r : reports) {
    conflicts += r.conflicts;
    collisions += r.collisions;
    ret += r.total_return;
    s.min_return = std::min(s.min_return, r.total_return);
    s.crashes += r.outcome == Outcome::Crash ? 1 : 0;
  }
  s.avg_conflicts = conflicts / s.episodes;
  s.collisions_per_100 = 100.0 * collisions / s.episodes;
  s.avg_return = ret / s.episodes;
  return s;
}

/// Runs every spec (parallel across episodes); results are merged by index,
/// so the output is identical for any worker count.
inline std::pair<std::vector<EpisodeReport>, BatchSummary> run_batch(
  const std::vector<ScenarioSpec> & specs, const MetricConfig & cfg,
  const ControllerPolicy & policy, int workers = 0)
{
  if (specs.empty()) throw std::invalid_argument("run_batch: need at least one scenario");
  if (workers <= 0) {
    workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  workers = std::min<int>(workers, static_cast<int>(specs.size()));

  std::vector<EpisodeReport> reports(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < specs.size(); i = next.fetch_add(1)) {
      reports[i] = run_episode(specs[i], cfg, policy);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread & th : pool) th.join();

  BatchSummary summary = summarize(reports);
  return {std::move(reports), summary};
}

/// One spec per (level, episode); penetration selection itself happens inside
/// run_episode from the spec seed.
inline std::vector<ScenarioSpec> make_penetration_sweep(
  const ScenarioSpec & base, const std::vector<double> & levels, int episodes_per_level)
{
  if (episodes_per_level < 1) throw std::invalid_argument("sweep: episodes_per_level must be >= 1");
  std::vector<ScenarioSpec> specs;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    if (levels[li] < 0.0 || levels[li] > 1.0) {
      throw std::invalid_argument("sweep: levels must be in [0, 1]");
    }
    for (int e = 0; e < episodes_per_level; ++e) {
      ScenarioSpec s = base;
      s.av_penetration = levels[li];
      s.seed = mix64(base.seed ^ mix64((li << 32) | static_cast<std::uint64_t>(e)));
      specs.push_back(std::move(s));
    }
  }
  return specs;
}

}  // namespace pora
