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

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pora/grid_io.hpp"
#include "pora/sim.hpp"

namespace pora
{

inline constexpr int kScenarioSchemaVersion = 1;

inline nlohmann::json pose_to_json(const Pose2 & p)
{
  return {{"x", p.x}, {"y", p.y}, {"heading", p.heading}};
}

inline Pose2 pose_from_json(const nlohmann::json & j)
{
  return {j.at("x").get<double>(), j.at("y").get<double>(), j.at("heading").get<double>()};
}

inline nlohmann::json spawn_to_json(const AgentSpawn & a)
{
  nlohmann::json events = nlohmann::json::array();
  for (const BehaviorEvent & ev : a.script) {
    const char * type = ev.type == BehaviorEvent::Type::Brake
                          ? "brake"
                          : ev.type == BehaviorEvent::Type::SetSpeed ? "set_speed" : "lane_change";
    events.push_back(
      {{"type", type},
       {"t", ev.t},
       {"value", ev.value},
       {"duration", ev.duration},
       {"target_lane", ev.target_lane}});
  }
  return {
    {"id", a.id},
    {"kind", participant_kind_name(a.kind)},
    {"lane", a.lane},
    {"s0", a.s0},
    {"speed0", a.speed0},
    {"desired_speed", a.desired_speed},
    {"free_pose", pose_to_json(a.free_pose)},
    {"script", events}};
}

inline AgentSpawn spawn_from_json(const nlohmann::json & j)
{
  AgentSpawn a;
  a.id = j.at("id").get<std::string>();
  a.kind = parse_participant_kind(j.at("kind").get<std::string>());
  a.lane = j.at("lane").get<int>();
  a.s0 = j.value("s0", 0.0);
  a.speed0 = j.value("speed0", 0.0);
  a.desired_speed = j.value("desired_speed", 0.0);
  if (j.contains("free_pose")) a.free_pose = pose_from_json(j.at("free_pose"));
  for (const auto & ev : j.value("script", nlohmann::json::array())) {
    BehaviorEvent e;
    const std::string type = ev.at("type").get<std::string>();
    if (type == "brake") {
      e.type = BehaviorEvent::Type::Brake;
    } else if (type == "set_speed") {
      e.type = BehaviorEvent::Type::SetSpeed;
    } else if (type == "lane_change") {
      e.type = BehaviorEvent::Type::LaneChange;
    } else {
      throw std::invalid_argument("scenario: unknown behavior event type: " + type);
    }
    e.t = ev.at("t").get<double>();
    e.value = ev.value("value", 0.0);
    e.duration = ev.value("duration", 0.0);
    e.target_lane = ev.value("target_lane", 0);
    a.script.push_back(e);
  }
  return a;
}

inline nlohmann::json road_to_json(const Road & road)
{
  nlohmann::json lanes = nlohmann::json::array();
  for (const Lane & lane : road.lanes) {
    nlohmann::json segs = nlohmann::json::array();
    for (const LaneSegment & seg : lane.segments) {
      if (seg.type == LaneSegment::Type::Straight) {
        segs.push_back({{"type", "straight"}, {"length", seg.length}});
      } else {
        segs.push_back({{"type", "arc"}, {"radius", seg.radius}, {"angle", seg.arc_angle}});
      }
    }
    lanes.push_back({{"start", pose_to_json(lane.start)}, {"width", lane.width}, {"segments", segs}});
  }
  return {{"lanes", lanes}};
}

inline Road road_from_json(const nlohmann::json & j)
{
  Road road;
  for (const auto & lj : j.at("lanes")) {
    Lane lane;
    lane.start = pose_from_json(lj.at("start"));
    lane.width = lj.value("width", 3.5);
    for (const auto & sj : lj.at("segments")) {
      LaneSegment seg;
      const std::string type = sj.at("type").get<std::string>();
      if (type == "straight") {
        seg.type = LaneSegment::Type::Straight;
        seg.length = sj.at("length").get<double>();
      } else if (type == "arc") {
        seg.type = LaneSegment::Type::Arc;
        seg.radius = sj.at("radius").get<double>();
        seg.arc_angle = sj.at("angle").get<double>();
      } else {
        throw std::invalid_argument("scenario: unknown lane segment type: " + type);
      }
      lane.segments.push_back(seg);
    }
    road.lanes.push_back(lane);
  }
  return road;
}

inline nlohmann::json scenario_to_json(const ScenarioSpec & s)
{
  nlohmann::json agents = nlohmann::json::array();
  for (const AgentSpawn & a : s.agents) agents.push_back(spawn_to_json(a));
  return {
    {"version", kScenarioSchemaVersion},
    {"seed", s.seed},
    {"duration", s.duration},
    {"tick_dt", s.tick_dt},
    {"family", family_name(s.family)},
    {"av_penetration", s.av_penetration},
    {"goal_s", s.goal_s},
    {"road", road_to_json(s.road)},
    {"ego", spawn_to_json(s.ego)},
    {"agents", agents},
    {"limits",
     {{"speed_limit", s.speed_limit},
      {"accel_limit", s.accel_limit},
      {"brake_limit", s.brake_limit},
      {"headway_time", s.headway_time},
      {"min_gap", s.min_gap},
      {"accel_noise", s.accel_noise}}}};
}

inline ScenarioSpec scenario_from_json(const nlohmann::json & j)
{
  const int version = j.value("version", 0);
  if (version != kScenarioSchemaVersion) {
    throw std::invalid_argument(
      "scenario: unsupported schema version " + std::to_string(version));
  }
  ScenarioSpec s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.duration = j.at("duration").get<double>();
  s.tick_dt = j.at("tick_dt").get<double>();
  s.family = parse_family(j.value("family", "nominal"));
  s.av_penetration = j.value("av_penetration", 0.0);
  s.goal_s = j.value("goal_s", 0.0);
  s.road = road_from_json(j.at("road"));
  s.ego = spawn_from_json(j.at("ego"));
  for (const auto & a : j.value("agents", nlohmann::json::array())) {
    s.agents.push_back(spawn_from_json(a));
  }
  if (j.contains("limits")) {
    const auto & lim = j.at("limits");
    s.speed_limit = lim.value("speed_limit", s.speed_limit);
    s.accel_limit = lim.value("accel_limit", s.accel_limit);
    s.brake_limit = lim.value("brake_limit", s.brake_limit);
    s.headway_time = lim.value("headway_time", s.headway_time);
    s.min_gap = lim.value("min_gap", s.min_gap);
    s.accel_noise = lim.value("accel_noise", s.accel_noise);
  }
  s.validate();
  return s;
}

inline nlohmann::json metric_trace_to_json(const std::vector<MetricSample> & trace)
{
  nlohmann::json out = nlohmann::json::array();
  for (const MetricSample & m : trace) out.push_back({m.t, m.value});
  return out;
}

inline nlohmann::json report_to_json(const EpisodeReport & r, bool include_traces = true)
{
  nlohmann::json j = {
    {"seed", r.seed},
    {"outcome", r.outcome == Outcome::Crash ? "crash" : "safe"},
    {"conflicts", r.conflicts},
    {"collisions", r.collisions},
    {"travel_time", r.travel_time},
    {"total_return", r.total_return}};
  if (include_traces) {
    j["metric_trace"] = metric_trace_to_json(r.metric_trace);
    j["reward_trace"] = metric_trace_to_json(r.reward_trace);
  }
  return j;
}

inline nlohmann::json summary_to_json(const BatchSummary & s)
{
  return {
    {"episodes", s.episodes},
    {"crashes", s.crashes},
    {"avg_conflicts", s.avg_conflicts},
    {"collisions_per_100", s.collisions_per_100},
    {"avg_return", s.avg_return},
    {"min_return", s.min_return}};
}

inline std::string summary_to_csv(const BatchSummary & s)
{
  std::ostringstream out;
  out << "episodes,crashes,avg_conflicts,collisions_per_100,avg_return,min_return\n";
  out << s.episodes << ',' << s.crashes << ',' << format_double(s.avg_conflicts) << ','
      << format_double(s.collisions_per_100) << ',' << format_double(s.avg_return) << ','
      << format_double(s.min_return) << '\n';
  return out.str();
}

/// Trajectory log: one CSV row per agent per tick.
inline std::string trajectory_to_csv(const std::vector<TrajectoryRow> & rows)
{
  std::ostringstream out;
  out << "t,id,kind,x,y,heading,vx,vy,ax,length,width\n";
  for (const TrajectoryRow & r : rows) {
    out << format_double(r.t) << ',' << r.id << ',' << participant_kind_name(r.kind) << ','
        << format_double(r.x) << ',' << format_double(r.y) << ',' << format_double(r.heading)
        << ',' << format_double(r.vx) << ',' << format_double(r.vy) << ',' << format_double(r.ax)
        << ',' << format_double(r.length) << ',' << format_double(r.width) << '\n';
  }
  return out.str();
}

}  // namespace pora
