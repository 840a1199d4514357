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

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pora
{

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2
{
  double x{0.0};
  double y{0.0};

  Vec2 operator+(const Vec2 & o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2 & o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2 & o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

/// Wrap an angle to (-pi, pi].
inline double normalize_angle(double a)
{
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

/// 2-D pose; heading is measured counterclockwise from the world +x axis.
struct Pose2
{
  double x{0.0};
  double y{0.0};
  double heading{0.0};  // radians in (-pi, pi]

  Vec2 position() const { return {x, y}; }
  Vec2 forward() const { return {std::cos(heading), std::sin(heading)}; }
  Vec2 left() const { return {-std::sin(heading), std::cos(heading)}; }
};

/// Rotate then translate a point given in the pose's local frame into world.
inline Vec2 local_to_world(const Pose2 & frame, const Vec2 & local)
{
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  return {frame.x + c * local.x - s * local.y, frame.y + s * local.x + c * local.y};
}

/// Express a world point in the pose's local frame (x forward, y left).
inline Vec2 world_to_local(const Pose2 & frame, const Vec2 & world)
{
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  const double dx = world.x - frame.x;
  const double dy = world.y - frame.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

struct Velocity2
{
  double vx{0.0};
  double vy{0.0};
};

inline double speed_mps(const Velocity2 & v) { return std::hypot(v.vx, v.vy); }

/// Speed magnitude in km/h, the unit the stopping-distance formula expects.
inline double speed_kmh(const Velocity2 & v) { return 3.6 * speed_mps(v); }

/// Rectangle with its long side along the center pose heading.
struct OrientedBox
{
  Pose2 center;
  double length{0.0};  // extent along heading [m]
  double width{0.0};   // extent across heading [m]
};

inline std::array<Vec2, 4> box_corners(const OrientedBox & b)
{
  const Vec2 f = b.center.forward() * (0.5 * b.length);
  const Vec2 l = b.center.left() * (0.5 * b.width);
  const Vec2 c = b.center.position();
  return {c + f + l, c + f - l, c - f - l, c - f + l};
}

inline bool point_in_box(const OrientedBox & b, const Vec2 & p)
{
  const Vec2 local = world_to_local(b.center, p);
  return std::abs(local.x) <= 0.5 * b.length && std::abs(local.y) <= 0.5 * b.width;
}

/// Separating-axis intersection test over the four box axes.
/// Touching rectangles (shared edge or corner) count as overlapping.
inline bool obb_overlap(const OrientedBox & a, const OrientedBox & b)
{
  const Vec2 axes[4] = {a.center.forward(), a.center.left(), b.center.forward(), b.center.left()};
  const Vec2 d = b.center.position() - a.center.position();
  for (const Vec2 & u : axes) {
    const double ra = 0.5 * a.length * std::abs(a.center.forward().dot(u)) +
                      0.5 * a.width * std::abs(a.center.left().dot(u));
    const double rb = 0.5 * b.length * std::abs(b.center.forward().dot(u)) +
                      0.5 * b.width * std::abs(b.center.left().dot(u));
    if (std::abs(d.dot(u)) > ra + rb) {
      return false;
    }
  }
  return true;
}

enum class ParticipantKind { Car, Truck, Bus, Bicycle, Pedestrian };

struct Dimensions
{
  double length{0.0};
  double width{0.0};
};

/// Fleet-average body dimensions, used when perception does not supply them.
inline Dimensions default_dimensions(ParticipantKind kind)
{
  switch (kind) {
    case ParticipantKind::Car: return {4.5, 1.8};
    case ParticipantKind::Truck: return {8.0, 2.4};
    case ParticipantKind::Bus: return {12.0, 2.5};
    case ParticipantKind::Bicycle: return {1.8, 0.6};
    case ParticipantKind::Pedestrian: return {0.5, 0.5};
  }
  throw std::invalid_argument("unknown participant kind");
}

inline std::string participant_kind_name(ParticipantKind kind)
{
  switch (kind) {
    case ParticipantKind::Car: return "car";
    case ParticipantKind::Truck: return "truck";
    case ParticipantKind::Bus: return "bus";
    case ParticipantKind::Bicycle: return "bicycle";
    case ParticipantKind::Pedestrian: return "pedestrian";
  }
  throw std::invalid_argument("unknown participant kind");
}

inline ParticipantKind parse_participant_kind(const std::string & name)
{
  if (name == "car") return ParticipantKind::Car;
  if (name == "truck") return ParticipantKind::Truck;
  if (name == "bus") return ParticipantKind::Bus;
  if (name == "bicycle") return ParticipantKind::Bicycle;
  if (name == "pedestrian") return ParticipantKind::Pedestrian;
  throw std::invalid_argument("unknown participant kind: " + name);
}

struct TrajectorySample
{
  double t{0.0};
  Pose2 pose;
  Velocity2 velocity;
};

/// Uniformly sampled planned path of the ego vehicle.
struct PlannedTrajectory
{
  std::vector<TrajectorySample> samples;
  double dt{0.0};
};

/// Validates uniform spacing (1e-9 s) and fills in dt.
inline PlannedTrajectory make_planned_trajectory(std::vector<TrajectorySample> samples)
{
  if (samples.empty()) {
    throw std::invalid_argument("planned trajectory needs at least one sample");
  }
  double dt = 0.0;
  if (samples.size() > 1) {
    dt = samples[1].t - samples[0].t;
    for (std::size_t i = 1; i < samples.size(); ++i) {
      const double step = samples[i].t - samples[i - 1].t;
      if (step <= 0.0 || std::abs(step - dt) > 1e-9) {
        throw std::invalid_argument("planned trajectory samples must be uniformly spaced");
      }
    }
  }
  return {std::move(samples), dt};
}

struct AgentState
{
  std::string id;
  ParticipantKind kind{ParticipantKind::Car};
  OrientedBox box;
  Velocity2 velocity;
  double acceleration{0.0};  // signed, along heading [m/s^2]
  double yaw_rate{0.0};      // [rad/s]
};

inline bool agent_state_finite(const AgentState & a)
{
  return std::isfinite(a.box.center.x) && std::isfinite(a.box.center.y) &&
         std::isfinite(a.box.center.heading) && std::isfinite(a.box.length) &&
         std::isfinite(a.box.width) && std::isfinite(a.velocity.vx) &&
         std::isfinite(a.velocity.vy) && std::isfinite(a.acceleration) &&
         std::isfinite(a.yaw_rate);
}

}  // namespace pora
