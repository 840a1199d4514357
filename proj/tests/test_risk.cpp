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

#include <catch2/catch_amalgamated.hpp>

#include "pora/predictor.hpp"
#include "pora/risk.hpp"
#include "pora/rng.hpp"

using namespace pora;

namespace
{

std::vector<OrientedBox> one_other(double length = 5.0, double width = 2.0)
{
  return {OrientedBox{{50.0, 50.0, 0.0}, length, width}};
}

GridSpec world_spec(double half_extent, double cell, Pose2 origin_override = {1e9, 0.0, 0.0})
{
  GridSpec s;
  s.cell_size = cell;
  s.rows = static_cast<int>(std::lround(2.0 * half_extent / cell));
  s.cols = s.rows;
  s.origin =
    origin_override.x > 1e8 ? Pose2{-half_extent, -half_extent, 0.0} : origin_override;
  return s;
}

// Hand-written reference for the stopping distance: reaction-time travel at
// 0.278 m per (km/h s) plus v^2 over (254/g) a.
double ssd_reference(double v_kmh, double r, double a)
{
  const double reaction = 0.278 * v_kmh * r;
  const double braking = (v_kmh * v_kmh) * 9.81 / (254.0 * a);
  return reaction + braking;
}

}  // namespace

TEST_CASE("stopping sight distance matches hand evaluation")
{
  const SsdParams p{2.5, 3.4};
  CHECK(stopping_sight_distance(0.0, p) == 0.0);
  CHECK(stopping_sight_distance(50.0, p) ==
        Catch::Approx(ssd_reference(50.0, 2.5, 3.4)).margin(1e-9));
  CHECK(stopping_sight_distance(100.0, p) ==
        Catch::Approx(ssd_reference(100.0, 2.5, 3.4)).margin(1e-9));
  // Display values: ~63.15 m and ~183.1 m; near the AASHTO design table's
  // roughly 185 m at 100 km/h.
  CHECK(stopping_sight_distance(50.0, p) == Catch::Approx(63.15).margin(5e-3));
  CHECK(stopping_sight_distance(100.0, p) == Catch::Approx(185.0).margin(2.5));
  CHECK_THROWS_AS(stopping_sight_distance(10.0, SsdParams{2.5, 0.0}), std::invalid_argument);
}

TEST_CASE("safety box dimensions follow the four formulas")
{
  const OrientedBox av{{0.0, 0.0, 0.0}, 4.5, 2.0};
  const SsdParams p{2.5, 3.4};

  SECTION("zero speed, one participant")
  {
    const SafetyBox box = build_safety_box(av, 0.0, {{{10.0, 0.0, 0.0}, 5.0, 2.0}}, p);
    CHECK(box.width == Catch::Approx(7.0));
    CHECK(box.length == Catch::Approx(9.5));
    CHECK(box.sub_length == Catch::Approx(6.5));
    CHECK(box.sub_width == Catch::Approx(4.0));
    // With no stopping distance the box is symmetric about the body.
    CHECK(box.rear_extent == Catch::Approx(0.5 * box.length));
  }

  SECTION("50 km/h extends the length by the stopping distance")
  {
    const SafetyBox box = build_safety_box(av, 50.0, {{{10.0, 0.0, 0.0}, 5.0, 2.0}}, p);
    CHECK(box.length == Catch::Approx(9.5 + stopping_sight_distance(50.0, p)).margin(1e-9));
    CHECK(box.length == Catch::Approx(72.65).margin(5e-3));
    CHECK(box.rear_extent == Catch::Approx(4.75));  // rear margin unaffected by speed
  }

  SECTION("max/min selection over two participants")
  {
    const std::vector<OrientedBox> others{
      {{10.0, 0.0, 0.0}, 5.0, 2.0}, {{20.0, 0.0, 0.0}, 1.8, 0.6}};
    const SafetyBox box = build_safety_box(av, 0.0, others, p);
    CHECK(box.width == Catch::Approx(7.0));
    CHECK(box.sub_length == Catch::Approx(5.1));
    CHECK(box.sub_width == Catch::Approx(2.6));
  }

  SECTION("no participants is an error")
  {
    CHECK_THROWS_AS(build_safety_box(av, 0.0, {}, p), std::invalid_argument);
  }
}

TEST_CASE("safety box length grows with speed, other dimensions do not")
{
  const OrientedBox av{{0.0, 0.0, 0.0}, 4.5, 1.8};
  const SsdParams p{2.5, 3.4};
  const SafetyBox at_rest = build_safety_box(av, 0.0, one_other(), p);
  double prev_length = -1.0;
  for (double v = 0.0; v <= 120.0; v += 10.0) {
    const SafetyBox box = build_safety_box(av, v, one_other(), p);
    CHECK(box.length > prev_length);
    prev_length = box.length;
    CHECK(box.width == at_rest.width);
    CHECK(box.sub_length == at_rest.sub_length);
    CHECK(box.sub_width == at_rest.sub_width);
  }
}

TEST_CASE("av-centered extraction places forward mass correctly")
{
  // Unit mass 3 m ahead of the AV.
  OccupancyGrid global = make_grid(world_spec(20.0, 0.5));
  const auto [pr, pc] = world_to_cell(global.spec, {3.0, 0.0, 0.0});
  global.at(static_cast<int>(pr), static_cast<int>(pc)) = 1.0;

  const OrientedBox av{{0.0, 0.0, 0.0}, 4.5, 1.8};
  const SafetyBox box = build_safety_box(av, 0.0, one_other(), SsdParams{});
  const OccupancyGrid window = extract_av_centered(global, box, 0.5);

  int best_r = 0, best_c = 0;
  double best = -1.0;
  for (int r = 0; r < window.spec.rows; ++r) {
    for (int c = 0; c < window.spec.cols; ++c) {
      if (window.at(r, c) > best) {
        best = window.at(r, c);
        best_r = r;
        best_c = c;
      }
    }
  }
  REQUIRE(best >= 0.5);  // bilinear reads of a delta can split across two cells
  const Vec2 got = cell_center_world(window.spec, best_r, best_c);
  CHECK(std::abs(got.x - 3.0) <= 0.5);
  CHECK(std::abs(got.y - 0.0) <= 0.5);
  // Forward of the AV body center in the window frame.
  CHECK(world_to_local(box.anchor, got).x > 0.0);
}

TEST_CASE("extraction is equivariant when the whole world rotates")
{
  Rng rng(8);
  for (double angle : {kPi / 2.0, 0.31, -1.2}) {
    OccupancyGrid global = make_grid(world_spec(20.0, 0.5));
    for (double & v : global.values) v = rng.uniform();

    const OrientedBox av{{2.0, 1.0, 0.0}, 4.5, 1.8};
    const SafetyBox box = build_safety_box(av, 20.0, one_other(), SsdParams{});
    const OccupancyGrid base = extract_av_centered(global, box, 0.5);

    // Rotate grid frame and AV by the same angle.
    const double c = std::cos(angle), s = std::sin(angle);
    OccupancyGrid rotated = global;
    rotated.spec.origin = {
      c * global.spec.origin.x - s * global.spec.origin.y,
      s * global.spec.origin.x + c * global.spec.origin.y,
      normalize_angle(global.spec.origin.heading + angle)};
    const OrientedBox av_rot{
      {c * av.center.x - s * av.center.y, s * av.center.x + c * av.center.y,
       normalize_angle(av.center.heading + angle)},
      av.length, av.width};
    const SafetyBox box_rot = build_safety_box(av_rot, 20.0, one_other(), SsdParams{});
    const OccupancyGrid turned = extract_av_centered(rotated, box_rot, 0.5);

    REQUIRE(turned.values.size() == base.values.size());
    for (std::size_t i = 0; i < base.values.size(); ++i) {
      CHECK(turned.values[i] == Catch::Approx(base.values[i]).margin(1e-6));
    }
  }
}

TEST_CASE("conditional collision probability cases")
{
  // Geometry chosen so cell centers land exactly on the probe points.
  SafetyBox box;
  box.width = 7.0;
  box.length = 11.5;
  box.sub_length = 4.0;
  box.sub_width = 2.0;
  box.rear_extent = 6.0;
  box.anchor = {0.0, 0.0, 0.0};
  const GridSpec spec = safety_box_window(box, 0.5);
  REQUIRE(spec.cols == 23);
  REQUIRE(spec.rows == 14);
  const OccupancyGrid cgo = collision_given_occupancy(box, spec);

  auto value_at = [&](double s, double t) {
    const auto [row, col] = world_to_cell(spec, {s, t, 0.0});
    return cgo.at(static_cast<int>(std::floor(row)), static_cast<int>(std::floor(col)));
  };

  // Guaranteed-collision subarea.
  CHECK(value_at(0.0, 0.0) == 1.0);
  CHECK(value_at(1.75, 0.75) == 1.0);

  // Exactly midway between the subarea edge and the outer edge on both axes:
  // s* = 2 + (5.5-2)/2 = 3.75, t* = 1 + (3.5-1)/2 = 2.25.
  CHECK(value_at(3.75, 2.25) == Catch::Approx(0.5).margin(1e-12));

  // Monotone decay toward the outer edge.
  CHECK(value_at(2.25, 0.25) > value_at(3.75, 0.25));
  CHECK(value_at(3.75, 0.25) > value_at(5.25, 0.25));

  // All values within [0, 1].
  for (double v : cgo.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  // Spec mismatch is rejected.
  GridSpec wrong = spec;
  wrong.origin.x += 0.3;
  CHECK_THROWS_AS(collision_given_occupancy(box, wrong), std::invalid_argument);
}

TEST_CASE("window edge cells carry the minimum positive falloff")
{
  // The ceil padding is under half a cell, so edge-cell centers always stay
  // inside the outer box: the smallest values in the field are positive and
  // sit on the window border.
  SafetyBox box;
  box.width = 7.5;
  box.length = 12.0;
  box.sub_length = 4.0;
  box.sub_width = 2.0;
  box.rear_extent = 6.0;
  box.anchor = {0.0, 0.0, 0.0};
  const GridSpec spec = safety_box_window(box, 1.0);
  REQUIRE(spec.rows == 8);
  const OccupancyGrid cgo = collision_given_occupancy(box, spec);

  double field_min = 2.0;
  for (double v : cgo.values) field_min = std::min(field_min, v);
  CHECK(field_min > 0.0);
  double edge_min = 2.0;
  for (int c = 0; c < spec.cols; ++c) {
    edge_min = std::min({edge_min, cgo.at(0, c), cgo.at(spec.rows - 1, c)});
  }
  CHECK(edge_min == field_min);
  CHECK(edge_min < 0.15);
}

TEST_CASE("cox adjustment closed forms")
{
  const CoxParams beta2{2.0};

  SECTION("k=1 passthrough is exact")
  {
    const std::vector<double> p{0.1, 0.8, 0.33};
    const std::vector<double> d{0.5, -0.5, 0.0};
    const std::vector<double> out = cox_adjust(p, d, beta2, 1);
    CHECK(out == p);
  }

  SECTION("delta = +1 is the identity factor")
  {
    const std::vector<double> out = cox_adjust({0.8}, {1.0}, beta2, 2);
    CHECK(out[0] == Catch::Approx(0.8).margin(1e-12));
  }

  SECTION("delta = -1 shrinks by exp(-2 beta), checked via the two-step form")
  {
    const std::vector<double> out = cox_adjust({0.5}, {-1.0}, beta2, 2);
    // Two-step reference: P * exp(beta * dP) / exp(beta).
    const double reference = 0.5 * std::exp(2.0 * -1.0) / std::exp(2.0);
    CHECK(out[0] == Catch::Approx(reference).margin(1e-12));
    CHECK(out[0] == Catch::Approx(0.5 * std::exp(-4.0)).margin(1e-12));
  }

  SECTION("negative beta is rejected")
  {
    CHECK_THROWS_AS(cox_adjust({0.5}, {0.0}, CoxParams{-0.1}, 2), std::invalid_argument);
  }
}

TEST_CASE("cox bounds and monotonicity under fuzzing")
{
  Rng rng(99);
  for (int i = 0; i < 10000; ++i) {
    const double p = rng.uniform();
    const double d = rng.uniform(-1.0, 1.0);
    const double beta = rng.uniform(0.0, 5.0);
    const double out = cox_adjust({p}, {d}, CoxParams{beta}, 2)[0];
    CHECK(out >= 0.0);
    CHECK(out <= 1.0);
    CHECK(out <= p + 1e-12);  // normalized ceiling
  }

  // Strictly increasing in delta for fixed p > 0, beta > 0.
  const CoxParams beta{1.7};
  double prev = -1.0;
  for (double d = -1.0; d <= 1.0; d += 0.05) {
    const double out = cox_adjust({0.6}, {d}, beta, 3)[0];
    CHECK(out > prev);
    prev = out;
  }

  // Ceiling attained only at delta = 1.
  CHECK(cox_adjust({0.6}, {1.0}, beta, 2)[0] == Catch::Approx(0.6).margin(1e-12));
  CHECK(cox_adjust({0.6}, {1.0 - 1e-6}, beta, 2)[0] < 0.6);
}

TEST_CASE("pora_step on an empty scene scores zero")
{
  const OccupancyGrid global = make_grid(world_spec(10.0, 0.5));
  const OrientedBox av{{0.0, 0.0, 0.0}, 4.5, 1.8};
  const PoraStepResult res = pora_step(nullptr, global, av, {5.0, 0.0}, {}, PoraParams{}, 1);
  CHECK(res.score == 0.0);
  CHECK(res.field.p_occ.empty());
}

TEST_CASE("pora_step: unit mass inside the subarea at k=2 with delta=+1 scores the occupancy")
{
  // Previous grid empty, current grid saturated at the AV position: the cell
  // inside the subarea has P(O)=1, dP=+1, so the Cox factor is exactly 1.
  PoraParams params;
  params.cox.beta = 2.0;
  const OrientedBox av{{0.0, 0.0, 0.0}, 4.5, 1.8};

  OccupancyGrid prev = make_grid(world_spec(20.0, 0.5), 0.0);
  OccupancyGrid curr = make_grid(world_spec(20.0, 0.5), 0.5);
  // Saturate a 2x2 cell patch at the AV center so resampling reads back 1.
  const auto [r0, c0] = world_to_cell(curr.spec, {0.0, 0.0, 0.0});
  for (int dr = -2; dr <= 2; ++dr) {
    for (int dc = -2; dc <= 2; ++dc) {
      curr.at(static_cast<int>(r0) + dr, static_cast<int>(c0) + dc) = 1.0;
    }
  }

  const PoraStepResult res = pora_step(&prev, curr, av, {0.0, 0.0}, one_other(), params, 2);
  CHECK(res.score == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("pora_step: static follower scene reduces by exp(-beta) at k>1")
{
  PoraParams params;
  params.cox.beta = 1.5;
  const OrientedBox av{{0.0, 0.0, 0.0}, 4.5, 1.8};

  Rng rng(4);
  OccupancyGrid prev = make_grid(world_spec(20.0, 0.5), 0.0);
  for (double & v : prev.values) v = rng.uniform() * 0.5;
  OccupancyGrid curr = prev;
  curr.t = 0.5;

  const PoraStepResult adjusted = pora_step(&prev, curr, av, {0.0, 0.0}, one_other(), params, 2);
  const PoraStepResult raw = pora_step(nullptr, curr, av, {0.0, 0.0}, one_other(), params, 1);

  CHECK(adjusted.score == Catch::Approx(raw.score * std::exp(-1.5)).margin(1e-12));
  CHECK(adjusted.score > 0.0);
  CHECK(adjusted.score < raw.score);
}

TEST_CASE("pora_step validates timestep ordering and k=1 passthrough")
{
  PoraParams params;
  const OrientedBox av{{0.0, 0.0, 0.0}, 4.5, 1.8};
  OccupancyGrid prev = make_grid(world_spec(10.0, 0.5), 1.0);
  OccupancyGrid curr = make_grid(world_spec(10.0, 0.5), 0.5);
  CHECK_THROWS_AS(
    pora_step(&prev, curr, av, {0.0, 0.0}, one_other(), params, 2), std::invalid_argument);

  // k=1: risk_norm equals p_coll exactly.
  curr.t = 2.0;
  Rng rng(5);
  for (double & v : curr.values) v = rng.uniform();
  const PoraStepResult res = pora_step(nullptr, curr, av, {3.0, 0.0}, one_other(), params, 1);
  CHECK(res.field.risk_norm == res.field.p_coll);
  for (std::size_t i = 0; i < res.field.p_coll.size(); ++i) {
    CHECK(res.field.p_coll[i] ==
          Catch::Approx(res.field.p_occ[i] * res.field.p_coll_given_occ[i]).margin(1e-12));
  }
}

TEST_CASE("adding occupancy mass never lowers the score")
{
  PoraParams params;
  params.cox.beta = 1.5;
  const OrientedBox av{{0.0, 0.0, 0.0}, 4.5, 1.8};
  Rng rng(6);
  OccupancyGrid prev = make_grid(world_spec(15.0, 0.5), 0.0);
  OccupancyGrid curr = make_grid(world_spec(15.0, 0.5), 0.5);
  for (double & v : curr.values) v = rng.uniform() * 0.4;

  // Mass is added while delta_p is held fixed by raising both grids equally.
  const double base =
    pora_step(&prev, curr, av, {2.0, 0.0}, one_other(), params, 2).score;
  OccupancyGrid curr2 = curr;
  OccupancyGrid prev2 = prev;
  for (std::size_t i = 0; i < curr2.values.size(); ++i) {
    const double bump = 0.3;
    curr2.values[i] = std::min(1.0, curr2.values[i] + bump);
    prev2.values[i] = std::min(1.0, prev2.values[i] + bump);
  }
  const double bumped =
    pora_step(&prev2, curr2, av, {2.0, 0.0}, one_other(), params, 2).score;
  CHECK(bumped >= base - 1e-9);
}

TEST_CASE("pora trajectory on all-zero grids scores zero everywhere")
{
  std::vector<TrajectorySample> samples;
  std::vector<OccupancyGrid> grids;
  for (int k = 0; k < 5; ++k) {
    samples.push_back({0.5 * (k + 1), {2.0 * k, 0.0, 0.0}, {4.0, 0.0}});
    grids.push_back(make_grid(world_spec(30.0, 0.5), 0.5 * (k + 1)));
  }
  const auto entries = pora_trajectory(
    make_planned_trajectory(samples), grids, {4.5, 1.8}, one_other(), PoraParams{});
  REQUIRE(entries.size() == 5);
  for (const auto & e : entries) CHECK(e.score == 0.0);
}

TEST_CASE("pora trajectory rejects misaligned grids")
{
  std::vector<TrajectorySample> samples;
  std::vector<OccupancyGrid> grids;
  for (int k = 0; k < 3; ++k) {
    samples.push_back({0.5 * (k + 1), {0.0, 0.0, 0.0}, {4.0, 0.0}});
    grids.push_back(make_grid(world_spec(10.0, 0.5), 0.5 * (k + 1)));
  }
  grids[2].t += 1e-3;
  CHECK_THROWS_AS(
    pora_trajectory(make_planned_trajectory(samples), grids, {4.5, 1.8}, one_other(), PoraParams{}),
    std::invalid_argument);
  grids.pop_back();
  CHECK_THROWS_AS(
    pora_trajectory(make_planned_trajectory(samples), grids, {4.5, 1.8}, one_other(), PoraParams{}),
    std::invalid_argument);
}

namespace
{

/// Closing-gap battery: another car approaches the (static) ego head-on.
/// Returns the PORA scores for the given cell size.
std::vector<double> closing_scores(double cell_size)
{
  PredictorConfig pc;
  pc.horizon_steps = 6;
  pc.step_dt = 0.5;
  pc.position_sigma0 = 0.5;
  pc.sigma_growth = 0.4;

  AgentState other;
  other.id = "o";
  other.box = {{28.0, 0.0, kPi}, 4.5, 1.8};
  other.velocity = {-6.0, 0.0};

  GridSpec spec;
  spec.cell_size = cell_size;
  spec.origin = {-25.0, -25.0, 0.0};
  spec.rows = static_cast<int>(std::lround(50.0 / cell_size));
  spec.cols = spec.rows;
  const auto grids = predict_occupancy({other}, spec, pc, 0.0);

  std::vector<TrajectorySample> samples;
  for (int k = 1; k <= pc.horizon_steps; ++k) {
    samples.push_back({k * pc.step_dt, {0.0, 0.0, 0.0}, {0.0, 0.0}});
  }
  PoraParams params;
  params.cell_size = cell_size;
  params.cox.beta = 1.5;

  std::vector<double> scores;
  for (const auto & e : pora_trajectory(
         make_planned_trajectory(samples), grids, {4.5, 1.8}, {other.box}, params)) {
    scores.push_back(e.score);
  }
  return scores;
}

}  // namespace

TEST_CASE("closing-gap scores are non-decreasing and agree with a fine-grid evaluation")
{
  const std::vector<double> coarse = closing_scores(0.5);
  const std::vector<double> fine = closing_scores(0.05);  // 10x resolution oracle

  for (std::size_t k = 1; k < coarse.size(); ++k) {
    CHECK(coarse[k] >= coarse[k - 1] - 1e-9);
    CHECK(fine[k] >= fine[k - 1] - 1e-9);
  }
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    CHECK(coarse[k] == Catch::Approx(fine[k]).margin(0.08));
  }
}

TEST_CASE("diverging scenario never exceeds the mirrored closing scenario")
{
  PredictorConfig pc;
  pc.horizon_steps = 6;
  pc.step_dt = 0.5;

  auto scores_for = [&](double start_x, double vx) {
    AgentState other;
    other.id = "o";
    other.box = {{start_x, 0.0, vx < 0.0 ? kPi : 0.0}, 4.5, 1.8};
    other.velocity = {vx, 0.0};
    GridSpec spec = world_spec(30.0, 0.5);
    const auto grids = predict_occupancy({other}, spec, pc, 0.0);
    std::vector<TrajectorySample> samples;
    for (int k = 1; k <= pc.horizon_steps; ++k) {
      samples.push_back({k * pc.step_dt, {0.0, 0.0, 0.0}, {0.0, 0.0}});
    }
    PoraParams params;
    params.cox.beta = 1.5;
    std::vector<double> out;
    for (const auto & e : pora_trajectory(
           make_planned_trajectory(samples), grids, {4.5, 1.8}, {other.box}, params)) {
      out.push_back(e.score);
    }
    return out;
  };

  // Mirrored kinematics around x = 19: closing from 28 at -6 m/s vs pulling
  // away from 10 at +6 m/s.
  const std::vector<double> closing = scores_for(28.0, -6.0);
  const std::vector<double> diverging = scores_for(10.0, 6.0);
  for (std::size_t k = 1; k < closing.size(); ++k) {
    CHECK(diverging[k] <= closing[k] + 1e-9);
  }
}

TEST_CASE("full-pipeline rotation equivariance")
{
  PredictorConfig pc;
  pc.horizon_steps = 4;
  pc.step_dt = 0.5;

  auto score_world = [&](double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    auto rot = [&](double x, double y) { return Vec2{c * x - s * y, s * x + c * y}; };

    AgentState other;
    other.id = "o";
    const Vec2 op = rot(20.0, 2.0);
    other.box = {{op.x, op.y, normalize_angle(kPi + angle)}, 4.5, 1.8};
    const Vec2 ov = rot(-7.0, 0.0);
    other.velocity = {ov.x, ov.y};

    GridSpec spec;
    spec.cell_size = 0.5;
    const Vec2 orig = rot(-30.0, -30.0);
    spec.origin = {orig.x, orig.y, normalize_angle(angle)};
    spec.rows = 120;
    spec.cols = 120;
    const auto grids = predict_occupancy({other}, spec, pc, 0.0);

    std::vector<TrajectorySample> samples;
    const Vec2 ev = rot(5.0, 0.0);
    for (int k = 1; k <= pc.horizon_steps; ++k) {
      const Vec2 pos = rot(5.0 * 0.5 * k, 0.0);
      samples.push_back({0.5 * k, {pos.x, pos.y, normalize_angle(angle)}, {ev.x, ev.y}});
    }
    PoraParams params;
    params.cox.beta = 1.5;
    std::vector<double> out;
    for (const auto & e : pora_trajectory(
           make_planned_trajectory(samples), grids, {4.5, 1.8}, {other.box}, params)) {
      out.push_back(e.score);
    }
    return out;
  };

  const std::vector<double> base = score_world(0.0);
  for (double angle : {0.37, kPi / 2.0, -2.0}) {
    const std::vector<double> turned = score_world(angle);
    for (std::size_t k = 0; k < base.size(); ++k) {
      CHECK(turned[k] == Catch::Approx(base[k]).margin(1e-4));
    }
  }
  CHECK(base.back() > 0.01);  // the scenario is not trivially zero
}
