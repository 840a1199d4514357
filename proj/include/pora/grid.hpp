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
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pora/core.hpp"

namespace pora
{

/// Geometry of a square-celled grid.
///
/// Convention, used everywhere in this library:
///   - `origin` is the world pose of the corner of cell (0, 0);
///   - columns advance along the origin heading (the grid x axis);
///   - rows advance 90 degrees counterclockwise from it (the grid y axis);
///   - continuous coordinates (row, col) put the corner of cell (r, c) at
///     (r, c) and its center at (r + 0.5, c + 0.5).
struct GridSpec
{
  Pose2 origin;
  double cell_size{0.5};  // [m], square cells
  int rows{0};
  int cols{0};

  bool same_geometry(const GridSpec & o, double tol = 1e-9) const
  {
    return rows == o.rows && cols == o.cols && std::abs(cell_size - o.cell_size) <= tol &&
           std::abs(origin.x - o.origin.x) <= tol && std::abs(origin.y - o.origin.y) <= tol &&
           std::abs(normalize_angle(origin.heading - o.origin.heading)) <= tol;
  }
};

/// Continuous (row, col) grid coordinates of a world point.
inline std::pair<double, double> world_to_cell(const GridSpec & spec, const Pose2 & p)
{
  const Vec2 local = world_to_local(spec.origin, {p.x, p.y});
  return {local.y / spec.cell_size, local.x / spec.cell_size};
}

/// World position of the center of cell (row, col).
inline Vec2 cell_center_world(const GridSpec & spec, double row, double col)
{
  return local_to_world(
    spec.origin, {(col + 0.5) * spec.cell_size, (row + 0.5) * spec.cell_size});
}

/// Per-cell probability field at one prediction timestamp.
struct OccupancyGrid
{
  GridSpec spec;
  double t{0.0};                // prediction timestamp [s]
  std::vector<double> values;   // row-major, rows x cols

  double & at(int r, int c) { return values[static_cast<std::size_t>(r) * spec.cols + c]; }
  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * spec.cols + c]; }
};

inline OccupancyGrid make_grid(const GridSpec & spec, double t = 0.0, double fill = 0.0)
{
  if (spec.cell_size <= 0.0 || spec.rows < 1 || spec.cols < 1) {
    throw std::invalid_argument("grid spec needs positive cell size and extent");
  }
  OccupancyGrid g;
  g.spec = spec;
  g.t = t;
  g.values.assign(static_cast<std::size_t>(spec.rows) * spec.cols, fill);
  return g;
}

/// Bilinear interpolation among the four cell centers surrounding the
/// continuous coordinate. Neighbors outside the grid contribute 0, so reads
/// more than half a cell outside return exactly 0.
inline double sample_bilinear(const OccupancyGrid & g, double row, double col)
{
  const double v = row - 0.5;
  const double u = col - 0.5;
  const int r0 = static_cast<int>(std::floor(v));
  const int c0 = static_cast<int>(std::floor(u));
  const double fr = v - r0;
  const double fc = u - c0;

  auto value = [&](int r, int c) -> double {
    if (r < 0 || c < 0 || r >= g.spec.rows || c >= g.spec.cols) return 0.0;
    return g.at(r, c);
  };

  return (1.0 - fr) * ((1.0 - fc) * value(r0, c0) + fc * value(r0, c0 + 1)) +
         fr * ((1.0 - fc) * value(r0 + 1, c0) + fc * value(r0 + 1, c0 + 1));
}

/// Resample the source grid onto the window spec: every output cell takes the
/// bilinear sample at the world position of its center. This is the
/// translate/rotate/resample/trim step that produces AV-centered heatmaps.
inline OccupancyGrid resample_window(const OccupancyGrid & src, const GridSpec & window)
{
  OccupancyGrid out = make_grid(window, src.t);
  for (int r = 0; r < window.rows; ++r) {
    for (int c = 0; c < window.cols; ++c) {
      const Vec2 w = cell_center_world(window, r, c);
      const auto [row, col] = world_to_cell(src.spec, {w.x, w.y, 0.0});
      out.at(r, c) = sample_bilinear(src, row, col);
    }
  }
  return out;
}

inline double grid_total_mass(const OccupancyGrid & g)
{
  double sum = 0.0;
  for (double v : g.values) sum += v;
  return sum;
}

}  // namespace pora
