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
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pora
{

inline double mean(const std::vector<double> & x)
{
  if (x.empty()) throw std::invalid_argument("mean of empty vector");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double pearson(const std::vector<double> & x, const std::vector<double> & y)
{
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("pearson: bad input");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

/// Ranks with ties replaced by their average rank.
inline std::vector<double> average_ranks(const std::vector<double> & x)
{
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * (i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double spearman(const std::vector<double> & x, const std::vector<double> & y)
{
  return pearson(average_ranks(x), average_ranks(y));
}

/// Kendall's tau-b (tie-corrected; equals tau-a when there are no ties).
inline double kendall(const std::vector<double> & x, const std::vector<double> & y)
{
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("kendall: bad input");
  const std::size_t n = x.size();
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        ++ties_x;
      } else if (dy == 0.0) {
        ++ties_y;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n0 = 0.5 * static_cast<double>(n) * (n - 1);
  const double denom =
    std::sqrt((n0 - static_cast<double>(ties_x)) * (n0 - static_cast<double>(ties_y)));
  if (denom == 0.0) throw std::invalid_argument("kendall: zero variance");
  return static_cast<double>(concordant - discordant) / denom;
}

/// Fisher z-transform aggregation of correlation coefficients with the given
/// weights (typically n-3 per scenario).
inline double fisher_z_aggregate(
  const std::vector<double> & coefficients, const std::vector<double> & weights)
{
  if (coefficients.size() != weights.size() || coefficients.empty()) {
    throw std::invalid_argument("fisher z: bad input");
  }
  double zw = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    if (weights[i] <= 0.0) throw std::invalid_argument("fisher z: weights must be positive");
    const double r = std::clamp(coefficients[i], -1.0 + 1e-15, 1.0 - 1e-15);
    zw += weights[i] * std::atanh(r);
    wsum += weights[i];
  }
  return std::tanh(zw / wsum);
}

inline double weighted_mean(const std::vector<double> & x, const std::vector<double> & w)
{
  if (x.size() != w.size() || x.empty()) throw std::invalid_argument("weighted mean: bad input");
  double sum = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += w[i] * x[i];
    wsum += w[i];
  }
  if (wsum <= 0.0) throw std::invalid_argument("weighted mean: non-positive weight sum");
  return sum / wsum;
}

/// Histogram of samples over [0, 1] with `bins` equal bins; values on the
/// upper edge land in the last bin.
inline std::vector<double> histogram_unit(const std::vector<double> & samples, int bins)
{
  if (bins < 2) throw std::invalid_argument("histogram: need at least 2 bins");
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double s : samples) {
    const double clamped = std::clamp(s, 0.0, 1.0);
    int b = static_cast<int>(clamped * bins);
    if (b == bins) b = bins - 1;
    counts[static_cast<std::size_t>(b)] += 1.0;
  }
  return counts;
}

/// Add-one smoothing, then normalization to a probability vector.
inline std::vector<double> laplace_normalize(std::vector<double> counts)
{
  double total = 0.0;
  for (double & c : counts) {
    c += 1.0;
    total += c;
  }
  for (double & c : counts) c /= total;
  return counts;
}

/// KL(p || q) in nats over two aligned probability vectors.
inline double kl_divergence(const std::vector<double> & p, const std::vector<double> & q)
{
  if (p.size() != q.size() || p.empty()) throw std::invalid_argument("kl: bad input");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) throw std::invalid_argument("kl: zero q mass (smooth first)");
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

inline double percentile(std::vector<double> samples, double pct)
{
  if (samples.empty()) throw std::invalid_argument("percentile of empty vector");
  std::sort(samples.begin(), samples.end());
  const double idx = pct / 100.0 * static_cast<double>(samples.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(idx);
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  const double frac = idx - static_cast<double>(lo);
  return samples[lo] * (1.0 - frac) + samples[hi] * frac;
}

inline double median(std::vector<double> samples) { return percentile(std::move(samples), 50.0); }

}  // namespace pora
