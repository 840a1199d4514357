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

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pora/grid.hpp"

namespace pora
{

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v)
{
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string & line)
{
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

/// CSV layout: one header row (rows, cols, cell_size, origin x/y/heading, t),
/// then `rows` lines of `cols` comma-separated values.
inline std::string grid_to_csv(const OccupancyGrid & g)
{
  std::ostringstream out;
  out << g.spec.rows << ',' << g.spec.cols << ',' << format_double(g.spec.cell_size) << ','
      << format_double(g.spec.origin.x) << ',' << format_double(g.spec.origin.y) << ','
      << format_double(g.spec.origin.heading) << ',' << format_double(g.t) << '\n';
  for (int r = 0; r < g.spec.rows; ++r) {
    for (int c = 0; c < g.spec.cols; ++c) {
      if (c) out << ',';
      out << format_double(g.at(r, c));
    }
    out << '\n';
  }
  return out.str();
}

inline OccupancyGrid grid_from_csv(const std::string & text)
{
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("grid csv: missing header");
  const auto header = split_csv_line(line);
  if (header.size() != 7) throw std::invalid_argument("grid csv: header needs 7 fields");

  GridSpec spec;
  spec.rows = std::stoi(header[0]);
  spec.cols = std::stoi(header[1]);
  spec.cell_size = std::strtod(header[2].c_str(), nullptr);
  spec.origin.x = std::strtod(header[3].c_str(), nullptr);
  spec.origin.y = std::strtod(header[4].c_str(), nullptr);
  spec.origin.heading = std::strtod(header[5].c_str(), nullptr);
  OccupancyGrid g = make_grid(spec, std::strtod(header[6].c_str(), nullptr));

  for (int r = 0; r < spec.rows; ++r) {
    if (!std::getline(in, line)) throw std::invalid_argument("grid csv: truncated values");
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != spec.cols) {
      throw std::invalid_argument("grid csv: wrong column count");
    }
    for (int c = 0; c < spec.cols; ++c) g.at(r, c) = std::strtod(fields[c].c_str(), nullptr);
  }
  return g;
}

inline nlohmann::json grid_to_json(const OccupancyGrid & g)
{
  return nlohmann::json{
    {"rows", g.spec.rows},
    {"cols", g.spec.cols},
    {"cell_size", g.spec.cell_size},
    {"origin", {{"x", g.spec.origin.x}, {"y", g.spec.origin.y}, {"heading", g.spec.origin.heading}}},
    {"t", g.t},
    {"values", g.values}};
}

inline OccupancyGrid grid_from_json(const nlohmann::json & j)
{
  GridSpec spec;
  spec.rows = j.at("rows").get<int>();
  spec.cols = j.at("cols").get<int>();
  spec.cell_size = j.at("cell_size").get<double>();
  spec.origin.x = j.at("origin").at("x").get<double>();
  spec.origin.y = j.at("origin").at("y").get<double>();
  spec.origin.heading = j.at("origin").at("heading").get<double>();
  OccupancyGrid g = make_grid(spec, j.at("t").get<double>());
  const auto & vals = j.at("values");
  if (vals.size() != g.values.size()) throw std::invalid_argument("grid json: wrong value count");
  g.values = vals.get<std::vector<double>>();
  return g;
}

inline void write_text_file(const std::string & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
}

inline std::string read_text_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Loads either format, deciding by file extension (.json vs anything else).
inline OccupancyGrid load_grid(const std::string & path)
{
  const std::string text = read_text_file(path);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    return grid_from_json(nlohmann::json::parse(text));
  }
  return grid_from_csv(text);
}

inline void save_grid(const std::string & path, const OccupancyGrid & g)
{
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    write_text_file(path, grid_to_json(g).dump(2) + "\n");
  } else {
    write_text_file(path, grid_to_csv(g));
  }
}

}  // namespace pora
