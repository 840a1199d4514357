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

// Geometry and risk math
#include "pora/core.hpp"
#include "pora/grid.hpp"
#include "pora/grid_io.hpp"
#include "pora/predictor.hpp"
#include "pora/risk.hpp"
#include "pora/surrogates.hpp"

// Monte Carlo harness
#include "pora/rng.hpp"
#include "pora/scenarios.hpp"
#include "pora/sim.hpp"
#include "pora/sim_io.hpp"

// Statistics
#include "pora/analysis.hpp"
#include "pora/stats.hpp"
