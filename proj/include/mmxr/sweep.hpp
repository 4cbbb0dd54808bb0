// SPDX-License-Identifier: Apache-2.0
//
// mmxr - millimeter-wave interactive XR downlink simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MMXR_SWEEP_HPP
#define MMXR_SWEEP_HPP

#include "mmxr/metrics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mmxr
{

using Assignment = std::vector<std::pair<std::string, std::string>>;

/// Cells are every variant combined with every point of the cartesian product of the axes.
/// An empty variant list counts as one empty variant.
struct SweepSpec
{
    std::string base_text; // config file contents applied to every cell
    Assignment base_overrides;
    std::vector<Assignment> variants;
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
    std::uint64_t base_seed = 1;
};

struct SweepCell
{
    std::string key; // "k1=v1;k2=v2", variant keys first, then axes in declaration order
    Assignment assignment;
    std::uint64_t seed = 0;
};

struct CellResult
{
    SweepCell cell;
    std::optional<RunSummary> summary;
    std::string error; // set when the cell failed
};

/// Stable 64-bit seed for a cell: FNV-1a over the key, mixed with the base seed.
std::uint64_t cell_seed(std::uint64_t base_seed, const std::string &cell_key);

std::vector<SweepCell> expand(const SweepSpec &spec);

/// Runs every cell (OpenMP-parallel across cells). Failures are recorded, never thrown.
std::vector<CellResult> run_sweep(const SweepSpec &spec);

/// One row per cell in expansion order: assignment columns, seed, status and summary figures.
std::string format_sweep_csv(const std::vector<CellResult> &results);

/// Named presets: paper-fig4, paper-fig5a, paper-fig5b. Throws std::invalid_argument otherwise.
SweepSpec preset(const std::string &name);
std::vector<std::string> preset_names();

} // namespace mmxr

#endif
