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

#ifndef MMXR_CODEBOOK_HPP
#define MMXR_CODEBOOK_HPP

#include "mmxr/array.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmxr
{

struct Sector
{
    int id = 0;
    Direction aim;
    Awv awv;
};

/// Directional sectors plus one quasi-omni AWV. During a sweep the quasi-omni AWV acts as the
/// sector after the last directional one (id == sectors.size()).
struct Codebook
{
    ArrayGeometry geometry;
    std::vector<Sector> sectors;
    Awv quasi_omni;

    std::size_t sweep_size() const { return sectors.size() + 1; }
    /// AWV of sweep slot `id`; the last slot is the quasi-omni AWV.
    const Awv &awv(std::size_t id) const;
    void validate() const; // throws CodebookStructureError
};

/// Azimuths/elevations used for the default sector grid.
std::vector<double> default_sector_angles();

/// One sector per (azimuth, elevation) pair, elevation-outer, each steered at its aim.
/// The quasi-omni slot is filled with `quasi_omni` (all-zero phases when empty).
Codebook generate_sector_codebook(const ArrayGeometry &geometry, const std::vector<double> &azimuths,
                                  const std::vector<double> &elevations, Awv quasi_omni = {});

struct QuasiOmniOptions
{
    std::size_t n_samples = 1000;
    std::uint64_t seed = 1;
    int max_iters = 200;       // coordinate sweeps per start
    double tolerance_db = 0.0; // stop a start early once its range is at or below this
    bool sphere_uniform = true;
    int random_starts = 4;
};

struct QuasiOmniResult
{
    Awv awv;
    double range_db = 0.0;               // of the returned AWV over the sample set
    std::vector<double> start_ranges_db; // initial range of every start, in start order
    std::vector<double> final_ranges_db; // refined range of every start
    std::size_t best_start = 0;
};

/// Range (max - min, dB) of an AWV's gain over a set of directions.
double gain_range_db(const ArrayGeometry &geometry, const Awv &awv, std::span<const Direction> directions);

/// Phase-only synthesis of a near-uniform pattern: minimizes the range of gains over a fixed,
/// seed-determined sample of directions by multi-start coordinate descent. Starts are all-zero
/// phases, `random_starts` seeded random vectors, and a conjugate-symmetric cubic phase; the
/// starts are refined in parallel and the lowest range wins (ties to the lowest start index).
QuasiOmniResult synthesize_quasi_omni(const ArrayGeometry &geometry, const QuasiOmniOptions &options = {});

/// Same search, single-threaded. Reference for the parallel version; results are identical.
QuasiOmniResult synthesize_quasi_omni_serial(const ArrayGeometry &geometry, const QuasiOmniOptions &options = {});

class CodebookParseError : public std::runtime_error
{
  public:
    CodebookParseError(std::size_t line, const std::string &what)
        : std::runtime_error("codebook line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

class CodebookStructureError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Text format:
///   rows cols spacing freq
///   SECTOR id aim_az aim_el
///   <rows x cols phases, one array row per line>
///   ...
///   QUASIOMNI
///   <rows x cols phases>
/// Lines starting with '#' are comments.
void write_codebook(const Codebook &codebook, const std::filesystem::path &path);
Codebook read_codebook(const std::filesystem::path &path);
std::string format_codebook(const Codebook &codebook);
Codebook parse_codebook(const std::string &text);

} // namespace mmxr

#endif
