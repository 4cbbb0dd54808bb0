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

#ifndef MMXR_ARRAY_HPP
#define MMXR_ARRAY_HPP

#include "mmxr/geometry.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace mmxr
{

inline constexpr double speed_of_light = 299792458.0;

/// Gain reported for a perfect null instead of -inf.
inline constexpr double gain_floor_db = -300.0;

/// Uniform planar array in the local y-z plane, centered on the origin, boresight +x.
/// Element (r, c) has index r * cols + c; column index runs along +y, row index along +z.
struct ArrayGeometry
{
    int rows = 8;
    int cols = 8;
    double spacing = 0.5;           // wavelengths
    double carrier_frequency = 60e9; // Hz
    double element_exponent = 0.0;  // cos^q element pattern, 0 = isotropic

    std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
    double wavelength() const { return speed_of_light / carrier_frequency; }

    /// Element offsets in wavelengths.
    double y_offset(int col) const { return (col - 0.5 * (cols - 1)) * spacing; }
    double z_offset(int row) const { return (row - 0.5 * (rows - 1)) * spacing; }
    Vec3 element_position(std::size_t n) const; // wavelengths

    void validate() const; // throws std::invalid_argument

    bool operator==(const ArrayGeometry &) const = default;
};

/// Phase-only antenna weight vector; every element carries amplitude 1 / sqrt(N).
struct Awv
{
    std::vector<double> phases; // radians

    Awv() = default;
    explicit Awv(std::vector<double> p) : phases(std::move(p)) {}
    static Awv zeros(std::size_t n) { return Awv(std::vector<double>(n, 0.0)); }

    std::size_t size() const { return phases.size(); }
    double amplitude() const { return 1.0 / std::sqrt(static_cast<double>(phases.size())); }

    bool operator==(const Awv &) const = default;
};

/// Phases that align all elements toward `direction`.
Awv steering_phases(const ArrayGeometry &geometry, const Direction &direction);

/// Element weights a * exp(j phi) cached for fast repeated pattern evaluation.
/// The far field separates over rows and columns, so one evaluation costs rows + cols
/// complex exponentials plus N multiply-adds.
class BeamPattern
{
  public:
    BeamPattern() = default;
    BeamPattern(const ArrayGeometry &geometry, const Awv &awv);

    const ArrayGeometry &geometry() const { return geometry_; }

    /// Complex far field toward a unit vector in the array frame.
    std::complex<double> field(const Vec3 &u) const;
    /// Field of the element subset [row0,row1) x [col0,col1).
    std::complex<double> partial_field(const Vec3 &u, int row0, int row1, int col0, int col1) const;
    double gain_db(const Vec3 &u) const;
    double gain_db(const Direction &d) const { return gain_db(d.to_unit_vector()); }

  private:
    double element_factor(const Vec3 &u) const;

    ArrayGeometry geometry_;
    std::vector<std::complex<double>> weights_;
};

double field_to_db(std::complex<double> f);

/// Array gain in dB over a single isotropic element.
double gain_db(const ArrayGeometry &geometry, const Awv &awv, const Direction &direction);

/// Batch gain evaluation, OpenMP-parallel over directions; output order matches input.
std::vector<double> gain_map(const ArrayGeometry &geometry, const Awv &awv, std::span<const Direction> directions);

/// Serial reference for gain_map: direct per-element summation, no separable factorization,
/// no threading. Kept for cross-checking the parallel kernel.
std::vector<double> gain_map_reference(const ArrayGeometry &geometry, const Awv &awv,
                                       std::span<const Direction> directions);

/// Pseudo-random directions, seed-deterministic. With `sphere_uniform` the elevation is the
/// arcsine of a uniform variate (equal-area); otherwise elevation is uniform in degrees.
std::vector<Direction> sample_directions(std::size_t count, std::uint64_t seed, bool sphere_uniform = true);

} // namespace mmxr

#endif
