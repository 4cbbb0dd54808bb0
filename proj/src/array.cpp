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

#include "mmxr/array.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

namespace mmxr
{

Vec3 ArrayGeometry::element_position(std::size_t n) const
{
    const int r = static_cast<int>(n / static_cast<std::size_t>(cols));
    const int c = static_cast<int>(n % static_cast<std::size_t>(cols));
    return {0.0, y_offset(c), z_offset(r)};
}

void ArrayGeometry::validate() const
{
    if (rows <= 0 || cols <= 0)
        throw std::invalid_argument("ArrayGeometry: rows and cols must be positive, got " + std::to_string(rows) +
                                    "x" + std::to_string(cols));
    if (!(spacing > 0.0) || !(carrier_frequency > 0.0))
        throw std::invalid_argument("ArrayGeometry: spacing and carrier frequency must be positive");
    if (element_exponent < 0.0)
        throw std::invalid_argument("ArrayGeometry: element exponent must be non-negative");
}

Awv steering_phases(const ArrayGeometry &geometry, const Direction &direction)
{
    geometry.validate();
    const Vec3 u = direction.to_unit_vector();
    std::vector<double> phases(geometry.size());
    for (int r = 0; r < geometry.rows; ++r)
        for (int c = 0; c < geometry.cols; ++c)
            phases[static_cast<std::size_t>(r * geometry.cols + c)] =
                -2.0 * pi * (geometry.y_offset(c) * u.y + geometry.z_offset(r) * u.z);
    return Awv(std::move(phases));
}

BeamPattern::BeamPattern(const ArrayGeometry &geometry, const Awv &awv) : geometry_(geometry)
{
    geometry.validate();
    if (awv.size() != geometry.size())
        throw std::invalid_argument("BeamPattern: AWV has " + std::to_string(awv.size()) + " phases, array has " +
                                    std::to_string(geometry.size()) + " elements");
    const double a = awv.amplitude();
    weights_.resize(awv.size());
    for (std::size_t n = 0; n < awv.size(); ++n)
        weights_[n] = std::polar(a, awv.phases[n]);
}

double BeamPattern::element_factor(const Vec3 &u) const
{
    if (geometry_.element_exponent == 0.0)
        return 1.0;
    if (u.x <= 0.0)
        return 0.0;
    // cos^q power pattern
    return std::pow(u.x, 0.5 * geometry_.element_exponent);
}

std::complex<double> BeamPattern::partial_field(const Vec3 &u, int row0, int row1, int col0, int col1) const
{
    const int cols = geometry_.cols;
    const double ky = 2.0 * pi * u.y;
    const double kz = 2.0 * pi * u.z;

    thread_local std::vector<std::complex<double>> col_phasor;
    col_phasor.resize(static_cast<std::size_t>(cols));
    for (int c = col0; c < col1; ++c)
        col_phasor[static_cast<std::size_t>(c)] = std::polar(1.0, ky * geometry_.y_offset(c));

    std::complex<double> total{0.0, 0.0};
    for (int r = row0; r < row1; ++r)
    {
        const std::complex<double> *w = weights_.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols);
        double re = 0.0, im = 0.0;
        for (int c = col0; c < col1; ++c)
        {
            const std::complex<double> p = col_phasor[static_cast<std::size_t>(c)];
            re += w[c].real() * p.real() - w[c].imag() * p.imag();
            im += w[c].real() * p.imag() + w[c].imag() * p.real();
        }
        total += std::complex<double>(re, im) * std::polar(1.0, kz * geometry_.z_offset(r));
    }
    return total * element_factor(u);
}

std::complex<double> BeamPattern::field(const Vec3 &u) const
{
    return partial_field(u, 0, geometry_.rows, 0, geometry_.cols);
}

double field_to_db(std::complex<double> f)
{
    const double p = std::norm(f);
    if (!(p > 0.0))
        return gain_floor_db;
    return std::max(10.0 * std::log10(p), gain_floor_db);
}

double BeamPattern::gain_db(const Vec3 &u) const { return field_to_db(field(u)); }

double gain_db(const ArrayGeometry &geometry, const Awv &awv, const Direction &direction)
{
    return BeamPattern(geometry, awv).gain_db(direction);
}

std::vector<Direction> sample_directions(std::size_t count, std::uint64_t seed, bool sphere_uniform)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Direction> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        double az = 180.0 * unit(rng);
        if (az <= -180.0)
            az = 180.0;
        const double v = unit(rng);
        const double el = sphere_uniform ? rad2deg(std::asin(v)) : 90.0 * v;
        out.push_back({az, el});
    }
    return out;
}

} // namespace mmxr
