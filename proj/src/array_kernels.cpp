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

#include <stdexcept>
#include <string>

namespace mmxr
{

std::vector<double> gain_map(const ArrayGeometry &geometry, const Awv &awv, std::span<const Direction> directions)
{
    const BeamPattern pattern(geometry, awv);
    std::vector<double> out(directions.size());
    const auto n = static_cast<std::ptrdiff_t>(directions.size());

#pragma omp parallel for schedule(static) if (n > 64)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = pattern.gain_db(directions[static_cast<std::size_t>(i)]);

    return out;
}

std::vector<double> gain_map_reference(const ArrayGeometry &geometry, const Awv &awv,
                                       std::span<const Direction> directions)
{
    geometry.validate();
    if (awv.size() != geometry.size())
        throw std::invalid_argument("gain_map_reference: AWV/geometry size mismatch (" + std::to_string(awv.size()) +
                                    " vs " + std::to_string(geometry.size()) + ")");
    const double a = awv.amplitude();
    std::vector<double> out;
    out.reserve(directions.size());
    for (const Direction &d : directions)
    {
        const Vec3 u = d.to_unit_vector();
        std::complex<double> sum{0.0, 0.0};
        for (std::size_t n = 0; n < awv.size(); ++n)
            sum += std::polar(a, awv.phases[n] + 2.0 * pi * geometry.element_position(n).dot(u));
        double element = 1.0;
        if (geometry.element_exponent != 0.0)
            element = u.x > 0.0 ? std::pow(u.x, 0.5 * geometry.element_exponent) : 0.0;
        out.push_back(field_to_db(sum * element));
    }
    return out;
}

} // namespace mmxr
