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

#include "catch_amalgamated.hpp"
#include "test_support.hpp"

#include "mmxr/array.hpp"

using namespace mmxr;
using Catch::Matchers::WithinAbs;

TEST_CASE("Array - Geometry")
{
    const ArrayGeometry g{4, 3, 0.5, 60e9, 0.0};
    CHECK(g.size() == 12);
    CHECK_THAT(g.wavelength(), WithinAbs(speed_of_light / 60e9, 1e-15));
    CHECK_THAT(g.y_offset(0), WithinAbs(-0.5, 1e-15));
    CHECK_THAT(g.z_offset(3), WithinAbs(0.75, 1e-15));
    const Vec3 p = g.element_position(5); // r = 1, c = 2
    CHECK_THAT(p.y, WithinAbs(0.5, 1e-15));
    CHECK_THAT(p.z, WithinAbs(-0.25, 1e-15));
    CHECK(p.x == 0.0);

    CHECK_THROWS_AS((ArrayGeometry{0, 8, 0.5, 60e9, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ArrayGeometry{8, 8, 0.0, 60e9, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ArrayGeometry{8, 8, 0.5, -1.0, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS(BeamPattern(g, Awv::zeros(5)), std::invalid_argument);
}

TEST_CASE("Array - Steering reaches the coherent bound")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> az(-180.0, 180.0), el(-89.0, 89.0);
    for (auto [rows, cols] : {std::pair{8, 8}, std::pair{64, 64}, std::pair{1, 16}, std::pair{5, 3}})
    {
        const ArrayGeometry g{rows, cols, 0.5, 60e9, 0.0};
        const double bound = 10.0 * std::log10(static_cast<double>(g.size()));
        for (int i = 0; i < 20; ++i)
        {
            const Direction d{az(rng), el(rng)};
            const Awv awv = steering_phases(g, d);
            CHECK_THAT(gain_db(g, awv, d), WithinAbs(bound, 1e-9));
            // never above the bound anywhere
            for (const Direction &probe : sample_directions(50, static_cast<std::uint64_t>(i)))
                CHECK(gain_db(g, awv, probe) <= bound + 1e-9);
        }
    }
    // spec arithmetic: 18.06 dB for 8x8, 36.12 dB for 64x64
    CHECK_THAT(gain_db({8, 8, 0.5, 60e9, 0.0}, Awv::zeros(64), Direction{0.0, 0.0}), WithinAbs(18.06, 0.01));
    CHECK_THAT(gain_db({64, 64, 0.5, 60e9, 0.0}, Awv::zeros(4096), Direction{0.0, 0.0}), WithinAbs(36.12, 0.01));
}

TEST_CASE("Array - Global phase does not change gain")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ph(-pi, pi);
    const ArrayGeometry g{8, 8, 0.5, 60e9, 0.0};
    for (int i = 0; i < 20; ++i)
    {
        Awv awv = Awv::zeros(g.size());
        for (double &p : awv.phases)
            p = ph(rng);
        Awv shifted = awv;
        const double offset = ph(rng);
        for (double &p : shifted.phases)
            p += offset;
        const auto dirs = sample_directions(200, static_cast<std::uint64_t>(i) + 100);
        const auto a = gain_map(g, awv, dirs);
        const auto b = gain_map(g, shifted, dirs);
        for (std::size_t k = 0; k < dirs.size(); ++k)
            if (a[k] > -200.0)
                CHECK(std::abs(a[k] - b[k]) <= 1e-9);
    }
}

TEST_CASE("Array - Separable kernel matches direct summation and Eigen")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ph(-pi, pi);
    for (double q : {0.0, 2.0})
    {
        const ArrayGeometry g{6, 10, 0.5, 60e9, q};
        Awv awv = Awv::zeros(g.size());
        for (double &p : awv.phases)
            p = ph(rng);
        const auto dirs = sample_directions(500, 3);
        const auto fast = gain_map(g, awv, dirs);
        const auto slow = gain_map_reference(g, awv, dirs);
        REQUIRE(fast.size() == dirs.size());
        for (std::size_t k = 0; k < dirs.size(); ++k)
        {
            const double oracle = test::oracle_gain_db(g, awv, dirs[k].to_unit_vector());
            if (oracle < -150.0)
                continue;
            CHECK_THAT(fast[k], WithinAbs(slow[k], 1e-9));
            CHECK_THAT(fast[k], WithinAbs(oracle, 1e-9));
        }
    }
}

TEST_CASE("Array - Element pattern")
{
    const ArrayGeometry g{4, 4, 0.5, 60e9, 2.0};
    const Awv awv = Awv::zeros(g.size());
    CHECK(gain_db(g, awv, Direction{180.0, 0.0}) == gain_floor_db);
    // cos^2 power pattern: 60 degrees off boresight along a null-free cut is -6.02 dB plus array factor
    const Vec3 u = Direction{0.0, 60.0}.to_unit_vector();
    CHECK_THAT(BeamPattern(g, awv).gain_db(u), WithinAbs(test::oracle_gain_db(g, awv, u), 1e-9));
    CHECK(field_to_db({0.0, 0.0}) == gain_floor_db);
}

TEST_CASE("Array - Direction sampling")
{
    const auto a = sample_directions(2000, 42);
    const auto b = sample_directions(2000, 42);
    REQUIRE(a.size() == 2000);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        CHECK(a[i].azimuth == b[i].azimuth);
        CHECK(a[i].elevation == b[i].elevation);
    }
    CHECK(sample_directions(10, 43)[0].azimuth != a[0].azimuth);

    // equal-area sampling: mean of sin(el) ~ 0 and about half the points within |el| < 30
    double within = 0.0;
    for (const Direction &d : a)
    {
        CHECK(d.elevation >= -90.0);
        CHECK(d.elevation <= 90.0);
        CHECK(d.azimuth > -180.0 - 1e-12);
        CHECK(d.azimuth <= 180.0);
        within += std::abs(d.elevation) < 30.0 ? 1.0 : 0.0;
    }
    CHECK_THAT(within / 2000.0, WithinAbs(0.5, 0.05));
}
