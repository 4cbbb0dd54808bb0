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

#include "mmxr/codebook.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace mmxr
{

namespace
{

using cplx = std::complex<double>;

/// Per-sample row and column phasors; the element phasor is their product.
struct SampleSet
{
    std::size_t count = 0;
    int rows = 0;
    int cols = 0;
    std::vector<cplx> row_phasor; // [s * rows + r]
    std::vector<cplx> col_phasor; // [s * cols + c]
    std::vector<double> element;  // element amplitude factor per sample

    SampleSet(const ArrayGeometry &g, std::span<const Direction> dirs)
        : count(dirs.size()), rows(g.rows), cols(g.cols), row_phasor(dirs.size() * static_cast<std::size_t>(g.rows)),
          col_phasor(dirs.size() * static_cast<std::size_t>(g.cols)), element(dirs.size(), 1.0)
    {
        for (std::size_t s = 0; s < count; ++s)
        {
            const Vec3 u = dirs[s].to_unit_vector();
            for (int r = 0; r < rows; ++r)
                row_phasor[s * static_cast<std::size_t>(rows) + static_cast<std::size_t>(r)] =
                    std::polar(1.0, 2.0 * pi * g.z_offset(r) * u.z);
            for (int c = 0; c < cols; ++c)
                col_phasor[s * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)] =
                    std::polar(1.0, 2.0 * pi * g.y_offset(c) * u.y);
            if (g.element_exponent != 0.0)
                element[s] = u.x > 0.0 ? std::pow(u.x, 0.5 * g.element_exponent) : 0.0;
        }
    }

    cplx phasor(std::size_t s, int r, int c) const
    {
        return row_phasor[s * static_cast<std::size_t>(rows) + static_cast<std::size_t>(r)] *
               col_phasor[s * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)] * element[s];
    }
};

double power_ratio(const std::vector<double> &power)
{
    const auto [lo, hi] = std::minmax_element(power.begin(), power.end());
    if (!(*lo > 0.0))
        return std::numeric_limits<double>::infinity();
    return *hi / *lo;
}

double ratio_to_db(double ratio)
{
    if (!std::isfinite(ratio))
        return -2.0 * gain_floor_db;
    return 10.0 * std::log10(ratio);
}

void compute_fields(const SampleSet &set, const std::vector<double> &phases, double amplitude, std::vector<cplx> &field,
                    std::vector<double> &power)
{
    field.assign(set.count, cplx{0.0, 0.0});
    power.resize(set.count);
    std::vector<cplx> w(phases.size());
    for (std::size_t n = 0; n < phases.size(); ++n)
        w[n] = std::polar(amplitude, phases[n]);
    for (std::size_t s = 0; s < set.count; ++s)
    {
        cplx total{0.0, 0.0};
        for (int r = 0; r < set.rows; ++r)
        {
            cplx row_sum{0.0, 0.0};
            for (int c = 0; c < set.cols; ++c)
                row_sum += w[static_cast<std::size_t>(r * set.cols + c)] *
                           set.col_phasor[s * static_cast<std::size_t>(set.cols) + static_cast<std::size_t>(c)];
            total += row_sum * set.row_phasor[s * static_cast<std::size_t>(set.rows) + static_cast<std::size_t>(r)];
        }
        field[s] = total * set.element[s];
        power[s] = std::norm(field[s]);
    }
}

struct RefineOutcome
{
    std::vector<double> phases;
    double initial_db = 0.0;
    double final_db = 0.0;
};

RefineOutcome refine(const SampleSet &set, std::vector<double> phases, const QuasiOmniOptions &opt)
{
    const double amplitude = 1.0 / std::sqrt(static_cast<double>(phases.size()));
    std::vector<cplx> field;
    std::vector<double> power;
    compute_fields(set, phases, amplitude, field, power);
    double ratio = power_ratio(power);

    RefineOutcome out;
    out.initial_db = ratio_to_db(ratio);

    const double tol_ratio = std::pow(10.0, opt.tolerance_db / 10.0);
    double step = pi / 4.0;
    std::vector<cplx> delta_phasor(set.count);

    for (int sweep = 0; sweep < opt.max_iters && step >= 1e-3 && ratio > tol_ratio; ++sweep)
    {
        // Fresh fields each sweep so incremental updates never drift.
        compute_fields(set, phases, amplitude, field, power);
        ratio = power_ratio(power);
        bool improved = false;

        for (int r = 0; r < set.rows; ++r)
            for (int c = 0; c < set.cols; ++c)
            {
                const std::size_t n = static_cast<std::size_t>(r * set.cols + c);
                for (const double sign : {1.0, -1.0})
                {
                    const double candidate = phases[n] + sign * step;
                    const cplx d = std::polar(amplitude, candidate) - std::polar(amplitude, phases[n]);
                    double lo = std::numeric_limits<double>::infinity();
                    double hi = 0.0;
                    bool rejected = false;
                    for (std::size_t s = 0; s < set.count; ++s)
                    {
                        const cplx dp = d * set.phasor(s, r, c);
                        delta_phasor[s] = dp;
                        const double p = std::norm(field[s] + dp);
                        lo = std::min(lo, p);
                        hi = std::max(hi, p);
                        if (hi >= ratio * lo)
                        {
                            rejected = true;
                            break;
                        }
                    }
                    if (rejected || !(lo > 0.0))
                        continue;
                    for (std::size_t s = 0; s < set.count; ++s)
                    {
                        field[s] += delta_phasor[s];
                        power[s] = std::norm(field[s]);
                    }
                    phases[n] = std::remainder(candidate, 2.0 * pi);
                    ratio = hi / lo;
                    improved = true;
                    break;
                }
            }
        if (!improved)
            step *= 0.5;
    }

    compute_fields(set, phases, amplitude, field, power);
    out.final_db = ratio_to_db(power_ratio(power));
    out.phases = std::move(phases);
    return out;
}

std::vector<std::vector<double>> initial_points(const ArrayGeometry &g, const QuasiOmniOptions &opt)
{
    std::vector<std::vector<double>> starts;
    starts.emplace_back(g.size(), 0.0);

    std::mt19937_64 rng(opt.seed ^ 0x5bd1e9955bd1e995ULL);
    std::uniform_real_distribution<double> phase(-pi, pi);
    for (int i = 0; i < opt.random_starts; ++i)
    {
        std::vector<double> p(g.size());
        for (double &v : p)
            v = phase(rng);
        starts.push_back(std::move(p));
    }

    // Odd (cubic) phase profile: mirrored elements carry conjugate weights.
    const double ymax = std::max(std::abs(g.y_offset(0)), 1e-300);
    const double zmax = std::max(std::abs(g.z_offset(0)), 1e-300);
    std::vector<double> cubic(g.size());
    for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c)
        {
            const double y = g.cols > 1 ? g.y_offset(c) / ymax : 0.0;
            const double z = g.rows > 1 ? g.z_offset(r) / zmax : 0.0;
            cubic[static_cast<std::size_t>(r * g.cols + c)] = pi * (y * y * y + z * z * z);
        }
    starts.push_back(std::move(cubic));
    return starts;
}

QuasiOmniResult synthesize(const ArrayGeometry &geometry, const QuasiOmniOptions &opt, bool parallel)
{
    geometry.validate();
    if (opt.n_samples < 2)
        throw std::invalid_argument("synthesize_quasi_omni: need at least 2 sample directions");
    if (opt.max_iters < 0)
        throw std::invalid_argument("synthesize_quasi_omni: max_iters must be non-negative");

    const auto directions = sample_directions(opt.n_samples, opt.seed, opt.sphere_uniform);
    const SampleSet set(geometry, directions);
    const auto starts = initial_points(geometry, opt);
    std::vector<RefineOutcome> outcomes(starts.size());
    const auto n_starts = static_cast<std::ptrdiff_t>(starts.size());

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (std::ptrdiff_t i = 0; i < n_starts; ++i)
        outcomes[static_cast<std::size_t>(i)] = refine(set, starts[static_cast<std::size_t>(i)], opt);

    QuasiOmniResult result;
    result.best_start = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i)
    {
        result.start_ranges_db.push_back(outcomes[i].initial_db);
        result.final_ranges_db.push_back(outcomes[i].final_db);
        if (outcomes[i].final_db < outcomes[result.best_start].final_db)
            result.best_start = i;
    }
    result.range_db = outcomes[result.best_start].final_db;
    result.awv = Awv(std::move(outcomes[result.best_start].phases));
    return result;
}

} // namespace

double gain_range_db(const ArrayGeometry &geometry, const Awv &awv, std::span<const Direction> directions)
{
    if (directions.empty())
        return 0.0;
    const auto gains = gain_map(geometry, awv, directions);
    const auto [lo, hi] = std::minmax_element(gains.begin(), gains.end());
    return *hi - *lo;
}

QuasiOmniResult synthesize_quasi_omni(const ArrayGeometry &geometry, const QuasiOmniOptions &options)
{
    return synthesize(geometry, options, true);
}

QuasiOmniResult synthesize_quasi_omni_serial(const ArrayGeometry &geometry, const QuasiOmniOptions &options)
{
    return synthesize(geometry, options, false);
}

} // namespace mmxr
