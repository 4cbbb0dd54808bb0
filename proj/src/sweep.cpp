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

#include "mmxr/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace mmxr
{

std::uint64_t cell_seed(std::uint64_t base_seed, const std::string &cell_key)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : cell_key)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::uint64_t x = h ^ (base_seed + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2));
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::vector<SweepCell> expand(const SweepSpec &spec)
{
    std::vector<Assignment> variants = spec.variants;
    if (variants.empty())
        variants.emplace_back();
    for (const auto &[key, values] : spec.axes)
        if (values.empty())
            throw std::invalid_argument("sweep axis '" + key + "' has no values");

    std::vector<SweepCell> cells;
    for (const Assignment &variant : variants)
    {
        std::vector<std::size_t> idx(spec.axes.size(), 0);
        for (;;)
        {
            SweepCell cell;
            cell.assignment = variant;
            for (std::size_t a = 0; a < spec.axes.size(); ++a)
                cell.assignment.emplace_back(spec.axes[a].first, spec.axes[a].second[idx[a]]);
            for (const auto &[k, v] : cell.assignment)
                cell.key += (cell.key.empty() ? "" : ";") + k + "=" + v;
            cell.seed = cell_seed(spec.base_seed, cell.key);
            cells.push_back(std::move(cell));

            bool done = true;
            for (std::size_t a = spec.axes.size(); a-- > 0;)
            {
                if (++idx[a] < spec.axes[a].second.size())
                {
                    done = false;
                    break;
                }
                idx[a] = 0;
            }
            if (done)
                break;
        }
    }
    std::set<std::string> keys;
    for (const SweepCell &c : cells)
        if (!keys.insert(c.key).second)
            throw std::invalid_argument("sweep has duplicate cell '" + c.key + "'");
    return cells;
}

std::vector<CellResult> run_sweep(const SweepSpec &spec)
{
    const std::vector<SweepCell> cells = expand(spec);
    std::vector<CellResult> results(cells.size());
    const auto n = static_cast<std::ptrdiff_t>(cells.size());

#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i)
    {
        CellResult &out = results[static_cast<std::size_t>(i)];
        out.cell = cells[static_cast<std::size_t>(i)];
        try
        {
            Assignment overrides = spec.base_overrides;
            overrides.insert(overrides.end(), out.cell.assignment.begin(), out.cell.assignment.end());
            overrides.emplace_back("seed", std::to_string(out.cell.seed));
            overrides.emplace_back("event_log", "false");
            const ScenarioConfig config = parse_config(spec.base_text, overrides);
            const SimResult sim = run(config);
            out.summary = summarize(sim.frames, config.deadline);
        }
        catch (const std::exception &e)
        {
            out.error = e.what();
        }
    }
    return results;
}

namespace
{

std::string csv_field(const std::string &s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s)
    {
        if (c == '"')
            q += '"';
        q += c == '\n' ? ' ' : c;
    }
    return q + "\"";
}

} // namespace

std::string format_sweep_csv(const std::vector<CellResult> &results)
{
    // union of assignment keys, first-seen order
    std::vector<std::string> columns;
    for (const CellResult &r : results)
        for (const auto &[k, v] : r.cell.assignment)
            if (std::find(columns.begin(), columns.end(), k) == columns.end())
                columns.push_back(k);

    std::string out;
    for (const std::string &c : columns)
        out += c + ",";
    out += "seed,status,frame_count,reliability,min_latency_ms,median_latency_ms,p95_latency_ms,p99_latency_ms,"
           "max_latency_ms,error\n";
    char buf[256];
    for (const CellResult &r : results)
    {
        for (const std::string &c : columns)
        {
            std::string value;
            for (const auto &[k, v] : r.cell.assignment)
                if (k == c)
                    value = v;
            out += csv_field(value) + ",";
        }
        out += std::to_string(r.cell.seed) + ",";
        if (r.summary)
        {
            const RunSummary &s = *r.summary;
            std::snprintf(buf, sizeof buf, "ok,%zu,%.4f,%.3f,%.3f,%.3f,%.3f,%.3f,", s.frame_count, s.reliability,
                          s.min_latency * 1e3, s.median_latency * 1e3, latency_quantile(s, 0.95) * 1e3,
                          latency_quantile(s, 0.99) * 1e3, s.max_latency * 1e3);
            out += buf;
            out += "\n";
        }
        else
        {
            out += "failed,,,,,,,," + csv_field(r.error) + "\n";
        }
    }
    return out;
}

std::vector<std::string> preset_names() { return {"paper-fig4", "paper-fig5a", "paper-fig5b"}; }

SweepSpec preset(const std::string &name)
{
    SweepSpec spec;
    if (name == "paper-fig4")
    {
        spec.variants = {
            {{"rx_beamforming", "covrage"}, {"hmd_array", "64x64"}},
            {{"rx_beamforming", "sectors"}, {"hmd_array", "8x8"}},
            {{"rx_beamforming", "quasi_omni"}, {"hmd_array", "8x8"}, {"prediction", "none"}},
            {{"rx_beamforming", "quasi_omni"}, {"hmd_array", "64x64"}, {"prediction", "none"}},
        };
        spec.axes = {{"data_rate", {"2e9", "5e9", "7e9"}}};
        spec.base_overrides = {{"rotation", "high"}};
        return spec;
    }
    if (name == "paper-fig5a")
    {
        spec.variants = {
            {{"bf_location", "dti"}, {"bf_interval", "0.1"}},
            {{"bf_location", "dti"}, {"bf_interval", "1.0"}},
            {{"bf_location", "abft"}},
        };
        spec.axes = {{"bi_duration", {"0.1024", "1.024"}}};
        spec.base_overrides = {{"rotation", "high"}};
        return spec;
    }
    if (name == "paper-fig5b")
    {
        spec.axes = {{"prediction", {"extrapolation", "device", "oracle"}}, {"rotation", {"low", "high"}}};
        return spec;
    }
    std::string valid;
    for (const std::string &p : preset_names())
        valid += (valid.empty() ? "" : ", ") + p;
    throw std::invalid_argument("unknown preset '" + name + "'; available: " + valid);
}

} // namespace mmxr
