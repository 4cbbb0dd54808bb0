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

#include "mmxr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mmxr
{

RunSummary summarize(const std::vector<FrameRecord> &records, double deadline)
{
    if (records.empty())
        throw std::invalid_argument("summarize: no frame records");
    if (!(deadline > 0.0))
        throw std::invalid_argument("summarize: deadline must be positive");

    RunSummary s;
    s.frame_count = records.size();
    s.deadline = deadline;
    std::vector<double> completed;
    for (const FrameRecord &r : records)
    {
        if (!r.completed)
            continue;
        const double latency = *r.completed - r.created;
        completed.push_back(latency);
        if (latency <= deadline)
            s.delivered_latencies.push_back(latency);
    }
    std::sort(completed.begin(), completed.end());
    std::sort(s.delivered_latencies.begin(), s.delivered_latencies.end());
    s.completed_count = completed.size();
    s.delivered_count = s.delivered_latencies.size();
    s.lost_count = s.frame_count - s.delivered_count;
    const double total = static_cast<double>(s.frame_count);
    s.reliability = static_cast<double>(s.delivered_count) / total;

    // completed - created carries rounding noise; latencies within a nanosecond are one step
    constexpr double same_latency = 1e-9;
    for (std::size_t i = 0; i < completed.size(); ++i)
    {
        const double fraction = static_cast<double>(i + 1) / total;
        if (!s.latency_cdf.empty() && completed[i] - s.latency_cdf.back().first <= same_latency)
            s.latency_cdf.back() = {completed[i], fraction};
        else
            s.latency_cdf.emplace_back(completed[i], fraction);
    }

    if (s.delivered_latencies.empty())
    {
        s.min_latency = s.median_latency = s.max_latency = std::numeric_limits<double>::quiet_NaN();
    }
    else
    {
        s.min_latency = s.delivered_latencies.front();
        s.max_latency = s.delivered_latencies.back();
        s.median_latency = latency_quantile(s, 0.5);
    }
    return s;
}

double latency_quantile(const RunSummary &summary, double q)
{
    const auto &v = summary.delivered_latencies;
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    q = std::clamp(q, 0.0, 1.0);
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
    return v[rank == 0 ? 0 : rank - 1];
}

double cdf_at(const RunSummary &summary, double x)
{
    double value = 0.0;
    for (const auto &[latency, fraction] : summary.latency_cdf)
    {
        if (latency > x)
            break;
        value = fraction;
    }
    return value;
}

std::pair<double, double> gap_above_mode(const RunSummary &summary, double resolution)
{
    const auto &v = summary.delivered_latencies;
    if (v.empty())
        return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    // clusters of latencies closer than `resolution`
    std::size_t best_begin = 0, best_count = 0;
    for (std::size_t i = 0; i < v.size();)
    {
        std::size_t j = i + 1;
        while (j < v.size() && v[j] - v[j - 1] < resolution)
            ++j;
        if (j - i > best_count)
        {
            best_count = j - i;
            best_begin = i;
        }
        i = j;
    }
    const std::size_t top = best_begin + best_count - 1;
    // the next completion may be late, so search every completed latency
    double next = std::numeric_limits<double>::infinity();
    for (const auto &point : summary.latency_cdf)
        if (point.first > v[top] && point.first - v[top] >= resolution)
        {
            next = point.first;
            break;
        }
    return {v[best_begin], next - v[top]};
}

std::string format_frames_csv(const std::vector<FrameRecord> &records, const std::string &header)
{
    std::string out = header;
    out += "frame_id,created_s,completed_s,delivered\n";
    char buf[128];
    for (const FrameRecord &r : records)
    {
        if (r.completed)
            std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%d\n", static_cast<unsigned long long>(r.frame_id),
                          r.created, *r.completed, r.delivered ? 1 : 0);
        else
            std::snprintf(buf, sizeof buf, "%llu,%.17g,,%d\n", static_cast<unsigned long long>(r.frame_id), r.created,
                          r.delivered ? 1 : 0);
        out += buf;
    }
    return out;
}

std::vector<FrameRecord> parse_frames_csv(const std::string &csv)
{
    std::vector<FrameRecord> records;
    std::istringstream in(csv);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        if (!header_seen)
        {
            if (line != "frame_id,created_s,completed_s,delivered")
                throw std::runtime_error("frames CSV line " + std::to_string(line_no) + ": unexpected header");
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        if (line.back() == ',')
            cells.emplace_back();
        if (cells.size() != 4)
            throw std::runtime_error("frames CSV line " + std::to_string(line_no) + ": expected 4 columns");
        try
        {
            FrameRecord r;
            r.frame_id = std::stoull(cells[0]);
            r.created = std::stod(cells[1]);
            if (!cells[2].empty())
                r.completed = std::stod(cells[2]);
            r.delivered = cells[3] == "1";
            if (cells[3] != "0" && cells[3] != "1")
                throw std::invalid_argument("delivered must be 0 or 1");
            records.push_back(r);
        }
        catch (const std::exception &e)
        {
            throw std::runtime_error("frames CSV line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header_seen)
        throw std::runtime_error("frames CSV: missing header");
    return records;
}

std::vector<FrameRecord> read_frames_csv(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_frames_csv(buf.str());
}

std::string format_cdf_csv(const RunSummary &summary)
{
    std::string out = "latency_ms,fraction\n";
    char buf[96];
    for (const auto &[latency, fraction] : summary.latency_cdf)
    {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", latency * 1e3, fraction);
        out += buf;
    }
    return out;
}

std::string format_summary(const RunSummary &s, const std::string &header)
{
    std::string out = header;
    char buf[128];
    auto line = [&](const char *key, const char *fmt, double v) {
        std::snprintf(buf, sizeof buf, fmt, v);
        out += key;
        out += '=';
        out += buf;
        out += '\n';
    };
    auto count = [&](const char *key, std::size_t v) { out += std::string(key) + "=" + std::to_string(v) + "\n"; };
    count("frame_count", s.frame_count);
    count("delivered_count", s.delivered_count);
    count("completed_count", s.completed_count);
    count("lost_count", s.lost_count);
    line("reliability", "%.4f", s.reliability);
    line("deadline_ms", "%.3f", s.deadline * 1e3);
    line("min_latency_ms", "%.3f", s.min_latency * 1e3);
    line("median_latency_ms", "%.3f", s.median_latency * 1e3);
    line("p95_latency_ms", "%.3f", latency_quantile(s, 0.95) * 1e3);
    line("max_latency_ms", "%.3f", s.max_latency * 1e3);
    return out;
}

OutputPaths OutputPaths::in(const std::filesystem::path &directory, const std::string &stem)
{
    return {directory / (stem + "_frames.csv"), directory / (stem + "_cdf.csv"), directory / (stem + "_summary.txt")};
}

namespace
{

void write_text(const std::filesystem::path &path, const std::string &text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out)
        throw std::runtime_error("error writing " + path.string());
}

} // namespace

void write_outputs(const RunSummary &summary, const std::vector<FrameRecord> &records, const OutputPaths &paths,
                   const std::string &header)
{
    write_text(paths.frames, format_frames_csv(records, header));
    write_text(paths.cdf, format_cdf_csv(summary));
    write_text(paths.summary, format_summary(summary, header));
}

} // namespace mmxr
