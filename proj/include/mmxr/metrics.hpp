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

#ifndef MMXR_METRICS_HPP
#define MMXR_METRICS_HPP

#include "mmxr/simulator.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace mmxr
{

struct RunSummary
{
    std::size_t frame_count = 0;
    std::size_t delivered_count = 0; // completed within the deadline
    std::size_t completed_count = 0; // completed at all, late ones included
    std::size_t lost_count = 0;      // frame_count - delivered_count
    double reliability = 0.0;
    double deadline = 0.0;

    /// (latency s, fraction of all frames completed at or below it), one point per distinct
    /// latency. Late completions are included, so the curve may continue past the deadline.
    std::vector<std::pair<double, double>> latency_cdf;

    /// Over delivered frames; NaN when nothing was delivered.
    double min_latency = 0.0;
    double median_latency = 0.0;
    double max_latency = 0.0;

    std::vector<double> delivered_latencies; // sorted
};

/// Throws std::invalid_argument on an empty record list or a non-positive deadline.
RunSummary summarize(const std::vector<FrameRecord> &records, double deadline);

/// Nearest-rank quantile of the delivered latencies; NaN when nothing was delivered.
double latency_quantile(const RunSummary &summary, double q);

/// CDF value at latency x (fraction of all frames completed within x).
double cdf_at(const RunSummary &summary, double x);

/// Empty stretch of the CDF that starts at the top of the modal latency cluster: returns
/// (modal latency, distance to the next larger latency). `resolution` merges latencies closer
/// than that into one cluster.
std::pair<double, double> gap_above_mode(const RunSummary &summary, double resolution = 1e-6);

std::string format_frames_csv(const std::vector<FrameRecord> &records, const std::string &header = {});
std::vector<FrameRecord> parse_frames_csv(const std::string &csv);
std::vector<FrameRecord> read_frames_csv(const std::filesystem::path &path);

std::string format_cdf_csv(const RunSummary &summary);
/// `key=value` lines; `header` (comment lines) goes first.
std::string format_summary(const RunSummary &summary, const std::string &header = {});

struct OutputPaths
{
    std::filesystem::path frames;
    std::filesystem::path cdf;
    std::filesystem::path summary;

    static OutputPaths in(const std::filesystem::path &directory, const std::string &stem = "run");
};

/// Throws std::runtime_error when a file cannot be written.
void write_outputs(const RunSummary &summary, const std::vector<FrameRecord> &records, const OutputPaths &paths,
                   const std::string &header = {});

} // namespace mmxr

#endif
