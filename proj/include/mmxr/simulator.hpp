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

// Discrete-event MAC: beacon intervals, sector sweeps, burst traffic and MPDU transmission over
// one line-of-sight link. The event loop is single-threaded; independent runs share nothing
// except the read-only quasi-omni cache.

#ifndef MMXR_SIMULATOR_HPP
#define MMXR_SIMULATOR_HPP

#include "mmxr/codebook.hpp"
#include "mmxr/config.hpp"
#include "mmxr/mobility.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mmxr
{

struct FrameRecord
{
    std::uint64_t frame_id = 0;
    double created = 0.0;
    std::optional<double> completed;
    bool delivered = false; // completed - created <= deadline
};

enum class EventKind
{
    // queued events
    beacon_start,
    bhi_end,
    burst_arrival,
    mpdu_tx_done,
    bf_trigger,
    sls_done,
    sim_end,
    // log-only
    bhi_start,
    sls_start,
    mpdu_tx_start,
    frame_complete,
    frame_drop,
    trace_seam,
};

std::string to_string(EventKind kind);

struct LogEntry
{
    double t = 0.0;
    EventKind kind = EventKind::sim_end;
    std::int64_t a = -1;
    std::int64_t b = -1;
    double value = 0.0;
    int flag = 0;
};

struct SimStats
{
    std::size_t bhi_count = 0;
    std::size_t sls_count = 0;      // DTI sweeps
    std::size_t bf_updates = 0;     // every beam refresh, in BHI or DTI
    std::size_t mpdu_attempts = 0;
    std::size_t mpdu_failures = 0;
    std::size_t frames_dropped = 0;
    std::size_t mpdus_per_frame = 0;
    double frame_airtime = 0.0;     // airtime of one whole frame on a clean link
};

struct SimResult
{
    std::vector<FrameRecord> frames;
    std::vector<LogEntry> log; // empty unless event_log is on
    SimStats stats;
};

/// Everything a run needs beyond the config: codebooks and the user's motion.
struct SimulationAssets
{
    Codebook ap;  // directional sectors + quasi-omni
    Codebook hmd; // sectors mode: full sweep codebook; otherwise only the quasi-omni AWV is used
    std::shared_ptr<const UserMotion> motion;
};

/// One MPDU of a frame before headers: payload sizes in bits, last one possibly shorter.
std::vector<std::int64_t> split_frame_bits(std::int64_t frame_bits, std::int64_t mpdu_payload_bits);

/// Airtime of one MPDU carrying `payload_bits` plus the configured header.
double mpdu_airtime(const ScenarioConfig &config, std::int64_t payload_bits);

/// Burst size in bits: data_rate / frame_rate rounded to an integer.
std::int64_t frame_bits(const ScenarioConfig &config);

/// AP mounted at the configured point, array boresight pointing straight down.
Pose ap_pose(const ScenarioConfig &config);

/// Quasi-omni AWV for a geometry, synthesized once per process per distinct option set.
Awv cached_quasi_omni(const ArrayGeometry &geometry, const QuasiOmniOptions &options);
QuasiOmniOptions quasi_omni_options(const ScenarioConfig &config, const ArrayGeometry &geometry);

TraceSet build_rotation_trace(const ScenarioConfig &config);
Walk build_walk(const ScenarioConfig &config);
SimulationAssets build_assets(const ScenarioConfig &config);

/// Index of the sweep slot with the largest gain toward `peer`, lowest index on ties.
std::size_t best_sweep_slot(const std::vector<BeamPattern> &slots, const Pose &self, const Vec3 &peer);

SimResult run(const ScenarioConfig &config, const SimulationAssets &assets);
SimResult run(const ScenarioConfig &config);

/// CSV `t,kind,detail`.
std::string format_event_log(const std::vector<LogEntry> &log);
void write_event_log(const std::vector<LogEntry> &log, const std::filesystem::path &path);

} // namespace mmxr

#endif
