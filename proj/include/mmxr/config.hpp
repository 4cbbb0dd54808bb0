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

#ifndef MMXR_CONFIG_HPP
#define MMXR_CONFIG_HPP

#include "mmxr/array.hpp"
#include "mmxr/channel.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mmxr
{

enum class RxBeamforming
{
    covrage,
    sectors,
    quasi_omni,
};

enum class Prediction
{
    none,
    extrapolation,
    device,
    oracle,
};

enum class BfLocation
{
    abft,
    dti,
};

/// Every knob of one simulated scenario. Defaults reproduce the default column of the
/// evaluation's parameter table; everything else is an implementation default.
struct ScenarioConfig
{
    double sim_time = 20.0;
    double room_length = 20.0;
    double room_width = 10.0;
    double room_height = 10.0;

    /// "high", "low", "static" or a path to a trace CSV.
    std::string rotation = "high";
    double rotation_peak_low = 60.0;   // deg/s
    double rotation_peak_high = 300.0; // deg/s
    double trace_rate = 1000.0;        // Hz
    double trace_duration = 21.0;      // s, synthetic traces loop after this
    double device_horizon = 0.1;       // s, horizon of the emulated on-device predictor

    double data_rate = 5e9;
    double frame_rate = 100.0;
    double deadline = 0.020;
    double queue_drop = 0.020;

    RxBeamforming rx_beamforming = RxBeamforming::covrage;
    Prediction prediction = Prediction::device;

    double bi_duration = 0.1024;
    double bhi_duration = 2.0e-3;
    double sls_duration = 0.75e-3;
    BfLocation bf_location = BfLocation::dti;
    double bf_interval = 0.1;

    int ap_rows = 8, ap_cols = 8;
    int hmd_rows = 64, hmd_cols = 64;
    double spacing = 0.5;
    double element_exponent = 0.0;

    int mpdu_bytes = 65536;
    int header_bytes = 100;
    double mpdu_overhead = 3e-6;

    int mcs = 21;
    McsTable mcs_table;
    LinkBudgetConfig link;

    double ap_x = 0.0, ap_y = 0.0, ap_z = 10.0;
    double hmd_height = 1.7;
    double walk_speed = 1.0;
    double walk_step = 0.5;
    double walk_start_x = 0.0, walk_start_y = 0.0;

    int covrage_kmax = 8;
    double pose_interval = 1e-3; // gap between the two poses fed to the extrapolator

    int quasi_omni_samples = 1000;
    std::uint64_t quasi_omni_seed = 7;
    int quasi_omni_iters = 200;
    int quasi_omni_iters_large = 24; // arrays above 16x16
    bool sphere_uniform = true;
    std::string ap_codebook;  // optional codebook file
    std::string hmd_codebook; // optional codebook file

    std::uint64_t seed = 1;
    bool event_log = true;

    ArrayGeometry ap_geometry() const;
    ArrayGeometry hmd_geometry() const;
    double burst_interval() const { return 1.0 / frame_rate; }
    /// Interval between beamforming refreshes: bf_interval in the DTI, one BI in the A-BFT.
    double beamforming_period() const { return bf_location == BfLocation::dti ? bf_interval : bi_duration; }
};

class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Names of every accepted key, in echo order.
const std::vector<std::string> &config_keys();

/// Set one key from its textual value. Throws ConfigError on unknown keys (listing the valid
/// ones) and on malformed values.
void set_config_value(ScenarioConfig &config, const std::string &key, const std::string &value);
std::string get_config_value(const ScenarioConfig &config, const std::string &key);

/// Range and cross-field checks. Throws ConfigError naming the offending key and its bounds.
void validate(const ScenarioConfig &config);

/// `key = value` lines, '#' comments; `mcs index rate threshold` lines extend the MCS table.
/// Later overrides (e.g. from the command line) are applied on top, then the result is validated.
ScenarioConfig parse_config(const std::string &text, const std::vector<std::pair<std::string, std::string>> &overrides = {});
ScenarioConfig load_config(const std::filesystem::path &path,
                           const std::vector<std::pair<std::string, std::string>> &overrides = {});

/// Every key with its effective value, one `# key = value` line each, MCS table included.
std::string echo_config(const ScenarioConfig &config);

std::string to_string(RxBeamforming v);
std::string to_string(Prediction v);
std::string to_string(BfLocation v);

} // namespace mmxr

#endif
