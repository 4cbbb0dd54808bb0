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

#ifndef MMXR_CHANNEL_HPP
#define MMXR_CHANNEL_HPP

#include "mmxr/array.hpp"

#include <string>
#include <vector>

namespace mmxr
{

struct LinkBudgetConfig
{
    double tx_power_dbm = 10.0;
    double noise_figure_db = 10.0;
    double bandwidth_hz = 1.76e9;
    double carrier_hz = 60e9;
    double implementation_loss_db = 5.0;
    double extra_loss_db = 0.0; // scripted blockage / attenuation

    void validate() const;
};

struct McsEntry
{
    int index = 21;
    double phy_rate = 8.085e9; // bits/s
    double snr_threshold_db = 18.0;
};

/// Known MCS entries; the simulator runs one fixed entry.
class McsTable
{
  public:
    McsTable(); // default table: MCS 21 only
    explicit McsTable(std::vector<McsEntry> entries);

    const McsEntry &at(int index) const; // throws std::out_of_range
    const std::vector<McsEntry> &entries() const { return entries_; }
    void upsert(const McsEntry &entry);

    /// Lines `mcs index rate_bps threshold_db`; '#' comments and blank lines skipped.
    static McsTable parse(const std::string &text);
    std::string format() const;

  private:
    std::vector<McsEntry> entries_;
};

/// 20 log10(4 pi d f / c). Throws std::invalid_argument for d <= 0.
double free_space_path_loss_db(double distance_m, double carrier_hz);

/// -174 dBm/Hz + 10 log10(B) + NF.
double noise_floor_dbm(const LinkBudgetConfig &config);

/// One end of the link: where it is, how it is oriented, and what its current beam looks like.
struct LinkEnd
{
    Vec3 position;
    Quaternion orientation; // array frame -> world
    const BeamPattern *pattern = nullptr;
};

struct LinkState
{
    double t = 0.0;
    double snr_db = 0.0;
    bool usable = false;
};

/// Gain of `end`'s beam toward `peer`, in dB.
double gain_towards(const LinkEnd &end, const Vec3 &peer);

/// tx + G_tx + G_rx - FSPL - implementation loss - extra loss - noise floor.
double snr_db(const LinkBudgetConfig &config, const LinkEnd &transmitter, const LinkEnd &receiver);

bool usable(double snr_db, const McsEntry &mcs);

} // namespace mmxr

#endif
