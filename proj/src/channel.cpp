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

#include "mmxr/channel.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace mmxr
{

void LinkBudgetConfig::validate() const
{
    if (!(bandwidth_hz > 0.0))
        throw std::invalid_argument("link budget: bandwidth must be positive");
    if (!(carrier_hz > 0.0))
        throw std::invalid_argument("link budget: carrier frequency must be positive");
}

McsTable::McsTable() : entries_{McsEntry{}} {}

McsTable::McsTable(std::vector<McsEntry> entries) : entries_(std::move(entries))
{
    for (const auto &e : entries_)
        if (!(e.phy_rate > 0.0))
            throw std::invalid_argument("MCS " + std::to_string(e.index) + ": PHY rate must be positive");
}

const McsEntry &McsTable::at(int index) const
{
    for (const auto &e : entries_)
        if (e.index == index)
            return e;
    throw std::out_of_range("MCS " + std::to_string(index) + " not in table");
}

void McsTable::upsert(const McsEntry &entry)
{
    if (!(entry.phy_rate > 0.0))
        throw std::invalid_argument("MCS " + std::to_string(entry.index) + ": PHY rate must be positive");
    for (auto &e : entries_)
        if (e.index == entry.index)
        {
            e = entry;
            return;
        }
    entries_.push_back(entry);
    std::sort(entries_.begin(), entries_.end(), [](const McsEntry &a, const McsEntry &b) { return a.index < b.index; });
}

McsTable McsTable::parse(const std::string &text)
{
    McsTable table;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        std::istringstream ls(line);
        std::string keyword;
        if (!(ls >> keyword) || keyword.starts_with('#'))
            continue;
        McsEntry e;
        std::string extra;
        if (keyword != "mcs" || !(ls >> e.index >> e.phy_rate >> e.snr_threshold_db) || (ls >> extra))
            throw std::invalid_argument("MCS table line " + std::to_string(lineno) +
                                        ": expected 'mcs index rate_bps threshold_db'");
        table.upsert(e);
    }
    return table;
}

std::string McsTable::format() const
{
    std::ostringstream os;
    for (const auto &e : entries_)
    {
        char buf[128];
        std::snprintf(buf, sizeof buf, "mcs %d %.17g %.17g\n", e.index, e.phy_rate, e.snr_threshold_db);
        os << buf;
    }
    return os.str();
}

double free_space_path_loss_db(double distance_m, double carrier_hz)
{
    if (!(distance_m > 0.0))
        throw std::invalid_argument("free_space_path_loss: distance must be positive");
    return 20.0 * std::log10(4.0 * pi * distance_m * carrier_hz / speed_of_light);
}

double noise_floor_dbm(const LinkBudgetConfig &config)
{
    config.validate();
    return -174.0 + 10.0 * std::log10(config.bandwidth_hz) + config.noise_figure_db;
}

double gain_towards(const LinkEnd &end, const Vec3 &peer)
{
    if (end.pattern == nullptr)
        throw std::invalid_argument("gain_towards: link end has no beam pattern");
    const Pose pose{0.0, end.position, end.orientation};
    return end.pattern->gain_db(local_unit_vector(pose, peer));
}

double snr_db(const LinkBudgetConfig &config, const LinkEnd &transmitter, const LinkEnd &receiver)
{
    const double distance = (receiver.position - transmitter.position).norm();
    return config.tx_power_dbm + gain_towards(transmitter, receiver.position) +
           gain_towards(receiver, transmitter.position) - free_space_path_loss_db(distance, config.carrier_hz) -
           config.implementation_loss_db - config.extra_loss_db - noise_floor_dbm(config);
}

bool usable(double snr, const McsEntry &mcs) { return snr >= mcs.snr_threshold_db; }

} // namespace mmxr
