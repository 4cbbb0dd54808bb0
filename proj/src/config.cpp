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

#include "mmxr/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <tuple>

namespace mmxr
{

namespace
{

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string &key, const std::string &text)
{
    double v = 0.0;
    const char *first = text.data();
    const char *last = text.data() + text.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw ConfigError(key + ": '" + text + "' is not a number");
    return v;
}

long long parse_integer(const std::string &key, const std::string &text)
{
    long long v = 0;
    const char *last = text.data() + text.size();
    const auto res = std::from_chars(text.data(), last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw ConfigError(key + ": '" + text + "' is not an integer");
    return v;
}

bool parse_bool(const std::string &key, const std::string &text)
{
    if (text == "true" || text == "1" || text == "yes" || text == "on")
        return true;
    if (text == "false" || text == "0" || text == "no" || text == "off")
        return false;
    throw ConfigError(key + ": '" + text + "' is not a boolean");
}

std::pair<int, int> parse_array(const std::string &key, const std::string &text)
{
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos)
        throw ConfigError(key + ": expected ROWSxCOLS, got '" + text + "'");
    const long long r = parse_integer(key, trim(text.substr(0, x)));
    const long long c = parse_integer(key, trim(text.substr(x + 1)));
    if (r < 1 || c < 1 || r > 4096 || c > 4096)
        throw ConfigError(key + ": array dimensions must lie in [1, 4096]");
    return {static_cast<int>(r), static_cast<int>(c)};
}

template <typename E>
E parse_enum(const std::string &key, const std::string &text, std::initializer_list<std::pair<const char *, E>> options)
{
    std::string valid;
    for (const auto &[name, value] : options)
    {
        if (text == name)
            return value;
        valid += valid.empty() ? "" : ", ";
        valid += name;
    }
    throw ConfigError(key + ": '" + text + "' is not one of {" + valid + "}");
}

struct KeySpec
{
    std::string name;
    std::function<void(ScenarioConfig &, const std::string &)> set;
    std::function<std::string(const ScenarioConfig &)> get;
};

KeySpec real(const std::string &name, double ScenarioConfig::*field)
{
    return {name, [name, field](ScenarioConfig &c, const std::string &v) { c.*field = parse_double(name, v); },
            [field](const ScenarioConfig &c) { return fmt_double(c.*field); }};
}

KeySpec link_real(const std::string &name, double LinkBudgetConfig::*field)
{
    return {name, [name, field](ScenarioConfig &c, const std::string &v) { c.link.*field = parse_double(name, v); },
            [field](const ScenarioConfig &c) { return fmt_double(c.link.*field); }};
}

KeySpec integer(const std::string &name, int ScenarioConfig::*field)
{
    return {name,
            [name, field](ScenarioConfig &c, const std::string &v) {
                const long long x = parse_integer(name, v);
                if (x < -2147483647LL || x > 2147483647LL)
                    throw ConfigError(name + ": value out of integer range");
                c.*field = static_cast<int>(x);
            },
            [field](const ScenarioConfig &c) { return std::to_string(c.*field); }};
}

KeySpec seed_key(const std::string &name, std::uint64_t ScenarioConfig::*field)
{
    return {name,
            [name, field](ScenarioConfig &c, const std::string &v) {
                std::uint64_t x = 0;
                const char *last = v.data() + v.size();
                const auto res = std::from_chars(v.data(), last, x);
                if (res.ec != std::errc() || res.ptr != last)
                    throw ConfigError(name + ": '" + v + "' is not a non-negative integer");
                c.*field = x;
            },
            [field](const ScenarioConfig &c) { return std::to_string(c.*field); }};
}

KeySpec text_key(const std::string &name, std::string ScenarioConfig::*field)
{
    return {name, [field](ScenarioConfig &c, const std::string &v) { c.*field = v; },
            [field](const ScenarioConfig &c) { return c.*field; }};
}

KeySpec boolean(const std::string &name, bool ScenarioConfig::*field)
{
    return {name, [name, field](ScenarioConfig &c, const std::string &v) { c.*field = parse_bool(name, v); },
            [field](const ScenarioConfig &c) { return std::string(c.*field ? "true" : "false"); }};
}

const std::vector<KeySpec> &registry()
{
    static const std::vector<KeySpec> keys = [] {
        std::vector<KeySpec> k;
        k.push_back(real("sim_time", &ScenarioConfig::sim_time));
        k.push_back(real("room_length", &ScenarioConfig::room_length));
        k.push_back(real("room_width", &ScenarioConfig::room_width));
        k.push_back(real("room_height", &ScenarioConfig::room_height));
        k.push_back(text_key("rotation", &ScenarioConfig::rotation));
        k.push_back(real("rotation_peak_low", &ScenarioConfig::rotation_peak_low));
        k.push_back(real("rotation_peak_high", &ScenarioConfig::rotation_peak_high));
        k.push_back(real("trace_rate", &ScenarioConfig::trace_rate));
        k.push_back(real("trace_duration", &ScenarioConfig::trace_duration));
        k.push_back(real("device_horizon", &ScenarioConfig::device_horizon));
        k.push_back(real("data_rate", &ScenarioConfig::data_rate));
        k.push_back(real("frame_rate", &ScenarioConfig::frame_rate));
        k.push_back(real("deadline", &ScenarioConfig::deadline));
        k.push_back(real("queue_drop", &ScenarioConfig::queue_drop));
        k.push_back({"rx_beamforming",
                     [](ScenarioConfig &c, const std::string &v) {
                         c.rx_beamforming = parse_enum<RxBeamforming>("rx_beamforming", v,
                                                                      {{"covrage", RxBeamforming::covrage},
                                                                       {"sectors", RxBeamforming::sectors},
                                                                       {"quasi_omni", RxBeamforming::quasi_omni}});
                     },
                     [](const ScenarioConfig &c) { return to_string(c.rx_beamforming); }});
        k.push_back({"prediction",
                     [](ScenarioConfig &c, const std::string &v) {
                         c.prediction = parse_enum<Prediction>("prediction", v,
                                                               {{"none", Prediction::none},
                                                                {"extrapolation", Prediction::extrapolation},
                                                                {"device", Prediction::device},
                                                                {"oracle", Prediction::oracle}});
                     },
                     [](const ScenarioConfig &c) { return to_string(c.prediction); }});
        k.push_back(real("bi_duration", &ScenarioConfig::bi_duration));
        k.push_back(real("bhi_duration", &ScenarioConfig::bhi_duration));
        k.push_back(real("sls_duration", &ScenarioConfig::sls_duration));
        k.push_back({"bf_location",
                     [](ScenarioConfig &c, const std::string &v) {
                         c.bf_location = parse_enum<BfLocation>("bf_location", v,
                                                                {{"abft", BfLocation::abft}, {"dti", BfLocation::dti}});
                     },
                     [](const ScenarioConfig &c) { return to_string(c.bf_location); }});
        k.push_back(real("bf_interval", &ScenarioConfig::bf_interval));
        k.push_back({"ap_array",
                     [](ScenarioConfig &c, const std::string &v) {
                         std::tie(c.ap_rows, c.ap_cols) = parse_array("ap_array", v);
                     },
                     [](const ScenarioConfig &c) { return std::to_string(c.ap_rows) + "x" + std::to_string(c.ap_cols); }});
        k.push_back({"hmd_array",
                     [](ScenarioConfig &c, const std::string &v) {
                         std::tie(c.hmd_rows, c.hmd_cols) = parse_array("hmd_array", v);
                     },
                     [](const ScenarioConfig &c) {
                         return std::to_string(c.hmd_rows) + "x" + std::to_string(c.hmd_cols);
                     }});
        k.push_back(real("spacing", &ScenarioConfig::spacing));
        k.push_back(real("element_exponent", &ScenarioConfig::element_exponent));
        k.push_back(integer("mpdu_bytes", &ScenarioConfig::mpdu_bytes));
        k.push_back(integer("header_bytes", &ScenarioConfig::header_bytes));
        k.push_back(real("mpdu_overhead", &ScenarioConfig::mpdu_overhead));
        k.push_back(integer("mcs", &ScenarioConfig::mcs));
        k.push_back(link_real("tx_power", &LinkBudgetConfig::tx_power_dbm));
        k.push_back(link_real("noise_figure", &LinkBudgetConfig::noise_figure_db));
        k.push_back(link_real("bandwidth", &LinkBudgetConfig::bandwidth_hz));
        k.push_back(link_real("carrier", &LinkBudgetConfig::carrier_hz));
        k.push_back(link_real("implementation_loss", &LinkBudgetConfig::implementation_loss_db));
        k.push_back(link_real("extra_loss", &LinkBudgetConfig::extra_loss_db));
        k.push_back(real("ap_x", &ScenarioConfig::ap_x));
        k.push_back(real("ap_y", &ScenarioConfig::ap_y));
        k.push_back(real("ap_z", &ScenarioConfig::ap_z));
        k.push_back(real("hmd_height", &ScenarioConfig::hmd_height));
        k.push_back(real("walk_speed", &ScenarioConfig::walk_speed));
        k.push_back(real("walk_step", &ScenarioConfig::walk_step));
        k.push_back(real("walk_start_x", &ScenarioConfig::walk_start_x));
        k.push_back(real("walk_start_y", &ScenarioConfig::walk_start_y));
        k.push_back(integer("covrage_kmax", &ScenarioConfig::covrage_kmax));
        k.push_back(real("pose_interval", &ScenarioConfig::pose_interval));
        k.push_back(integer("quasi_omni_samples", &ScenarioConfig::quasi_omni_samples));
        k.push_back(seed_key("quasi_omni_seed", &ScenarioConfig::quasi_omni_seed));
        k.push_back(integer("quasi_omni_iters", &ScenarioConfig::quasi_omni_iters));
        k.push_back(integer("quasi_omni_iters_large", &ScenarioConfig::quasi_omni_iters_large));
        k.push_back(boolean("sphere_uniform", &ScenarioConfig::sphere_uniform));
        k.push_back(text_key("ap_codebook", &ScenarioConfig::ap_codebook));
        k.push_back(text_key("hmd_codebook", &ScenarioConfig::hmd_codebook));
        k.push_back(seed_key("seed", &ScenarioConfig::seed));
        k.push_back(boolean("event_log", &ScenarioConfig::event_log));
        return k;
    }();
    return keys;
}

const KeySpec &find_key(const std::string &key)
{
    for (const KeySpec &k : registry())
        if (k.name == key)
            return k;
    std::string valid;
    for (const KeySpec &k : registry())
        valid += (valid.empty() ? "" : ", ") + k.name;
    throw ConfigError("unknown key '" + key + "'; valid keys: " + valid);
}

void require(bool ok, const std::string &message)
{
    if (!ok)
        throw ConfigError(message);
}

} // namespace

ArrayGeometry ScenarioConfig::ap_geometry() const
{
    return ArrayGeometry{ap_rows, ap_cols, spacing, link.carrier_hz, element_exponent};
}

ArrayGeometry ScenarioConfig::hmd_geometry() const
{
    return ArrayGeometry{hmd_rows, hmd_cols, spacing, link.carrier_hz, element_exponent};
}

std::string to_string(RxBeamforming v)
{
    switch (v)
    {
    case RxBeamforming::covrage:
        return "covrage";
    case RxBeamforming::sectors:
        return "sectors";
    case RxBeamforming::quasi_omni:
        return "quasi_omni";
    }
    return "?";
}

std::string to_string(Prediction v)
{
    switch (v)
    {
    case Prediction::none:
        return "none";
    case Prediction::extrapolation:
        return "extrapolation";
    case Prediction::device:
        return "device";
    case Prediction::oracle:
        return "oracle";
    }
    return "?";
}

std::string to_string(BfLocation v)
{
    return v == BfLocation::abft ? "abft" : "dti";
}

const std::vector<std::string> &config_keys()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const KeySpec &k : registry())
            n.push_back(k.name);
        return n;
    }();
    return names;
}

void set_config_value(ScenarioConfig &config, const std::string &key, const std::string &value)
{
    find_key(key).set(config, value);
}

std::string get_config_value(const ScenarioConfig &config, const std::string &key)
{
    return find_key(key).get(config);
}

void validate(const ScenarioConfig &c)
{
    auto positive = [](const char *key, double v) {
        require(v > 0.0, std::string(key) + " must be > 0 (got " + fmt_double(v) + ")");
    };
    positive("sim_time", c.sim_time);
    positive("room_length", c.room_length);
    positive("room_width", c.room_width);
    positive("room_height", c.room_height);
    positive("trace_rate", c.trace_rate);
    require(c.trace_duration * c.trace_rate >= 2.0, "trace_duration must cover at least two trace samples");
    require(c.device_horizon >= 0.0, "device_horizon must be >= 0");
    require(c.rotation_peak_low >= 0.0 && c.rotation_peak_high >= 0.0, "rotation peaks must be >= 0");
    require(c.data_rate > 0.0 && c.data_rate <= 8e9,
            "data_rate out of range (0, 8e9] bits/s (got " + fmt_double(c.data_rate) + ")");
    positive("frame_rate", c.frame_rate);
    positive("deadline", c.deadline);
    positive("queue_drop", c.queue_drop);
    positive("bi_duration", c.bi_duration);
    require(c.bhi_duration >= 0.0 && c.bhi_duration < c.bi_duration,
            "bhi_duration must lie in [0, bi_duration) (got " + fmt_double(c.bhi_duration) + ")");
    positive("sls_duration", c.sls_duration);
    positive("bf_interval", c.bf_interval);
    require(c.spacing > 0.0, "spacing must be > 0");
    require(c.element_exponent >= 0.0, "element_exponent must be >= 0");
    require(c.mpdu_bytes >= 1, "mpdu_bytes must be >= 1");
    require(c.header_bytes >= 0, "header_bytes must be >= 0");
    require(c.mpdu_overhead >= 0.0, "mpdu_overhead must be >= 0");
    try
    {
        c.mcs_table.at(c.mcs);
        c.link.validate();
    }
    catch (const std::exception &e)
    {
        throw ConfigError(e.what());
    }
    require(c.ap_z - c.hmd_height > 0.0, "ap_z must be above hmd_height");
    require(std::abs(c.ap_x) <= 0.5 * c.room_length && std::abs(c.ap_y) <= 0.5 * c.room_width,
            "ap position must lie inside the room");
    require(c.hmd_height > 0.0 && c.hmd_height < c.room_height, "hmd_height must lie in (0, room_height)");
    require(c.walk_speed >= 0.0, "walk_speed must be >= 0");
    positive("walk_step", c.walk_step);
    require(std::abs(c.walk_start_x) < 0.5 * c.room_length - 1e-9 && std::abs(c.walk_start_y) < 0.5 * c.room_width - 1e-9,
            "walk start must lie strictly inside the room");
    require(c.covrage_kmax >= 1, "covrage_kmax must be >= 1");
    positive("pose_interval", c.pose_interval);
    require(c.quasi_omni_samples >= 2, "quasi_omni_samples must be >= 2");
    require(c.quasi_omni_iters >= 0 && c.quasi_omni_iters_large >= 0, "quasi_omni iteration caps must be >= 0");
    require(!c.rotation.empty(), "rotation must be high, low, static or a trace path");

    if (c.rx_beamforming == RxBeamforming::sectors)
        require(c.hmd_rows <= 16 && c.hmd_cols <= 16,
                "rx_beamforming=sectors needs hmd_array <= 16x16 (got " + std::to_string(c.hmd_rows) + "x" +
                    std::to_string(c.hmd_cols) + ")");
    if (c.rx_beamforming == RxBeamforming::quasi_omni)
        require(c.prediction == Prediction::none, "rx_beamforming=quasi_omni requires prediction=none");
}

ScenarioConfig parse_config(const std::string &text, const std::vector<std::pair<std::string, std::string>> &overrides)
{
    ScenarioConfig config;
    bool queue_drop_set = false;
    bool mcs_table_seen = false;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
        {
            if (line.rfind("mcs", 0) == 0 && line.size() > 3 && (line[3] == ' ' || line[3] == '\t'))
            {
                McsTable parsed;
                try
                {
                    parsed = McsTable::parse(line);
                }
                catch (const std::exception &e)
                {
                    throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
                }
                if (!mcs_table_seen)
                    config.mcs_table = McsTable(std::vector<McsEntry>{});
                mcs_table_seen = true;
                for (const McsEntry &entry : parsed.entries())
                    config.mcs_table.upsert(entry);
                continue;
            }
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try
        {
            set_config_value(config, key, value);
        }
        catch (const ConfigError &e)
        {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
        queue_drop_set |= key == "queue_drop";
    }
    for (const auto &[key, value] : overrides)
    {
        set_config_value(config, key, value);
        queue_drop_set |= key == "queue_drop";
    }
    if (!queue_drop_set)
        config.queue_drop = config.deadline;
    validate(config);
    return config;
}

ScenarioConfig load_config(const std::filesystem::path &path,
                           const std::vector<std::pair<std::string, std::string>> &overrides)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), overrides);
}

std::string echo_config(const ScenarioConfig &config)
{
    std::string out;
    for (const KeySpec &k : registry())
        out += "# " + k.name + " = " + k.get(config) + "\n";
    std::istringstream table(config.mcs_table.format());
    std::string line;
    while (std::getline(table, line))
        if (!line.empty() && line[0] != '#')
            out += "# " + line + "\n";
    return out;
}

} // namespace mmxr
