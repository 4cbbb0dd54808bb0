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

// Command-line front end. Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include "mmxr/codebook.hpp"
#include "mmxr/config.hpp"
#include "mmxr/metrics.hpp"
#include "mmxr/mobility.hpp"
#include "mmxr/simulator.hpp"
#include "mmxr/sweep.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace
{

using namespace mmxr;

constexpr int exit_config = 1;
constexpr int exit_runtime = 2;

std::vector<std::pair<std::string, std::string>> parse_sets(const std::vector<std::string> &sets)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const std::string &s : sets)
    {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--set expects key=value, got '" + s + "'");
        out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return out;
}

std::string read_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path output_dir(const std::string &flag)
{
    if (!flag.empty())
        return flag;
    if (const char *env = std::getenv("MMXR_OUTPUT_DIR"); env != nullptr && *env != '\0')
        return env;
    return ".";
}

void write_file(const std::filesystem::path &path, const std::string &text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw std::runtime_error("cannot write " + path.string());
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"mmxr: millimeter-wave interactive XR downlink simulator"};
    app.require_subcommand(1);

    // generate-codebook
    auto *gen_cb = app.add_subcommand("generate-codebook", "Write a sector codebook with a quasi-omni AWV");
    int cb_rows = 8, cb_cols = 8, cb_samples = 1000, cb_iters = 200;
    double cb_spacing = 0.5, cb_freq = 60e9;
    std::uint64_t cb_seed = 7;
    std::string cb_out;
    gen_cb->add_option("--rows", cb_rows, "Array rows")->capture_default_str();
    gen_cb->add_option("--cols", cb_cols, "Array columns")->capture_default_str();
    gen_cb->add_option("--spacing", cb_spacing, "Element spacing in wavelengths")->capture_default_str();
    gen_cb->add_option("--carrier", cb_freq, "Carrier frequency in Hz")->capture_default_str();
    gen_cb->add_option("--qo-samples", cb_samples, "Quasi-omni sample directions")->capture_default_str();
    gen_cb->add_option("--qo-seed", cb_seed, "Quasi-omni sample seed")->capture_default_str();
    gen_cb->add_option("--qo-iters", cb_iters, "Quasi-omni coordinate sweeps per start")->capture_default_str();
    gen_cb->add_option("-o,--out", cb_out, "Output file")->required();

    // generate-mobility
    auto *gen_mob = app.add_subcommand("generate-mobility", "Write a synthetic head-rotation trace CSV");
    std::string mob_kind = "high", mob_out;
    double mob_peak = 0.0, mob_duration = 21.0, mob_rate = 1000.0, mob_horizon = 0.1, mob_walk_speed = 0.0;
    std::uint64_t mob_seed = 1;
    gen_mob->add_option("--rotation", mob_kind, "high, low or static")
        ->check(CLI::IsMember({"high", "low", "static"}))
        ->capture_default_str();
    gen_mob->add_option("--peak", mob_peak, "Peak angular speed in deg/s (default: 300 high, 60 low)");
    gen_mob->add_option("--duration", mob_duration, "Trace length in s")->capture_default_str();
    gen_mob->add_option("--rate", mob_rate, "Sample rate in Hz")->capture_default_str();
    gen_mob->add_option("--device-horizon", mob_horizon, "Emulated device prediction horizon in s (0 omits it)")
        ->capture_default_str();
    gen_mob->add_option("--walk-speed", mob_walk_speed, "Add positions from a random walk at this speed in m/s");
    gen_mob->add_option("--seed", mob_seed, "Random seed")->capture_default_str();
    gen_mob->add_option("-o,--out", mob_out, "Output file")->required();

    // simulate
    auto *sim = app.add_subcommand("simulate", "Run one scenario");
    std::string sim_config, sim_dir, sim_stem = "run";
    std::vector<std::string> sim_sets;
    bool sim_log = false, sim_quiet = false;
    sim->add_option("-c,--config", sim_config, "Config file (key = value lines)");
    sim->add_option("-s,--set", sim_sets, "Override: key=value (repeatable)");
    sim->add_option("-d,--out-dir", sim_dir, "Output directory (default: $MMXR_OUTPUT_DIR or .)");
    sim->add_option("--stem", sim_stem, "Output file prefix")->capture_default_str();
    sim->add_flag("--event-log", sim_log, "Also write the event log CSV");
    sim->add_flag("-q,--quiet", sim_quiet, "Do not print the summary");

    // sweep
    auto *sweep = app.add_subcommand("sweep", "Run a parameter sweep");
    std::string sw_config, sw_preset, sw_out;
    std::vector<std::string> sw_sets, sw_axes;
    std::uint64_t sw_seed = 1;
    sweep->add_option("-c,--config", sw_config, "Base config file");
    sweep->add_option("-s,--set", sw_sets, "Base override: key=value (repeatable)");
    sweep->add_option("-p,--preset", sw_preset, "Named preset")->check(CLI::IsMember(preset_names()));
    sweep->add_option("-a,--axis", sw_axes, "Axis: key=v1,v2,... (repeatable)");
    sweep->add_option("--base-seed", sw_seed, "Base seed for per-cell seeds")->capture_default_str();
    sweep->add_option("-o,--out", sw_out, "Combined CSV (default: <out dir>/sweep.csv)");

    // report
    auto *report = app.add_subcommand("report", "Re-summarize a per-frame CSV");
    std::string rep_frames, rep_dir;
    double rep_deadline = 0.020;
    report->add_option("frames", rep_frames, "Per-frame CSV")->required();
    report->add_option("--deadline", rep_deadline, "Deadline in s")->capture_default_str();
    report->add_option("-d,--out-dir", rep_dir, "Also write CDF and summary files here");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try
    {
        if (*gen_cb)
        {
            const ArrayGeometry geometry{cb_rows, cb_cols, cb_spacing, cb_freq, 0.0};
            try
            {
                geometry.validate();
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError(e.what());
            }
            QuasiOmniOptions qo;
            qo.n_samples = static_cast<std::size_t>(cb_samples);
            qo.seed = cb_seed;
            qo.max_iters = cb_iters;
            const QuasiOmniResult result = synthesize_quasi_omni(geometry, qo);
            const Codebook book =
                generate_sector_codebook(geometry, default_sector_angles(), default_sector_angles(), result.awv);
            write_codebook(book, cb_out);
            std::cout << "sectors=" << book.sectors.size() << " quasi_omni_range_db=" << result.range_db << "\n";
        }
        else if (*gen_mob)
        {
            TraceSet trace;
            if (mob_kind == "static")
                trace = static_rotation_trace(mob_duration, mob_rate);
            else
            {
                RotationTraceOptions o;
                o.peak_velocity_dps = mob_peak > 0.0 ? mob_peak : (mob_kind == "high" ? 300.0 : 60.0);
                o.duration = mob_duration;
                o.sample_rate = mob_rate;
                o.seed = mob_seed;
                o.device_horizon = mob_horizon;
                trace = generate_rotation_trace(o);
            }
            if (mob_walk_speed > 0.0)
            {
                WalkOptions w;
                w.speed = mob_walk_speed;
                w.duration = mob_duration;
                w.seed = mob_seed;
                const Walk walk = generate_walk(Room{}, w);
                for (TraceSample &s : trace.samples)
                    s.position = walk.position_at(s.t - trace.start());
            }
            write_trace(trace, mob_out);
            std::cout << "samples=" << trace.samples.size() << "\n";
        }
        else if (*sim)
        {
            const std::string text = sim_config.empty() ? std::string{} : read_file(sim_config);
            const ScenarioConfig config = parse_config(text, parse_sets(sim_sets));
            const SimResult result = run(config);
            const RunSummary summary = summarize(result.frames, config.deadline);
            const std::filesystem::path dir = output_dir(sim_dir);
            const std::string header = echo_config(config);
            write_outputs(summary, result.frames, OutputPaths::in(dir, sim_stem), header);
            if (sim_log)
                write_event_log(result.log, dir / (sim_stem + "_events.csv"));
            if (!sim_quiet)
                std::cout << format_summary(summary);
        }
        else if (*sweep)
        {
            SweepSpec spec = sw_preset.empty() ? SweepSpec{} : preset(sw_preset);
            if (!sw_config.empty())
                spec.base_text = read_file(sw_config);
            for (auto &kv : parse_sets(sw_sets))
                spec.base_overrides.push_back(kv);
            for (const std::string &axis : sw_axes)
            {
                const auto eq = axis.find('=');
                if (eq == std::string::npos || eq == 0)
                    throw ConfigError("--axis expects key=v1,v2,..., got '" + axis + "'");
                std::vector<std::string> values;
                std::stringstream ss(axis.substr(eq + 1));
                for (std::string v; std::getline(ss, v, ',');)
                    values.push_back(v);
                spec.axes.emplace_back(axis.substr(0, eq), values);
            }
            spec.base_seed = sw_seed;
            // fail fast on a broken base config; individual cells may still fail
            parse_config(spec.base_text, spec.base_overrides);
            const std::vector<CellResult> results = run_sweep(spec);
            const std::string csv = format_sweep_csv(results);
            const std::filesystem::path out = sw_out.empty() ? output_dir("") / "sweep.csv" : std::filesystem::path(sw_out);
            write_file(out, csv);
            std::cout << csv;
        }
        else if (*report)
        {
            const std::vector<FrameRecord> records = read_frames_csv(rep_frames);
            const RunSummary summary = summarize(records, rep_deadline);
            if (!rep_dir.empty())
                write_outputs(summary, records, OutputPaths::in(rep_dir, "report"));
            std::cout << format_summary(summary);
        }
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return 0;
}
