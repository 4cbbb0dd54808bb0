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

#include "mmxr/simulator.hpp"

#include "mmxr/channel.hpp"
#include "mmxr/covrage.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <queue>

namespace mmxr
{

namespace
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) { return splitmix64(splitmix64(base) ^ stream); }

constexpr std::uint64_t rotation_stream = 0x726f74;
constexpr std::uint64_t walk_stream = 0x77616c6b;

} // namespace

std::string to_string(EventKind kind)
{
    switch (kind)
    {
    case EventKind::beacon_start:
        return "beacon_start";
    case EventKind::bhi_end:
        return "bhi_end";
    case EventKind::burst_arrival:
        return "burst_arrival";
    case EventKind::mpdu_tx_done:
        return "mpdu_tx_done";
    case EventKind::bf_trigger:
        return "bf_trigger";
    case EventKind::sls_done:
        return "sls_done";
    case EventKind::sim_end:
        return "sim_end";
    case EventKind::bhi_start:
        return "bhi_start";
    case EventKind::sls_start:
        return "sls_start";
    case EventKind::mpdu_tx_start:
        return "mpdu_tx_start";
    case EventKind::frame_complete:
        return "frame_complete";
    case EventKind::frame_drop:
        return "frame_drop";
    case EventKind::trace_seam:
        return "trace_seam";
    }
    return "unknown";
}

std::vector<std::int64_t> split_frame_bits(std::int64_t bits, std::int64_t mpdu_payload_bits)
{
    if (bits <= 0 || mpdu_payload_bits <= 0)
        throw std::invalid_argument("split_frame_bits: sizes must be positive");
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>((bits + mpdu_payload_bits - 1) / mpdu_payload_bits));
    for (std::int64_t left = bits; left > 0; left -= mpdu_payload_bits)
        out.push_back(std::min(left, mpdu_payload_bits));
    return out;
}

double mpdu_airtime(const ScenarioConfig &config, std::int64_t payload_bits)
{
    const double phy = config.mcs_table.at(config.mcs).phy_rate;
    return static_cast<double>(payload_bits + 8LL * config.header_bytes) / phy + config.mpdu_overhead;
}

std::int64_t frame_bits(const ScenarioConfig &config)
{
    return std::max<std::int64_t>(1, std::llround(config.data_rate / config.frame_rate));
}

Pose ap_pose(const ScenarioConfig &config)
{
    // boresight down, array y along room x
    const Quaternion down = Quaternion::from_basis({0.0, 0.0, -1.0}, {1.0, 0.0, 0.0}, {0.0, -1.0, 0.0});
    return Pose{0.0, {config.ap_x, config.ap_y, config.ap_z}, down};
}

QuasiOmniOptions quasi_omni_options(const ScenarioConfig &config, const ArrayGeometry &geometry)
{
    QuasiOmniOptions o;
    o.n_samples = static_cast<std::size_t>(config.quasi_omni_samples);
    o.seed = config.quasi_omni_seed;
    o.max_iters = geometry.rows > 16 || geometry.cols > 16 ? config.quasi_omni_iters_large : config.quasi_omni_iters;
    o.sphere_uniform = config.sphere_uniform;
    return o;
}

Awv cached_quasi_omni(const ArrayGeometry &geometry, const QuasiOmniOptions &options)
{
    static std::mutex mutex;
    static std::map<std::string, Awv> cache;
    char key[256];
    std::snprintf(key, sizeof key, "%d|%d|%.17g|%.17g|%.17g|%zu|%llu|%d|%.17g|%d|%d", geometry.rows, geometry.cols,
                  geometry.spacing, geometry.carrier_frequency, geometry.element_exponent, options.n_samples,
                  static_cast<unsigned long long>(options.seed), options.max_iters, options.tolerance_db,
                  options.sphere_uniform ? 1 : 0, options.random_starts);
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, synthesize_quasi_omni(geometry, options).awv).first;
    return it->second;
}

TraceSet build_rotation_trace(const ScenarioConfig &config)
{
    if (config.rotation == "static")
        return static_rotation_trace(config.trace_duration, config.trace_rate);
    if (config.rotation == "high" || config.rotation == "low")
    {
        RotationTraceOptions o;
        o.peak_velocity_dps = config.rotation == "high" ? config.rotation_peak_high : config.rotation_peak_low;
        o.duration = config.trace_duration;
        o.sample_rate = config.trace_rate;
        o.seed = derive_seed(config.seed, rotation_stream);
        o.device_horizon = config.device_horizon;
        TraceSet trace = generate_rotation_trace(o);
        trace.label = config.rotation == "high" ? TraceLabel::high : TraceLabel::low;
        return trace;
    }
    TraceSet trace = load_trace(config.rotation);
    if (config.prediction == Prediction::device && !trace.has_device_predictions())
        throw ConfigError("prediction=device needs a trace with device-prediction columns: " + config.rotation);
    return trace;
}

Walk build_walk(const ScenarioConfig &config)
{
    WalkOptions o;
    o.speed = config.walk_speed;
    o.step_interval = config.walk_step;
    o.duration = config.sim_time + config.queue_drop + config.deadline + 1.0;
    o.seed = derive_seed(config.seed, walk_stream);
    o.start_x = config.walk_start_x;
    o.start_y = config.walk_start_y;
    return generate_walk(Room{config.room_length, config.room_width, config.room_height}, o);
}

namespace
{

Codebook load_or_generate(const std::string &path, const ArrayGeometry &geometry, bool directional,
                          const Awv &quasi_omni)
{
    if (!path.empty())
    {
        Codebook book = read_codebook(path);
        if (!(book.geometry == geometry))
            throw ConfigError("codebook " + path + " does not match the configured array");
        return book;
    }
    if (!directional)
        return Codebook{geometry, {}, quasi_omni};
    return generate_sector_codebook(geometry, default_sector_angles(), default_sector_angles(), quasi_omni);
}

} // namespace

SimulationAssets build_assets(const ScenarioConfig &config)
{
    validate(config);
    SimulationAssets assets;
    const ArrayGeometry ap_geom = config.ap_geometry();
    const ArrayGeometry hmd_geom = config.hmd_geometry();
    const Awv ap_qo = config.ap_codebook.empty() ? cached_quasi_omni(ap_geom, quasi_omni_options(config, ap_geom)) : Awv{};
    assets.ap = load_or_generate(config.ap_codebook, ap_geom, true, ap_qo);
    const Awv hmd_qo =
        config.hmd_codebook.empty() ? cached_quasi_omni(hmd_geom, quasi_omni_options(config, hmd_geom)) : Awv{};
    assets.hmd = load_or_generate(config.hmd_codebook, hmd_geom, config.rx_beamforming == RxBeamforming::sectors, hmd_qo);
    assets.motion = std::make_shared<UserMotion>(build_rotation_trace(config), build_walk(config), config.hmd_height);
    return assets;
}

std::size_t best_sweep_slot(const std::vector<BeamPattern> &slots, const Pose &self, const Vec3 &peer)
{
    const Vec3 u = local_unit_vector(self, peer);
    std::size_t best = 0;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < slots.size(); ++i)
    {
        const double g = slots[i].gain_db(u);
        if (g > best_gain)
        {
            best_gain = g;
            best = i;
        }
    }
    return best;
}

namespace
{

struct QueuedEvent
{
    double t;
    std::uint64_t seq;
    EventKind kind;
    std::int64_t arg;

    bool operator>(const QueuedEvent &o) const { return t != o.t ? t > o.t : seq > o.seq; }
};

struct Mpdu
{
    std::int64_t frame;
    std::int64_t index;
    std::int64_t payload_bits;
};

struct FrameState
{
    std::int64_t remaining = 0;
    bool dropped = false;
};

enum class Medium
{
    idle,
    data,
    bhi,
    sls,
};

class Engine
{
  public:
    Engine(const ScenarioConfig &config, const SimulationAssets &assets)
        : cfg_(config), assets_(assets), motion_(*assets.motion), ap_(ap_pose(config)),
          mcs_(config.mcs_table.at(config.mcs))
    {
        if (!assets.motion)
            throw std::invalid_argument("simulator: assets carry no motion");
        for (std::size_t i = 0; i < assets.ap.sweep_size(); ++i)
            ap_slots_.emplace_back(assets.ap.geometry, assets.ap.awv(i));
        if (cfg_.rx_beamforming == RxBeamforming::sectors)
            for (std::size_t i = 0; i < assets.hmd.sweep_size(); ++i)
                hmd_slots_.emplace_back(assets.hmd.geometry, assets.hmd.awv(i));
        hmd_qo_ = BeamPattern(assets.hmd.geometry, assets.hmd.quasi_omni);
        hmd_beam_ = hmd_qo_;
        end_time_ = cfg_.sim_time + std::max(cfg_.deadline, cfg_.queue_drop);

        const auto bits = split_frame_bits(frame_bits(cfg_), 8LL * cfg_.mpdu_bytes);
        frame_template_ = bits;
        result_.stats.mpdus_per_frame = bits.size();
        for (std::int64_t b : bits)
            result_.stats.frame_airtime += mpdu_airtime(cfg_, b);
    }

    SimResult run()
    {
        for (std::int64_t m = 0; static_cast<double>(m) * cfg_.bi_duration < end_time_; ++m)
            push(static_cast<double>(m) * cfg_.bi_duration, EventKind::beacon_start, m);
        if (cfg_.bf_location == BfLocation::dti)
            for (std::int64_t k = 1; static_cast<double>(k) * cfg_.bf_interval < end_time_; ++k)
                push(static_cast<double>(k) * cfg_.bf_interval, EventKind::bf_trigger, k);
        const double interval = cfg_.burst_interval();
        for (std::int64_t k = 0; static_cast<double>(k) * interval < cfg_.sim_time; ++k)
            push(static_cast<double>(k) * interval, EventKind::burst_arrival, k);
        push(end_time_, EventKind::sim_end, 0);
        for (double seam : motion_.seam_times(end_time_))
            log(seam, EventKind::trace_seam);

        while (!queue_.empty())
        {
            const QueuedEvent e = queue_.top();
            queue_.pop();
            if (e.kind == EventKind::sim_end)
            {
                log(e.t, EventKind::sim_end);
                break;
            }
            dispatch(e);
        }
        for (std::size_t i = 0; i < result_.frames.size(); ++i)
        {
            FrameRecord &f = result_.frames[i];
            f.delivered = f.completed && (*f.completed - f.created) <= cfg_.deadline;
        }
        if (cfg_.event_log)
            std::stable_sort(result_.log.begin(), result_.log.end(),
                             [](const LogEntry &a, const LogEntry &b) { return a.t < b.t; });
        return std::move(result_);
    }

  private:
    void push(double t, EventKind kind, std::int64_t arg) { queue_.push({t, seq_++, kind, arg}); }

    void log(double t, EventKind kind, std::int64_t a = -1, std::int64_t b = -1, double value = 0.0, int flag = 0)
    {
        if (cfg_.event_log)
            result_.log.push_back({t, kind, a, b, value, flag});
    }

    void dispatch(const QueuedEvent &e)
    {
        switch (e.kind)
        {
        case EventKind::beacon_start:
            log(e.t, e.kind, e.arg);
            if (medium_ == Medium::idle)
                start_bhi(e.t, e.arg);
            else
            {
                bhi_pending_ = true;
                pending_bi_ = e.arg;
            }
            break;
        case EventKind::bhi_end:
            log(e.t, e.kind, e.arg);
            medium_ = Medium::idle;
            if (e.arg == 0 || cfg_.bf_location == BfLocation::abft)
                beamform(e.t, true);
            next_action(e.t);
            break;
        case EventKind::bf_trigger:
        {
            const bool busy = medium_ != Medium::idle;
            log(e.t, e.kind, e.arg, -1, 0.0, busy ? 1 : 0);
            if (medium_ == Medium::sls || sls_pending_)
                break;
            if (busy)
                sls_pending_ = true;
            else
                start_sls(e.t);
            break;
        }
        case EventKind::sls_done:
            medium_ = Medium::idle;
            beamform(e.t, false);
            next_action(e.t);
            break;
        case EventKind::burst_arrival:
            enqueue_burst(e.t, e.arg);
            if (medium_ == Medium::idle)
                next_action(e.t);
            break;
        case EventKind::mpdu_tx_done:
            finish_mpdu(e.t);
            next_action(e.t);
            break;
        default:
            throw std::logic_error("simulator: unexpected queued event " + to_string(e.kind));
        }
    }

    void start_bhi(double t, std::int64_t bi)
    {
        medium_ = Medium::bhi;
        ++result_.stats.bhi_count;
        log(t, EventKind::bhi_start, bi);
        push(t + cfg_.bhi_duration, EventKind::bhi_end, bi);
    }

    void start_sls(double t)
    {
        medium_ = Medium::sls;
        sls_pending_ = false;
        ++result_.stats.sls_count;
        log(t, EventKind::sls_start);
        push(t + cfg_.sls_duration, EventKind::sls_done, 0);
    }

    void next_action(double t)
    {
        if (medium_ != Medium::idle)
            return;
        if (bhi_pending_)
        {
            bhi_pending_ = false;
            start_bhi(t, pending_bi_);
            return;
        }
        if (sls_pending_)
        {
            start_sls(t);
            return;
        }
        drop_stale(t);
        if (!tx_queue_.empty())
            start_mpdu(t);
    }

    void enqueue_burst(double t, std::int64_t frame_id)
    {
        FrameRecord record;
        record.frame_id = static_cast<std::uint64_t>(frame_id);
        record.created = t;
        result_.frames.push_back(record);
        frame_state_.push_back({static_cast<std::int64_t>(frame_template_.size()), false});
        for (std::size_t i = 0; i < frame_template_.size(); ++i)
            tx_queue_.push_back({frame_id, static_cast<std::int64_t>(i), frame_template_[i]});
        log(t, EventKind::burst_arrival, frame_id, static_cast<std::int64_t>(frame_template_.size()));
    }

    void drop_stale(double t)
    {
        while (!tx_queue_.empty())
        {
            const std::int64_t frame = tx_queue_.front().frame;
            if (t - result_.frames[static_cast<std::size_t>(frame)].created <= cfg_.queue_drop)
                return;
            while (!tx_queue_.empty() && tx_queue_.front().frame == frame)
                tx_queue_.pop_front();
            frame_state_[static_cast<std::size_t>(frame)].dropped = true;
            ++result_.stats.frames_dropped;
            log(t, EventKind::frame_drop, frame);
        }
    }

    double current_snr(double t) const
    {
        const Pose hmd = motion_.pose_at(t);
        const LinkEnd ap{ap_.position, ap_.orientation, &ap_slots_[ap_sector_]};
        const LinkEnd rx{hmd.position, hmd.orientation, &hmd_beam_};
        return snr_db(cfg_.link, ap, rx);
    }

    void start_mpdu(double t)
    {
        const Mpdu &m = tx_queue_.front();
        const double snr = current_snr(t);
        in_flight_ok_ = usable(snr, mcs_);
        medium_ = Medium::data;
        ++result_.stats.mpdu_attempts;
        log(t, EventKind::mpdu_tx_start, m.frame, m.index, snr, in_flight_ok_ ? 1 : 0);
        push(t + mpdu_airtime(cfg_, m.payload_bits), EventKind::mpdu_tx_done, m.frame);
    }

    void finish_mpdu(double t)
    {
        medium_ = Medium::idle;
        const Mpdu m = tx_queue_.front();
        log(t, EventKind::mpdu_tx_done, m.frame, m.index, 0.0, in_flight_ok_ ? 1 : 0);
        if (!in_flight_ok_)
        {
            ++result_.stats.mpdu_failures;
            return; // retried from the head of the queue
        }
        tx_queue_.pop_front();
        FrameState &state = frame_state_[static_cast<std::size_t>(m.frame)];
        if (--state.remaining == 0)
        {
            FrameRecord &record = result_.frames[static_cast<std::size_t>(m.frame)];
            record.completed = t;
            log(t, EventKind::frame_complete, m.frame, -1, (t - record.created) * 1e3);
        }
    }

    /// SLS outcome plus the HMD-side beam update.
    void beamform(double t, bool in_bhi)
    {
        ++result_.stats.bf_updates;
        const Pose hmd = motion_.pose_at(t);

        // initiator sweep: the HMD listens quasi-omni, its gain is common to every AP slot
        ap_sector_ = best_sweep_slot(ap_slots_, ap_, hmd.position);

        std::int64_t hmd_choice = -1;
        switch (cfg_.rx_beamforming)
        {
        case RxBeamforming::quasi_omni:
            break;
        case RxBeamforming::sectors:
        {
            const std::size_t s = best_sweep_slot(hmd_slots_, hmd, ap_.position);
            hmd_beam_ = hmd_slots_[s];
            hmd_choice = static_cast<std::int64_t>(s);
            break;
        }
        case RxBeamforming::covrage:
        {
            const Pose pred = predicted_pose(t, hmd);
            const ArrayGeometry &g = assets_.hmd.geometry;
            const Trajectory trajectory = make_trajectory(hmd, pred, ap_.position);
            const SubArrayPlan plan = plan_subarrays(g, trajectory, cfg_.covrage_kmax);
            hmd_beam_ = BeamPattern(g, synthesize_awv(g, plan, trajectory));
            hmd_choice = plan.k;
            break;
        }
        }
        log(t, EventKind::sls_done, static_cast<std::int64_t>(ap_sector_), hmd_choice, 0.0, in_bhi ? 1 : 0);
    }

    Pose predicted_pose(double t, const Pose &now) const
    {
        const double horizon = cfg_.beamforming_period();
        if (cfg_.prediction == Prediction::none)
        {
            Pose p = now;
            p.t = t + horizon;
            return p;
        }
        const Pose history[2] = {motion_.pose_at(t - cfg_.pose_interval), now};
        const PredictionMode mode = cfg_.prediction == Prediction::extrapolation ? PredictionMode::constant_velocity
                                    : cfg_.prediction == Prediction::device      ? PredictionMode::device
                                                                                 : PredictionMode::oracle;
        return predict_pose(std::span<const Pose>(history, 2), horizon, mode, &motion_);
    }

    const ScenarioConfig &cfg_;
    const SimulationAssets &assets_;
    const UserMotion &motion_;
    const Pose ap_;
    const McsEntry mcs_;

    std::vector<BeamPattern> ap_slots_;
    std::vector<BeamPattern> hmd_slots_;
    BeamPattern hmd_qo_;
    BeamPattern hmd_beam_;
    std::size_t ap_sector_ = 0;

    std::vector<std::int64_t> frame_template_;
    std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, std::greater<>> queue_;
    std::uint64_t seq_ = 0;
    double end_time_ = 0.0;

    Medium medium_ = Medium::idle;
    bool bhi_pending_ = false;
    std::int64_t pending_bi_ = 0;
    bool sls_pending_ = false;
    bool in_flight_ok_ = false;

    std::deque<Mpdu> tx_queue_;
    std::vector<FrameState> frame_state_;
    SimResult result_;
};

} // namespace

SimResult run(const ScenarioConfig &config, const SimulationAssets &assets)
{
    validate(config);
    return Engine(config, assets).run();
}

SimResult run(const ScenarioConfig &config)
{
    const SimulationAssets assets = build_assets(config);
    return run(config, assets);
}

namespace
{

std::string detail(const LogEntry &e)
{
    char buf[160];
    switch (e.kind)
    {
    case EventKind::beacon_start:
    case EventKind::bhi_start:
    case EventKind::bhi_end:
        std::snprintf(buf, sizeof buf, "bi=%lld", static_cast<long long>(e.a));
        break;
    case EventKind::burst_arrival:
        std::snprintf(buf, sizeof buf, "frame=%lld mpdus=%lld", static_cast<long long>(e.a),
                      static_cast<long long>(e.b));
        break;
    case EventKind::mpdu_tx_start:
        std::snprintf(buf, sizeof buf, "frame=%lld mpdu=%lld snr_db=%.3f ok=%d", static_cast<long long>(e.a),
                      static_cast<long long>(e.b), e.value, e.flag);
        break;
    case EventKind::mpdu_tx_done:
        std::snprintf(buf, sizeof buf, "frame=%lld mpdu=%lld ok=%d", static_cast<long long>(e.a),
                      static_cast<long long>(e.b), e.flag);
        break;
    case EventKind::bf_trigger:
        std::snprintf(buf, sizeof buf, "n=%lld deferred=%d", static_cast<long long>(e.a), e.flag);
        break;
    case EventKind::sls_done:
        std::snprintf(buf, sizeof buf, "ap_sector=%lld hmd=%lld in_bhi=%d", static_cast<long long>(e.a),
                      static_cast<long long>(e.b), e.flag);
        break;
    case EventKind::frame_complete:
        std::snprintf(buf, sizeof buf, "frame=%lld latency_ms=%.6f", static_cast<long long>(e.a), e.value);
        break;
    case EventKind::frame_drop:
        std::snprintf(buf, sizeof buf, "frame=%lld", static_cast<long long>(e.a));
        break;
    default:
        buf[0] = '\0';
    }
    return buf;
}

} // namespace

std::string format_event_log(const std::vector<LogEntry> &log)
{
    std::string out = "t,kind,detail\n";
    out.reserve(log.size() * 48);
    char tbuf[48];
    for (const LogEntry &e : log)
    {
        std::snprintf(tbuf, sizeof tbuf, "%.9f", e.t);
        out += tbuf;
        out += ',';
        out += to_string(e.kind);
        out += ',';
        out += detail(e);
        out += '\n';
    }
    return out;
}

void write_event_log(const std::vector<LogEntry> &log, const std::filesystem::path &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write event log " + path.string());
    out << format_event_log(log);
    if (!out)
        throw std::runtime_error("error writing event log " + path.string());
}

} // namespace mmxr
