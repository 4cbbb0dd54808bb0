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

#include "mmxr/mobility.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace mmxr
{

// ---------------------------------------------------------------------------------------------
// Trace files

bool TraceSet::has_device_predictions() const
{
    return !samples.empty() &&
           std::all_of(samples.begin(), samples.end(), [](const TraceSample &s) { return s.device_predicted.has_value(); });
}

void TraceSet::validate() const
{
    if (samples.size() < 2)
        throw TraceError(0, "trace needs at least 2 samples, has " + std::to_string(samples.size()));
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (!(samples[i].t > samples[i - 1].t))
            throw TraceError(i + 1, "timestamps must be strictly increasing");
}

namespace
{

const std::array<const char *, 5> base_columns{"t", "qw", "qx", "qy", "qz"};
const std::array<const char *, 4> position_columns{"pw", "px", "py", "pz"};
const std::array<const char *, 5> device_columns{"ph_qw", "ph_qx", "ph_qy", "ph_qz", "ph_h"};

std::vector<std::string> split_csv(const std::string &line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ','))
    {
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_field(const std::string &s, std::size_t row, const char *name)
{
    errno = 0;
    char *end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        throw TraceError(row, std::string("column '") + name + "': expected a number, got '" + s + "'");
    return v;
}

Quaternion checked_quaternion(double w, double x, double y, double z, std::size_t row)
{
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(std::abs(n - 1.0) <= 0.01))
        throw TraceError(row, "quaternion norm " + std::to_string(n) + " is more than 1% off unit length");
    return {w, x, y, z};
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

TraceSet parse_trace(const std::string &csv)
{
    std::istringstream is(csv);
    std::string line;
    std::size_t lineno = 0;
    std::map<std::string, std::size_t> column;

    while (std::getline(is, line))
    {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line.front() == '#')
            continue;
        const auto names = split_csv(line);
        for (std::size_t i = 0; i < names.size(); ++i)
            column[names[i]] = i;
        break;
    }
    for (const char *name : base_columns)
        if (!column.contains(name))
            throw TraceError(lineno, std::string("header lacks column '") + name + "'");
    const bool has_position = std::all_of(position_columns.begin(), position_columns.end(),
                                          [&](const char *n) { return column.contains(n); });
    const bool has_device = std::all_of(device_columns.begin(), device_columns.end(),
                                        [&](const char *n) { return column.contains(n); });

    TraceSet trace;
    while (std::getline(is, line))
    {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line.front() == '#')
            continue;
        const auto fields = split_csv(line);
        auto get = [&](const char *name) -> const std::string & {
            const std::size_t idx = column.at(name);
            if (idx >= fields.size())
                throw TraceError(lineno, std::string("missing column '") + name + "'");
            return fields[idx];
        };
        auto num = [&](const char *name) { return parse_field(get(name), lineno, name); };

        TraceSample s;
        s.t = num("t");
        s.orientation = checked_quaternion(num("qw"), num("qx"), num("qy"), num("qz"), lineno);
        if (has_position && !get("pw").empty() && num("pw") != 0.0)
            s.position = Vec3{num("px"), num("py"), num("pz")};
        if (has_device && !get("ph_qw").empty())
        {
            s.device_predicted = checked_quaternion(num("ph_qw"), num("ph_qx"), num("ph_qy"), num("ph_qz"), lineno);
            s.device_horizon = num("ph_h");
            if (s.device_horizon < 0.0)
                throw TraceError(lineno, "device prediction horizon must be non-negative");
        }
        if (!trace.samples.empty() && !(s.t > trace.samples.back().t))
            throw TraceError(lineno, "timestamps must be strictly increasing");
        trace.samples.push_back(std::move(s));
    }
    trace.validate();
    return trace;
}

TraceSet load_trace(const std::filesystem::path &path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw TraceError(0, "cannot open trace file " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_trace(ss.str());
}

std::string format_trace(const TraceSet &trace)
{
    const bool with_position = std::any_of(trace.samples.begin(), trace.samples.end(),
                                           [](const TraceSample &s) { return s.position.has_value(); });
    const bool with_device = std::any_of(trace.samples.begin(), trace.samples.end(),
                                         [](const TraceSample &s) { return s.device_predicted.has_value(); });
    std::ostringstream os;
    os << "t,qw,qx,qy,qz";
    if (with_position || with_device)
        os << ",pw,px,py,pz";
    if (with_device)
        os << ",ph_qw,ph_qx,ph_qy,ph_qz,ph_h";
    os << '\n';
    for (const TraceSample &s : trace.samples)
    {
        const Quaternion &q = s.orientation;
        os << fmt(s.t) << ',' << fmt(q.w()) << ',' << fmt(q.x()) << ',' << fmt(q.y()) << ',' << fmt(q.z());
        if (with_position || with_device)
        {
            if (s.position)
                os << ",1," << fmt(s.position->x) << ',' << fmt(s.position->y) << ',' << fmt(s.position->z);
            else
                os << ",0,,,";
        }
        if (with_device)
        {
            if (s.device_predicted)
            {
                const Quaternion &p = *s.device_predicted;
                os << ',' << fmt(p.w()) << ',' << fmt(p.x()) << ',' << fmt(p.y()) << ',' << fmt(p.z()) << ','
                   << fmt(s.device_horizon);
            }
            else
                os << ",,,,,";
        }
        os << '\n';
    }
    return os.str();
}

void write_trace(const TraceSet &trace, const std::filesystem::path &path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("write_trace: cannot open " + path.string());
    os << format_trace(trace);
    if (!os)
        throw std::runtime_error("write_trace: write failed for " + path.string());
}

// ---------------------------------------------------------------------------------------------
// Synthetic rotation

namespace
{

struct Sinusoid
{
    double amplitude; // degrees
    double frequency; // Hz
    double phase;     // radians

    double value(double t) const { return amplitude * std::sin(2.0 * pi * frequency * t + phase); }
    double rate(double t) const { return amplitude * 2.0 * pi * frequency * std::cos(2.0 * pi * frequency * t + phase); }
};

struct Motion
{
    std::array<Sinusoid, 3> yaw;
    std::array<Sinusoid, 3> pitch;
};

double sum_value(const std::array<Sinusoid, 3> &c, double t, double scale)
{
    double v = 0.0;
    for (const auto &s : c)
        v += s.value(t);
    return scale * v;
}

double sum_rate(const std::array<Sinusoid, 3> &c, double t, double scale)
{
    double v = 0.0;
    for (const auto &s : c)
        v += s.rate(t);
    return scale * v;
}

double amplitude_sum(const std::array<Sinusoid, 3> &c)
{
    double v = 0.0;
    for (const auto &s : c)
        v += std::abs(s.amplitude);
    return v;
}

/// Yaw about world z followed by pitch about body y: the two rate vectors are orthogonal, so the
/// angular speed is the Euclidean norm of the two angle rates.
double max_speed(const Motion &m, const std::vector<double> &times, double yaw_scale, double pitch_scale)
{
    double best = 0.0;
    for (double t : times)
        best = std::max(best, std::hypot(sum_rate(m.yaw, t, yaw_scale), sum_rate(m.pitch, t, pitch_scale)));
    return best;
}

} // namespace

TraceSet generate_rotation_trace(const RotationTraceOptions &opt)
{
    if (!(opt.peak_velocity_dps > 0.0))
        throw std::invalid_argument("generate_rotation_trace: peak velocity must be positive");
    if (!(opt.duration > 0.0) || !(opt.sample_rate > 0.0))
        throw std::invalid_argument("generate_rotation_trace: duration and sample rate must be positive");

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> weight(0.4, 1.0);
    std::uniform_real_distribution<double> freq(0.05, 0.35);
    std::uniform_real_distribution<double> phase(-pi, pi);
    Motion m{};
    for (auto &s : m.yaw)
        s = {weight(rng), freq(rng), phase(rng)};
    for (auto &s : m.pitch)
        s = {0.5 * weight(rng), freq(rng), phase(rng)};

    const auto n = static_cast<std::size_t>(std::floor(opt.duration * opt.sample_rate)) + 1;
    std::vector<double> times(n);
    for (std::size_t i = 0; i < n; ++i)
        times[i] = static_cast<double>(i) / opt.sample_rate;

    const double peak = opt.peak_velocity_dps;
    double yaw_scale = peak / max_speed(m, times, 1.0, 1.0);
    double pitch_scale = yaw_scale;
    if (pitch_scale * amplitude_sum(m.pitch) > opt.max_pitch_deg)
    {
        pitch_scale = opt.max_pitch_deg / amplitude_sum(m.pitch);
        const double pitch_only = max_speed(m, times, 0.0, pitch_scale);
        if (pitch_only >= peak)
        {
            yaw_scale = 0.0;
            pitch_scale *= peak / pitch_only;
        }
        else
        {
            // the peak speed grows monotonically with the yaw scale
            double lo = 0.0, hi = yaw_scale;
            while (max_speed(m, times, hi, pitch_scale) < peak)
                hi *= 2.0;
            for (int it = 0; it < 60; ++it)
            {
                const double mid = 0.5 * (lo + hi);
                (max_speed(m, times, mid, pitch_scale) < peak ? lo : hi) = mid;
            }
            yaw_scale = 0.5 * (lo + hi);
        }
    }

    TraceSet trace;
    trace.label = TraceLabel::synthetic;
    trace.samples.reserve(n);
    for (double t : times)
    {
        TraceSample s;
        s.t = t;
        s.orientation =
            Quaternion::from_yaw_pitch_roll(deg2rad(sum_value(m.yaw, t, yaw_scale)), deg2rad(sum_value(m.pitch, t, pitch_scale)));
        trace.samples.push_back(std::move(s));
    }

    if (opt.device_horizon > 0.0)
    {
        const double dt = 1.0 / opt.sample_rate;
        const double h = opt.device_horizon;
        for (std::size_t i = 0; i < n; ++i)
        {
            auto &s = trace.samples[i];
            Vec3 w1{}, w0{};
            if (i >= 1)
                w1 = (trace.samples[i - 1].orientation.conjugate() * s.orientation).to_rotation_vector() / dt;
            if (i >= 2)
                w0 = (trace.samples[i - 2].orientation.conjugate() * trace.samples[i - 1].orientation).to_rotation_vector() /
                     dt;
            const Vec3 alpha = i >= 2 ? (w1 - w0) / dt : Vec3{};
            s.device_predicted = s.orientation * Quaternion::from_rotation_vector(w1 * h + alpha * (0.5 * h * h));
            s.device_horizon = h;
        }
    }
    trace.validate();
    return trace;
}

TraceSet static_rotation_trace(double duration, double sample_rate)
{
    if (!(duration > 0.0) || !(sample_rate > 0.0))
        throw std::invalid_argument("static_rotation_trace: duration and sample rate must be positive");
    TraceSet trace;
    const auto n = static_cast<std::size_t>(std::floor(duration * sample_rate)) + 1;
    for (std::size_t i = 0; i < std::max<std::size_t>(n, 2); ++i)
    {
        TraceSample s;
        s.t = static_cast<double>(i) / sample_rate;
        s.device_predicted = Quaternion::identity();
        s.device_horizon = 0.0;
        trace.samples.push_back(std::move(s));
    }
    return trace;
}

// ---------------------------------------------------------------------------------------------
// Walk

double Room::wall_distance(double x, double y) const
{
    return std::min({x - x_min(), x_max() - x, y - y_min(), y_max() - y});
}

Vec3 Walk::position_at(double t) const
{
    if (waypoints.empty())
        return {};
    if (t <= 0.0 || waypoints.size() == 1)
        return waypoints.front();
    const double f = t / step_interval;
    const auto i = static_cast<std::size_t>(std::floor(f));
    if (i + 1 >= waypoints.size())
        return waypoints.back();
    const double a = f - static_cast<double>(i);
    return waypoints[i] * (1.0 - a) + waypoints[i + 1] * a;
}

Walk generate_walk(const Room &room, const WalkOptions &opt)
{
    if (room.length < 2.0 || room.width < 2.0)
        throw std::invalid_argument("generate_walk: room must be at least 2 x 2 m");
    if (opt.speed < 0.0 || !(opt.step_interval > 0.0) || opt.duration < 0.0)
        throw std::invalid_argument("generate_walk: invalid speed, step interval or duration");
    if (!(room.wall_distance(opt.start_x, opt.start_y) > 0.0))
        throw std::invalid_argument("generate_walk: start point must lie strictly inside the room");

    // hard containment margin, never closer to a wall than this
    const double margin = std::min(0.05, 0.25 * room.wall_distance(opt.start_x, opt.start_y));
    const double step_len = opt.speed * opt.step_interval;
    const double max_steer = deg2rad(opt.max_steer_deg);

    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<int> cardinal(0, 3);

    Walk walk;
    walk.step_interval = opt.step_interval;
    const auto steps = static_cast<std::size_t>(std::ceil(opt.duration / opt.step_interval));
    walk.waypoints.reserve(steps + 1);
    double x = opt.start_x, y = opt.start_y;
    double rotation = 0.0; // physical minus virtual heading
    walk.waypoints.push_back({x, y, 0.0});

    auto inside = [&](double px, double py) { return room.wall_distance(px, py) >= margin; };

    for (std::size_t k = 0; k < steps; ++k)
    {
        const double virtual_heading = 0.5 * pi * cardinal(rng);
        double heading = virtual_heading + rotation;

        // push-away vector from every wall within the steering distance
        double ax = 0.0, ay = 0.0;
        if (x - room.x_min() < opt.steer_distance)
            ax += 1.0;
        if (room.x_max() - x < opt.steer_distance)
            ax -= 1.0;
        if (y - room.y_min() < opt.steer_distance)
            ay += 1.0;
        if (room.y_max() - y < opt.steer_distance)
            ay -= 1.0;
        if ((ax != 0.0 || ay != 0.0) && std::cos(heading) * ax + std::sin(heading) * ay < 0.0)
        {
            const double away = std::atan2(ay, ax);
            const double turn = std::remainder(away - heading, 2.0 * pi);
            rotation += std::clamp(turn, -max_steer, max_steer);
            heading = virtual_heading + rotation;
        }
        rotation = std::remainder(rotation, 2.0 * pi);

        double nx = x + step_len * std::cos(heading);
        double ny = y + step_len * std::sin(heading);
        if (!inside(nx, ny))
        {
            // steering was not enough: head for the room center instead
            const double to_center = std::atan2(-y, -x);
            nx = x + step_len * std::cos(to_center);
            ny = y + step_len * std::sin(to_center);
            if (!inside(nx, ny))
            {
                nx = x;
                ny = y;
            }
        }
        x = nx;
        y = ny;
        walk.waypoints.push_back({x, y, 0.0});
    }
    return walk;
}

// ---------------------------------------------------------------------------------------------
// Combined motion

UserMotion::UserMotion(TraceSet trace, Walk walk, double hmd_height)
    : trace_(std::move(trace)), walk_(std::move(walk)), hmd_height_(hmd_height)
{
    trace_.validate();
    if (walk_.waypoints.empty())
        walk_.waypoints.push_back({});
}

double UserMotion::wrap(double t) const
{
    const double t0 = trace_.start();
    const double d = trace_.duration();
    if (t < t0)
        return t0;
    if (t - t0 < d)
        return t;
    return t0 + std::fmod(t - t0, d);
}

std::size_t UserMotion::bracket(double tw) const
{
    const auto &s = trace_.samples;
    auto it = std::upper_bound(s.begin(), s.end(), tw, [](double v, const TraceSample &x) { return v < x.t; });
    const auto i = static_cast<std::size_t>(std::distance(s.begin(), it));
    return i == 0 ? 0 : std::min(i - 1, s.size() - 2);
}

Pose UserMotion::pose_at(double t) const
{
    const double tw = wrap(t);
    const std::size_t i = bracket(tw);
    const TraceSample &a = trace_.samples[i];
    const TraceSample &b = trace_.samples[i + 1];
    const double s = std::clamp((tw - a.t) / (b.t - a.t), 0.0, 1.0);
    Pose p;
    p.t = t;
    p.orientation = s == 0.0 ? a.orientation : slerp(a.orientation, b.orientation, s);
    const Vec3 floor = walk_.position_at(t);
    p.position = {floor.x, floor.y, floor.z + hmd_height_};
    return p;
}

std::optional<DevicePrediction> UserMotion::device_prediction(double t) const
{
    const double tw = wrap(t);
    std::size_t i = bracket(tw);
    if (tw >= trace_.samples[i + 1].t)
        ++i;
    const TraceSample &s = trace_.samples[i];
    if (!s.device_predicted)
        return std::nullopt;
    return DevicePrediction{t - (tw - s.t), s.device_horizon, *s.device_predicted};
}

std::vector<double> UserMotion::seam_times(double until) const
{
    std::vector<double> out;
    const double d = trace_.duration();
    for (int k = 1; trace_.start() + k * d <= until; ++k)
        out.push_back(trace_.start() + k * d);
    return out;
}

Pose pose_at(const TraceSet &trace, const Walk &walk, double t, double hmd_height)
{
    return UserMotion(trace, walk, hmd_height).pose_at(t);
}

double windowed_angular_speed_dps(const PoseProvider &motion, double t, double window)
{
    const Quaternion a = motion.pose_at(t).orientation;
    const Quaternion b = motion.pose_at(t + window).orientation;
    return rad2deg(a.angle_to(b)) / window;
}

} // namespace mmxr
