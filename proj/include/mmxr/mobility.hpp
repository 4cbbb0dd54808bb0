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

#ifndef MMXR_MOBILITY_HPP
#define MMXR_MOBILITY_HPP

#include "mmxr/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmxr
{

struct TraceSample
{
    double t = 0.0;
    Quaternion orientation;
    std::optional<Quaternion> device_predicted;
    double device_horizon = 0.0; // meaningful when device_predicted is set
    std::optional<Vec3> position;
};

enum class TraceLabel
{
    low,
    high,
    synthetic,
};

struct TraceSet
{
    std::vector<TraceSample> samples;
    TraceLabel label = TraceLabel::synthetic;

    double start() const { return samples.front().t; }
    double duration() const { return samples.back().t - samples.front().t; }
    bool has_device_predictions() const;
    void validate() const; // throws TraceError
};

class TraceError : public std::runtime_error
{
  public:
    TraceError(std::size_t row, const std::string &what)
        : std::runtime_error(row ? "trace row " + std::to_string(row) + ": " + what : what), row_(row)
    {
    }
    std::size_t row() const { return row_; }

  private:
    std::size_t row_;
};

/// CSV with header `t,qw,qx,qy,qz[,pw,px,py,pz,ph_qw,ph_qx,ph_qy,ph_qz,ph_h]`. Position columns
/// may be empty in rows without position; the device-prediction block likewise.
/// Quaternions off unit norm by up to 1% are renormalized, beyond that the row is rejected.
TraceSet load_trace(const std::filesystem::path &path);
TraceSet parse_trace(const std::string &csv);
void write_trace(const TraceSet &trace, const std::filesystem::path &path);
std::string format_trace(const TraceSet &trace);

struct RotationTraceOptions
{
    double peak_velocity_dps = 300.0;
    double duration = 20.0;
    double sample_rate = 1000.0;
    std::uint64_t seed = 1;
    double max_pitch_deg = 60.0;
    /// Horizon of the emulated on-device predictor written into the trace (0 disables).
    double device_horizon = 0.1;
};

/// Yaw and pitch as sums of three random-phase sinusoids each, scaled so that the largest
/// angular speed over the sample grid equals the requested peak. The device-prediction columns
/// are filled by a constant-angular-acceleration extrapolator over the last three samples.
TraceSet generate_rotation_trace(const RotationTraceOptions &options);

/// Head held still at identity orientation.
TraceSet static_rotation_trace(double duration, double sample_rate = 100.0);

/// Axis-aligned room footprint centered on the origin.
struct Room
{
    double length = 20.0; // along x
    double width = 10.0;  // along y
    double height = 10.0;

    double x_min() const { return -0.5 * length; }
    double x_max() const { return 0.5 * length; }
    double y_min() const { return -0.5 * width; }
    double y_max() const { return 0.5 * width; }
    double wall_distance(double x, double y) const;
};

struct WalkOptions
{
    double speed = 1.0;          // m/s
    double step_interval = 0.5;  // s
    double duration = 20.0;      // s
    std::uint64_t seed = 1;
    double steer_distance = 1.0; // start steering this close to a wall
    double max_steer_deg = 30.0; // per step
    double start_x = 0.0;
    double start_y = 0.0;
};

/// Floor-plane path sampled at step boundaries; positions in between are linear.
struct Walk
{
    double step_interval = 0.5;
    std::vector<Vec3> waypoints; // z = 0

    Vec3 position_at(double t) const;
};

/// Virtual random walk over cardinal headings, mapped to the room by rotating the physical
/// heading away from walls it gets close to.
Walk generate_walk(const Room &room, const WalkOptions &options);

/// Trace orientation plus walk position. The trace loops when the query time runs past its end.
class UserMotion : public PoseProvider
{
  public:
    UserMotion(TraceSet trace, Walk walk, double hmd_height = 1.7);

    Pose pose_at(double t) const override;
    std::optional<DevicePrediction> device_prediction(double t) const override;

    const TraceSet &trace() const { return trace_; }
    const Walk &walk() const { return walk_; }

    /// Times at which the looped trace jumps back to its start, up to `until`.
    std::vector<double> seam_times(double until) const;

  private:
    double wrap(double t) const;
    std::size_t bracket(double t_wrapped) const; // index i with t_i <= t < t_{i+1}

    TraceSet trace_;
    Walk walk_;
    double hmd_height_;
};

Pose pose_at(const TraceSet &trace, const Walk &walk, double t, double hmd_height = 1.7);

/// Angle of q(t)^-1 q(t + window) divided by the window, in degrees per second.
double windowed_angular_speed_dps(const PoseProvider &motion, double t, double window = 0.1);

} // namespace mmxr

#endif
