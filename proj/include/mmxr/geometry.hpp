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

#ifndef MMXR_GEOMETRY_HPP
#define MMXR_GEOMETRY_HPP

#include <cmath>
#include <numbers>
#include <optional>
#include <span>

namespace mmxr
{

inline constexpr double pi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * pi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / pi; }

struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr bool operator==(const Vec3 &) const = default;

    constexpr double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3 cross(const Vec3 &o) const
    {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const; // throws std::invalid_argument on zero length
};

inline constexpr Vec3 operator*(double s, const Vec3 &v) { return v * s; }

/// Unit quaternion, Hamilton convention, scalar first, right-handed.
/// Rotates vectors from the body frame into the world frame.
/// Every constructor normalizes, so a Quaternion value is always a rotation.
class Quaternion
{
  public:
    constexpr Quaternion() = default;
    Quaternion(double w, double x, double y, double z); // throws on (near) zero norm

    static Quaternion identity() { return {}; }
    /// Rotation of `angle` radians about `axis` (any nonzero length).
    static Quaternion from_axis_angle(const Vec3 &axis, double angle);
    /// Rotation vector (axis scaled by angle in radians); zero vector gives identity.
    static Quaternion from_rotation_vector(const Vec3 &rv);
    /// Heading about world +z, then pitch about the body +y axis, then roll about body +x.
    /// Positive pitch tilts the boresight (+x) downward, following the right-hand rule.
    static Quaternion from_yaw_pitch_roll(double yaw, double pitch, double roll = 0.0);
    /// Rotation whose columns are the body axes expressed in world coordinates.
    static Quaternion from_basis(const Vec3 &x_axis, const Vec3 &y_axis, const Vec3 &z_axis);

    double w() const { return w_; }
    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }

    Quaternion conjugate() const;
    Quaternion inverse() const { return conjugate(); }
    Quaternion operator*(const Quaternion &o) const;
    Vec3 rotate(const Vec3 &v) const;

    double dot(const Quaternion &o) const { return w_ * o.w_ + x_ * o.x_ + y_ * o.y_ + z_ * o.z_; }
    double norm() const { return std::sqrt(dot(*this)); }

    /// Same rotation with w >= 0.
    Quaternion canonicalized() const;
    /// Rotation vector of this rotation, angle in [0, pi].
    Vec3 to_rotation_vector() const;
    /// Rotation angle in [0, pi].
    double angle() const;
    /// Angle of the relative rotation this^-1 * o, in [0, pi].
    double angle_to(const Quaternion &o) const;

    /// Component-wise equality up to sign (both covers of the same rotation compare equal).
    bool same_rotation(const Quaternion &o, double tol = 1e-12) const;

  private:
    struct raw_tag
    {
    };
    constexpr Quaternion(raw_tag, double w, double x, double y, double z) : w_(w), x_(x), y_(y), z_(z) {}

    double w_ = 1.0;
    double x_ = 0.0;
    double y_ = 0.0;
    double z_ = 0.0;
};

/// Spherical interpolation on the shortest arc; s = 0 gives q0, s = 1 gives q1 (up to sign).
Quaternion slerp(const Quaternion &q0, const Quaternion &q1, double s);

/// Azimuth / elevation pair in degrees, azimuth in (-180, 180], elevation in [-90, 90].
/// Azimuth is measured from +x toward +y, elevation from the x-y plane toward +z.
struct Direction
{
    double azimuth = 0.0;
    double elevation = 0.0;

    Vec3 to_unit_vector() const;
    /// Poles map to azimuth 0. Throws std::invalid_argument on a zero vector.
    static Direction from_unit_vector(const Vec3 &v);
};

/// Timestamped HMD (or AP) pose: position in the room frame (origin at floor center, z up)
/// and orientation rotating the device frame (+x boresight, +z up) into the room frame.
struct Pose
{
    double t = 0.0;
    Vec3 position;
    Quaternion orientation;
};

/// Direction of `ap_position` as seen from the device described by `pose`, in its own frame.
/// Throws std::invalid_argument when the two positions coincide.
Direction ap_direction_in_hmd_frame(const Pose &pose, const Vec3 &ap_position);

/// Same as ap_direction_in_hmd_frame but returns the unit vector in the device frame.
Vec3 local_unit_vector(const Pose &pose, const Vec3 &target);

enum class PredictionMode
{
    constant_velocity,
    device,
    oracle,
};

/// Device-recorded prediction: orientation the device expected at `t + horizon` when polled at `t`.
struct DevicePrediction
{
    double t = 0.0;
    double horizon = 0.0;
    Quaternion orientation;
};

/// Look-up of ground truth and recorded device predictions, used by the device and oracle predictors.
class PoseProvider
{
  public:
    virtual ~PoseProvider() = default;
    virtual Pose pose_at(double t) const = 0;
    /// Latest device prediction recorded at or before `t`, if the source has any.
    virtual std::optional<DevicePrediction> device_prediction(double /*t*/) const { return std::nullopt; }
};

/// Predict the pose `horizon` seconds after the last history sample.
///  - constant_velocity: angular velocity from the last two samples, position extrapolated linearly.
///  - device: the provider's recorded prediction; if its horizon differs from the requested one,
///    the remainder is covered at the constant angular velocity implied by that prediction.
///  - oracle: the provider's ground truth at t + horizon.
/// Throws std::invalid_argument on empty history, or std::logic_error when the mode needs a provider
/// (or device data) that is absent.
Pose predict_pose(std::span<const Pose> history, double horizon, PredictionMode mode,
                  const PoseProvider *provider = nullptr);

} // namespace mmxr

#endif
