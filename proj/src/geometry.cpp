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

#include "mmxr/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace mmxr
{

Vec3 Vec3::normalized() const
{
    const double n = norm();
    if (!(n > 0.0))
        throw std::invalid_argument("Vec3::normalized: zero-length vector");
    return *this / n;
}

Quaternion::Quaternion(double w, double x, double y, double z)
{
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(n > 1e-300) || !std::isfinite(n))
        throw std::invalid_argument("Quaternion: cannot normalize a zero or non-finite quaternion");
    w_ = w / n;
    x_ = x / n;
    y_ = y / n;
    z_ = z / n;
}

Quaternion Quaternion::from_axis_angle(const Vec3 &axis, double angle)
{
    const Vec3 a = axis.normalized();
    const double h = 0.5 * angle;
    const double s = std::sin(h);
    return {std::cos(h), a.x * s, a.y * s, a.z * s};
}

Quaternion Quaternion::from_rotation_vector(const Vec3 &rv)
{
    const double angle = rv.norm();
    if (angle < 1e-12)
        // first-order expansion keeps tiny rotations exact to rounding
        return {1.0, 0.5 * rv.x, 0.5 * rv.y, 0.5 * rv.z};
    return from_axis_angle(rv, angle);
}

Quaternion Quaternion::from_yaw_pitch_roll(double yaw, double pitch, double roll)
{
    return from_axis_angle({0, 0, 1}, yaw) * from_axis_angle({0, 1, 0}, pitch) * from_axis_angle({1, 0, 0}, roll);
}

Quaternion Quaternion::from_basis(const Vec3 &xa, const Vec3 &ya, const Vec3 &za)
{
    // Shepperd's method on the matrix with columns xa, ya, za.
    const double m00 = xa.x, m01 = ya.x, m02 = za.x;
    const double m10 = xa.y, m11 = ya.y, m12 = za.y;
    const double m20 = xa.z, m21 = ya.z, m22 = za.z;
    const double tr = m00 + m11 + m22;
    if (tr > 0.0)
    {
        const double s = std::sqrt(tr + 1.0) * 2.0;
        return {0.25 * s, (m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s};
    }
    if (m00 > m11 && m00 > m22)
    {
        const double s = std::sqrt(1.0 + m00 - m11 - m22) * 2.0;
        return {(m21 - m12) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s};
    }
    if (m11 > m22)
    {
        const double s = std::sqrt(1.0 + m11 - m00 - m22) * 2.0;
        return {(m02 - m20) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s};
    }
    const double s = std::sqrt(1.0 + m22 - m00 - m11) * 2.0;
    return {(m10 - m01) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s};
}

Quaternion Quaternion::conjugate() const { return {raw_tag{}, w_, -x_, -y_, -z_}; }

Quaternion Quaternion::operator*(const Quaternion &o) const
{
    return {w_ * o.w_ - x_ * o.x_ - y_ * o.y_ - z_ * o.z_, //
            w_ * o.x_ + x_ * o.w_ + y_ * o.z_ - z_ * o.y_, //
            w_ * o.y_ - x_ * o.z_ + y_ * o.w_ + z_ * o.x_, //
            w_ * o.z_ + x_ * o.y_ - y_ * o.x_ + z_ * o.w_};
}

Vec3 Quaternion::rotate(const Vec3 &v) const
{
    // v' = v + 2w (u x v) + 2 u x (u x v)
    const Vec3 u{x_, y_, z_};
    const Vec3 t = u.cross(v) * 2.0;
    return v + t * w_ + u.cross(t);
}

Quaternion Quaternion::canonicalized() const
{
    if (w_ < 0.0)
        return {raw_tag{}, -w_, -x_, -y_, -z_};
    return *this;
}

Vec3 Quaternion::to_rotation_vector() const
{
    const Quaternion c = canonicalized();
    const Vec3 u{c.x_, c.y_, c.z_};
    const double s = u.norm();
    if (s < 1e-12)
        return u * 2.0;
    const double angle = 2.0 * std::atan2(s, c.w_);
    return u * (angle / s);
}

double Quaternion::angle() const
{
    const Quaternion c = canonicalized();
    const double s = std::sqrt(c.x_ * c.x_ + c.y_ * c.y_ + c.z_ * c.z_);
    return 2.0 * std::atan2(s, c.w_);
}

double Quaternion::angle_to(const Quaternion &o) const { return (conjugate() * o).angle(); }

bool Quaternion::same_rotation(const Quaternion &o, double tol) const
{
    const double sign = dot(o) < 0.0 ? -1.0 : 1.0;
    return std::abs(w_ - sign * o.w_) <= tol && std::abs(x_ - sign * o.x_) <= tol &&
           std::abs(y_ - sign * o.y_) <= tol && std::abs(z_ - sign * o.z_) <= tol;
}

Quaternion slerp(const Quaternion &q0, const Quaternion &q1_in, double s)
{
    double d = q0.dot(q1_in);
    Quaternion q1 = q1_in;
    if (d < 0.0)
    {
        q1 = Quaternion(-q1_in.w(), -q1_in.x(), -q1_in.y(), -q1_in.z());
        d = -d;
    }
    d = std::min(d, 1.0);
    const double theta = std::acos(d);
    double a = 1.0 - s;
    double b = s;
    if (theta >= 1e-7)
    {
        const double st = std::sin(theta);
        a = std::sin((1.0 - s) * theta) / st;
        b = std::sin(s * theta) / st;
    }
    return {a * q0.w() + b * q1.w(), a * q0.x() + b * q1.x(), a * q0.y() + b * q1.y(), a * q0.z() + b * q1.z()};
}

Vec3 Direction::to_unit_vector() const
{
    const double az = deg2rad(azimuth);
    const double el = deg2rad(elevation);
    return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

Direction Direction::from_unit_vector(const Vec3 &v)
{
    const Vec3 u = v.normalized();
    const double horizontal = std::hypot(u.x, u.y);
    const double el = rad2deg(std::atan2(u.z, horizontal));
    if (horizontal < 1e-15)
        return {0.0, el};
    double az = rad2deg(std::atan2(u.y, u.x));
    if (az <= -180.0)
        az = 180.0;
    return {az, el};
}

Vec3 local_unit_vector(const Pose &pose, const Vec3 &target)
{
    const Vec3 d = target - pose.position;
    if (d.norm() < 1e-12)
        throw std::invalid_argument("ap_direction_in_hmd_frame: AP and device positions coincide");
    return pose.orientation.conjugate().rotate(d.normalized());
}

Direction ap_direction_in_hmd_frame(const Pose &pose, const Vec3 &ap_position)
{
    return Direction::from_unit_vector(local_unit_vector(pose, ap_position));
}

namespace
{

Vec3 extrapolate_position(std::span<const Pose> history, double horizon)
{
    const Pose &now = history.back();
    if (history.size() < 2)
        return now.position;
    const Pose &prev = history[history.size() - 2];
    const double dt = now.t - prev.t;
    if (!(dt > 0.0))
        return now.position;
    return now.position + (now.position - prev.position) * (horizon / dt);
}

} // namespace

Pose predict_pose(std::span<const Pose> history, double horizon, PredictionMode mode, const PoseProvider *provider)
{
    if (history.empty())
        throw std::invalid_argument("predict_pose: empty history");
    const Pose &now = history.back();
    const double t_target = now.t + horizon;

    switch (mode)
    {
    case PredictionMode::constant_velocity: {
        if (history.size() < 2)
            return {t_target, now.position, now.orientation};
        const Pose &prev = history[history.size() - 2];
        const double dt = now.t - prev.t;
        if (!(dt > 0.0))
            return {t_target, now.position, now.orientation};
        // body-frame angular velocity over the last gap
        const Vec3 omega = (prev.orientation.conjugate() * now.orientation).to_rotation_vector() / dt;
        const Quaternion q = now.orientation * Quaternion::from_rotation_vector(omega * horizon);
        return {t_target, extrapolate_position(history, horizon), q};
    }
    case PredictionMode::device: {
        if (provider == nullptr)
            throw std::logic_error("predict_pose: device mode needs a pose provider");
        const auto rec = provider->device_prediction(now.t);
        if (!rec)
            throw std::logic_error("predict_pose: trace has no device-prediction columns");
        Quaternion q = rec->orientation;
        const double recorded_target = rec->t + rec->horizon;
        const double remainder = t_target - recorded_target;
        if (std::abs(remainder) > 1e-9 && rec->horizon > 0.0)
        {
            // Stretch along the rotation the device itself predicted.
            const Quaternion base = provider->pose_at(rec->t).orientation;
            const Vec3 omega = (base.conjugate() * rec->orientation).to_rotation_vector() / rec->horizon;
            q = rec->orientation * Quaternion::from_rotation_vector(omega * remainder);
        }
        return {t_target, extrapolate_position(history, horizon), q};
    }
    case PredictionMode::oracle: {
        if (provider == nullptr)
            throw std::logic_error("predict_pose: oracle mode needs the full trace");
        Pose p = provider->pose_at(t_target);
        p.t = t_target;
        return p;
    }
    }
    throw std::logic_error("predict_pose: unknown mode");
}

} // namespace mmxr
