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

#include "catch_amalgamated.hpp"
#include "test_support.hpp"

#include "mmxr/geometry.hpp"

#include <optional>
#include <vector>

using namespace mmxr;
using Catch::Matchers::WithinAbs;

// Covered tests:
// - Rotation and products against Eigen
// - Slerp endpoints, midpoint, constant angular rate, shortest arc
// - Yaw/pitch/roll conventions and from_basis
// - Direction conversions and pole handling
// - AP direction seen from a pose
// - Pose prediction in all three modes

TEST_CASE("Quaternion - Rotation matches Eigen")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i)
    {
        const Quaternion q = test::random_quaternion(rng);
        const Quaternion p = test::random_quaternion(rng);
        const Vec3 v = test::random_unit(rng) * 3.0;
        const Vec3 expect = test::from_eigen(test::to_eigen(q) * test::to_eigen(v));
        CHECK(test::max_abs_diff(q.rotate(v), expect) < 1e-12);

        const Eigen::Quaterniond pq = test::to_eigen(q) * test::to_eigen(p);
        const Quaternion prod = q * p;
        CHECK_THAT(prod.w(), WithinAbs(pq.w(), 1e-12));
        CHECK_THAT(prod.x(), WithinAbs(pq.x(), 1e-12));
        CHECK_THAT(prod.y(), WithinAbs(pq.y(), 1e-12));
        CHECK_THAT(prod.z(), WithinAbs(pq.z(), 1e-12));

        CHECK((q * q.conjugate()).same_rotation(Quaternion::identity(), 1e-12));
        CHECK_THAT(q.norm(), WithinAbs(1.0, 1e-14));
    }
}

TEST_CASE("Quaternion - Construction")
{
    CHECK_THROWS_AS(Quaternion(0.0, 0.0, 0.0, 0.0), std::invalid_argument);

    const Quaternion q(2.0, 0.0, 0.0, 0.0);
    CHECK(q.same_rotation(Quaternion::identity()));

    const Quaternion z90 = Quaternion::from_axis_angle({0.0, 0.0, 5.0}, pi / 2.0);
    CHECK(test::max_abs_diff(z90.rotate({1.0, 0.0, 0.0}), {0.0, 1.0, 0.0}) < 1e-15);

    const Vec3 rv{0.3, -0.2, 0.9};
    const Quaternion r = Quaternion::from_rotation_vector(rv);
    CHECK(test::max_abs_diff(r.to_rotation_vector(), rv) < 1e-12);
    CHECK_THAT(r.angle(), WithinAbs(rv.norm(), 1e-12));
    CHECK(Quaternion::from_rotation_vector({0.0, 0.0, 0.0}).same_rotation(Quaternion::identity()));

    // both covers of the same rotation
    const Quaternion neg(-r.w(), -r.x(), -r.y(), -r.z());
    CHECK(neg.same_rotation(r));
    CHECK(neg.canonicalized().w() >= 0.0);
    CHECK_THAT(neg.angle_to(r), WithinAbs(0.0, 1e-7));
}

TEST_CASE("Quaternion - Yaw, pitch, roll conventions")
{
    const Vec3 bore{1.0, 0.0, 0.0};
    CHECK(test::max_abs_diff(Quaternion::from_yaw_pitch_roll(deg2rad(90.0), 0.0).rotate(bore), {0.0, 1.0, 0.0}) <
          1e-15);
    // positive pitch looks down
    const Vec3 down = Quaternion::from_yaw_pitch_roll(0.0, deg2rad(30.0)).rotate(bore);
    CHECK_THAT(down.z, WithinAbs(-0.5, 1e-15));
    CHECK_THAT(down.x, WithinAbs(std::sqrt(3.0) / 2.0, 1e-15));
    // roll leaves the boresight alone
    CHECK(test::max_abs_diff(Quaternion::from_yaw_pitch_roll(0.0, 0.0, 1.0).rotate(bore), bore) < 1e-15);

    // yaw then pitch equals the Eigen composition z * y
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ang(-3.0, 3.0);
    for (int i = 0; i < 50; ++i)
    {
        const double yaw = ang(rng), pitch = 0.5 * ang(rng), roll = ang(rng);
        const Eigen::Quaterniond e = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
                                     Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
                                     Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX());
        const Quaternion q = Quaternion::from_yaw_pitch_roll(yaw, pitch, roll);
        CHECK(q.same_rotation(Quaternion(e.w(), e.x(), e.y(), e.z()), 1e-12));
    }
}

TEST_CASE("Quaternion - From basis")
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i)
    {
        const Quaternion q = test::random_quaternion(rng);
        const Quaternion back =
            Quaternion::from_basis(q.rotate({1.0, 0.0, 0.0}), q.rotate({0.0, 1.0, 0.0}), q.rotate({0.0, 0.0, 1.0}));
        CHECK(back.same_rotation(q, 1e-12));
    }
    // boresight straight down
    const Quaternion down = Quaternion::from_basis({0.0, 0.0, -1.0}, {1.0, 0.0, 0.0}, {0.0, -1.0, 0.0});
    CHECK(test::max_abs_diff(down.rotate({1.0, 0.0, 0.0}), {0.0, 0.0, -1.0}) < 1e-15);
}

TEST_CASE("Slerp - Identities")
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i)
    {
        const Quaternion a = test::random_quaternion(rng);
        const Quaternion b = test::random_quaternion(rng);
        CHECK(slerp(a, b, 0.0).same_rotation(a, 1e-12));
        CHECK(slerp(a, b, 1.0).same_rotation(b, 1e-12));

        const double total = a.angle_to(b);
        for (double s : {0.1, 0.25, 0.5, 0.9})
        {
            const Quaternion m = slerp(a, b, s);
            // constant angular rate along the shortest arc
            CHECK_THAT(a.angle_to(m), WithinAbs(s * total, 1e-9));
            CHECK_THAT(m.angle_to(b), WithinAbs((1.0 - s) * total, 1e-9));
            const Eigen::Quaterniond e = test::to_eigen(a).slerp(s, test::to_eigen(b));
            CHECK(m.same_rotation(Quaternion(e.w(), e.x(), e.y(), e.z()), 1e-9));
        }
    }
    // opposite covers take the short way
    const Quaternion a = Quaternion::from_axis_angle({0.0, 0.0, 1.0}, 0.2);
    const Quaternion b = Quaternion::from_axis_angle({0.0, 0.0, 1.0}, 0.4);
    const Quaternion nb(-b.w(), -b.x(), -b.y(), -b.z());
    CHECK(slerp(a, nb, 0.5).same_rotation(Quaternion::from_axis_angle({0.0, 0.0, 1.0}, 0.3), 1e-12));
    // nearly equal inputs
    const Quaternion c = Quaternion::from_axis_angle({1.0, 0.0, 0.0}, 1e-9);
    CHECK(slerp(Quaternion::identity(), c, 0.5).same_rotation(Quaternion::from_axis_angle({1.0, 0.0, 0.0}, 5e-10), 1e-15));
}

TEST_CASE("Direction - Conversions")
{
    const Direction d{30.0, 20.0};
    const Vec3 u = d.to_unit_vector();
    CHECK_THAT(u.norm(), WithinAbs(1.0, 1e-15));
    const Direction back = Direction::from_unit_vector(u * 4.0);
    CHECK_THAT(back.azimuth, WithinAbs(30.0, 1e-12));
    CHECK_THAT(back.elevation, WithinAbs(20.0, 1e-12));

    CHECK_THAT(Direction::from_unit_vector({-1.0, 0.0, 0.0}).azimuth, WithinAbs(180.0, 1e-12));
    const Direction pole = Direction::from_unit_vector({0.0, 0.0, 2.0});
    CHECK(pole.azimuth == 0.0);
    CHECK_THAT(pole.elevation, WithinAbs(90.0, 1e-12));
    CHECK_THROWS_AS(Direction::from_unit_vector({0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("Pose - AP direction in the HMD frame")
{
    const Vec3 ap{0.0, 0.0, 10.0};
    Pose pose{0.0, {-3.0, 0.0, 10.0}, Quaternion::identity()};
    const Direction ahead = ap_direction_in_hmd_frame(pose, ap);
    CHECK_THAT(ahead.azimuth, WithinAbs(0.0, 1e-12));
    CHECK_THAT(ahead.elevation, WithinAbs(0.0, 1e-12));

    // turning the head left by 90 degrees puts the AP on the right
    pose.orientation = Quaternion::from_yaw_pitch_roll(deg2rad(90.0), 0.0);
    CHECK_THAT(ap_direction_in_hmd_frame(pose, ap).azimuth, WithinAbs(-90.0, 1e-12));

    pose.position = ap;
    CHECK_THROWS_AS(ap_direction_in_hmd_frame(pose, ap), std::invalid_argument);
}

namespace
{

/// Constant-rate rotation about a fixed axis, with device predictions that are exact.
class SpinningHead : public PoseProvider
{
  public:
    SpinningHead(Vec3 axis, double rate, std::optional<double> device_horizon)
        : axis_(axis.normalized()), rate_(rate), horizon_(device_horizon)
    {
    }
    Pose pose_at(double t) const override
    {
        return {t, {1.0, 2.0, 1.7}, Quaternion::from_axis_angle(axis_, rate_ * t)};
    }
    std::optional<DevicePrediction> device_prediction(double t) const override
    {
        if (!horizon_)
            return std::nullopt;
        return DevicePrediction{t, *horizon_, pose_at(t + *horizon_).orientation};
    }

  private:
    Vec3 axis_;
    double rate_;
    std::optional<double> horizon_;
};

} // namespace

TEST_CASE("Prediction - Constant velocity, device and oracle")
{
    const SpinningHead head({0.2, 0.3, 1.0}, deg2rad(200.0), 0.1);
    const Pose history[2] = {head.pose_at(1.0 - 1e-3), head.pose_at(1.0)};
    const Pose truth = head.pose_at(1.1);

    for (PredictionMode mode : {PredictionMode::constant_velocity, PredictionMode::device, PredictionMode::oracle})
    {
        const Pose p = predict_pose(history, 0.1, mode, &head);
        CHECK_THAT(p.t, WithinAbs(1.1, 1e-12));
        CHECK(p.orientation.angle_to(truth.orientation) < 1e-9);
    }

    // the device horizon is stretched to the requested one
    const Pose far = predict_pose(history, 1.0, PredictionMode::device, &head);
    CHECK(far.orientation.angle_to(head.pose_at(2.0).orientation) < 1e-9);

    // single sample: no motion information
    const Pose single = predict_pose(std::span<const Pose>(history + 1, 1), 0.5, PredictionMode::constant_velocity);
    CHECK(single.orientation.same_rotation(history[1].orientation));

    CHECK_THROWS_AS(predict_pose(std::span<const Pose>(), 0.1, PredictionMode::constant_velocity),
                    std::invalid_argument);
    CHECK_THROWS_AS(predict_pose(history, 0.1, PredictionMode::oracle, nullptr), std::logic_error);
    const SpinningHead no_device({0.0, 0.0, 1.0}, 1.0, std::nullopt);
    CHECK_THROWS_AS(predict_pose(history, 0.1, PredictionMode::device, &no_device), std::logic_error);
}

TEST_CASE("Prediction - Linear position extrapolation")
{
    const Pose a{0.0, {0.0, 0.0, 1.7}, Quaternion::identity()};
    const Pose b{0.5, {0.5, -0.25, 1.7}, Quaternion::identity()};
    const Pose history[2] = {a, b};
    const Pose p = predict_pose(history, 1.0, PredictionMode::constant_velocity);
    CHECK(test::max_abs_diff(p.position, {1.5, -0.75, 1.7}) < 1e-12);
}
