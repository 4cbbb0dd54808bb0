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

#include "mmxr/covrage.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace mmxr
{

Vec3 Trajectory::local_direction(double s) const
{
    const Quaternion q = slerp(q_now, q_pred, s);
    Vec3 d = d_world * (1.0 - s) + d_world_pred * s;
    if (d.norm() < 1e-12)
        d = d_world;
    return q.conjugate().rotate(d.normalized());
}

Trajectory make_trajectory(const Quaternion &q_now, const Quaternion &q_pred, const Vec3 &d_world)
{
    Trajectory t;
    t.q_now = q_now;
    t.q_pred = q_pred;
    t.d_world = d_world.normalized();
    t.d_world_pred = t.d_world;
    const double c = std::clamp(t.local_direction(0.0).dot(t.local_direction(1.0)), -1.0, 1.0);
    t.span_deg = rad2deg(std::acos(c));
    return t;
}

Trajectory make_trajectory(const Pose &now, const Pose &pred, const Vec3 &ap_position)
{
    Trajectory t = make_trajectory(now.orientation, pred.orientation, ap_position - now.position);
    const Vec3 to_ap_pred = ap_position - pred.position;
    if (to_ap_pred.norm() > 1e-12)
        t.d_world_pred = to_ap_pred.normalized();
    const double c = std::clamp(t.local_direction(0.0).dot(t.local_direction(1.0)), -1.0, 1.0);
    t.span_deg = rad2deg(std::acos(c));
    return t;
}

double strip_beamwidth_deg(int elements_across, double spacing)
{
    return rad2deg(0.886 / (static_cast<double>(elements_across) * spacing));
}

int select_strip_count(double span_deg, int elements_along, double spacing, int k_max)
{
    if (k_max < 1)
        throw std::invalid_argument("select_strip_count: k_max must be >= 1");
    k_max = std::min(k_max, elements_along);
    auto next = [&](int k) {
        const int per_block = elements_along / k;
        const double width = strip_beamwidth_deg(per_block, spacing);
        const double wanted = std::ceil(span_deg / width - 1e-12);
        return static_cast<int>(std::clamp(wanted, 1.0, static_cast<double>(k_max)));
    };
    int k = 1;
    std::set<int> seen{k};
    for (;;)
    {
        const int k_next = next(k);
        if (k_next == k || k_next == k_max)
            return k_next;
        if (!seen.insert(k_next).second)
            // oscillating: keep the wider coverage of the two
            return std::max(k, k_next);
        k = k_next;
    }
}

namespace
{

StripAxis dominant_axis(const Trajectory &trajectory)
{
    const Vec3 delta = trajectory.local_direction(1.0) - trajectory.local_direction(0.0);
    return std::abs(delta.y) >= std::abs(delta.z) ? StripAxis::columns : StripAxis::rows;
}

int block_of(const SubArrayPlan &plan, int r, int c)
{
    const int along = plan.axis == StripAxis::columns ? c : r;
    for (int b = 0; b < plan.k; ++b)
        if (along >= plan.blocks[static_cast<std::size_t>(b)].begin &&
            along < plan.blocks[static_cast<std::size_t>(b)].end)
            return b;
    throw std::logic_error("SubArrayPlan: element outside every block");
}

std::complex<double> block_field(const BeamPattern &pattern, const SubArrayPlan &plan, int b, const Vec3 &u)
{
    const IndexRange &range = plan.blocks[static_cast<std::size_t>(b)];
    const ArrayGeometry &g = pattern.geometry();
    if (plan.axis == StripAxis::columns)
        return pattern.partial_field(u, 0, g.rows, range.begin, range.end);
    return pattern.partial_field(u, range.begin, range.end, 0, g.cols);
}

} // namespace

SubArrayPlan plan_subarrays_fixed(const ArrayGeometry &geometry, const Trajectory &trajectory, int k, StripAxis axis)
{
    geometry.validate();
    const int along = axis == StripAxis::columns ? geometry.cols : geometry.rows;
    if (k < 1 || k > along)
        throw std::invalid_argument("plan_subarrays: strip count " + std::to_string(k) + " outside [1, " +
                                    std::to_string(along) + "]");
    SubArrayPlan plan;
    plan.k = k;
    plan.axis = axis;
    const int base = along / k;
    for (int i = 0; i < k; ++i)
    {
        plan.blocks.push_back({i * base, i == k - 1 ? along : (i + 1) * base});
        const double s = (i + 0.5) / k;
        plan.target_s.push_back(s);
        plan.targets.push_back(trajectory.direction(s));
    }
    plan.offsets.assign(static_cast<std::size_t>(k), 0.0);
    return plan;
}

SubArrayPlan plan_subarrays(const ArrayGeometry &geometry, const Trajectory &trajectory, int k_max)
{
    const StripAxis axis = dominant_axis(trajectory);
    const int along = axis == StripAxis::columns ? geometry.cols : geometry.rows;
    const int k = select_strip_count(trajectory.span_deg, along, geometry.spacing, k_max);
    return plan_subarrays_fixed(geometry, trajectory, k, axis);
}

Awv strip_steering(const ArrayGeometry &geometry, const SubArrayPlan &plan)
{
    std::vector<Vec3> target_u;
    for (const Direction &d : plan.targets)
        target_u.push_back(d.to_unit_vector());
    std::vector<double> phases(geometry.size());
    for (int r = 0; r < geometry.rows; ++r)
        for (int c = 0; c < geometry.cols; ++c)
        {
            const Vec3 &u = target_u[static_cast<std::size_t>(block_of(plan, r, c))];
            phases[static_cast<std::size_t>(r * geometry.cols + c)] =
                -2.0 * pi * (geometry.y_offset(c) * u.y + geometry.z_offset(r) * u.z);
        }
    return Awv(std::move(phases));
}

SubArrayPlan align_offsets(const ArrayGeometry &geometry, SubArrayPlan plan, const Trajectory &trajectory)
{
    plan.offsets.assign(static_cast<std::size_t>(plan.k), 0.0);
    if (plan.k == 1)
        return plan;
    const BeamPattern pattern(geometry, strip_steering(geometry, plan));
    // |F|^2 below the -300 dB floor counts as a null
    constexpr double null_power = 1e-30;
    for (int i = 1; i < plan.k; ++i)
    {
        const Vec3 u = trajectory.local_direction(static_cast<double>(i) / plan.k);
        std::complex<double> accumulated{0.0, 0.0};
        for (int j = 0; j < i; ++j)
            accumulated += block_field(pattern, plan, j, u) * std::polar(1.0, plan.offsets[static_cast<std::size_t>(j)]);
        const std::complex<double> own = block_field(pattern, plan, i, u);
        if (std::norm(own) < null_power || std::norm(accumulated) < null_power)
            continue;
        plan.offsets[static_cast<std::size_t>(i)] = std::arg(accumulated) - std::arg(own);
    }
    return plan;
}

Awv synthesize_awv(const ArrayGeometry &geometry, const SubArrayPlan &plan_in, const Trajectory &trajectory)
{
    const SubArrayPlan plan = align_offsets(geometry, plan_in, trajectory);
    Awv awv = strip_steering(geometry, plan);
    for (int r = 0; r < geometry.rows; ++r)
        for (int c = 0; c < geometry.cols; ++c)
            awv.phases[static_cast<std::size_t>(r * geometry.cols + c)] +=
                plan.offsets[static_cast<std::size_t>(block_of(plan, r, c))];
    return awv;
}

Awv covrage_beam(const ArrayGeometry &geometry, const Pose &pose_now, const Pose &pose_pred, const Vec3 &ap_position,
                 int k_max)
{
    const Trajectory trajectory = make_trajectory(pose_now, pose_pred, ap_position);
    return synthesize_awv(geometry, plan_subarrays(geometry, trajectory, k_max), trajectory);
}

} // namespace mmxr
