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

// Proactive HMD-side beam synthesis. The AP's direction, as seen from the HMD, is swept along
// the arc between the current and the predicted head orientation; the array is cut into strips
// and every strip steers a sub-beam at its own point of that arc. Strip phase offsets are chosen
// so that neighbouring sub-beams add in phase where their coverage meets.

#ifndef MMXR_COVRAGE_HPP
#define MMXR_COVRAGE_HPP

#include "mmxr/array.hpp"

#include <vector>

namespace mmxr
{

/// Path of the AP direction in the HMD frame between now (s = 0) and the prediction (s = 1).
struct Trajectory
{
    Quaternion q_now;
    Quaternion q_pred;
    Vec3 d_world;      // unit HMD -> AP direction in world frame, now
    Vec3 d_world_pred; // same at the predicted position (equals d_world without translation)
    double span_deg = 0.0;

    /// AP unit vector in the HMD frame at fraction s.
    Vec3 local_direction(double s) const;
    Direction direction(double s) const { return Direction::from_unit_vector(local_direction(s)); }
};

Trajectory make_trajectory(const Quaternion &q_now, const Quaternion &q_pred, const Vec3 &d_world);
Trajectory make_trajectory(const Pose &now, const Pose &pred, const Vec3 &ap_position);

enum class StripAxis
{
    columns, // blocks are ranges of columns, sub-beams spread along azimuth
    rows,    // blocks are ranges of rows, sub-beams spread along elevation
};

struct IndexRange
{
    int begin = 0;
    int end = 0; // exclusive
    int size() const { return end - begin; }
    bool operator==(const IndexRange &) const = default;
};

struct SubArrayPlan
{
    int k = 1;
    StripAxis axis = StripAxis::columns;
    std::vector<IndexRange> blocks;
    std::vector<Direction> targets;
    std::vector<double> offsets; // radians, filled by align_offsets
    std::vector<double> target_s; // trajectory fraction of every target
};

/// Half-power beamwidth estimate 0.886 / (elements * spacing) for a strip, in degrees.
double strip_beamwidth_deg(int elements_across, double spacing);

/// Number of strips from the fixed-point rule k = clamp(ceil(span / beamwidth(strip)), 1, k_max).
int select_strip_count(double span_deg, int elements_along, double spacing, int k_max);

/// Strip layout for a given trajectory; the strip axis follows the dominant component of the
/// AP's apparent motion.
SubArrayPlan plan_subarrays(const ArrayGeometry &geometry, const Trajectory &trajectory, int k_max = 8);

/// Same layout with a forced strip count.
SubArrayPlan plan_subarrays_fixed(const ArrayGeometry &geometry, const Trajectory &trajectory, int k,
                                  StripAxis axis = StripAxis::columns);

/// Phases before strip offsets: every strip is steered (global element positions) at its target.
Awv strip_steering(const ArrayGeometry &geometry, const SubArrayPlan &plan);

/// Sequential offset alignment at the crossover between consecutive strips.
SubArrayPlan align_offsets(const ArrayGeometry &geometry, SubArrayPlan plan, const Trajectory &trajectory);

/// Strip phases plus crossover-aligned offsets (the plan's own offsets are recomputed).
Awv synthesize_awv(const ArrayGeometry &geometry, const SubArrayPlan &plan, const Trajectory &trajectory);

/// Complete beam for one beamforming event.
Awv covrage_beam(const ArrayGeometry &geometry, const Pose &pose_now, const Pose &pose_pred, const Vec3 &ap_position,
                 int k_max = 8);

} // namespace mmxr

#endif
