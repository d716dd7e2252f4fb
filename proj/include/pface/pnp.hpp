// Copyright 2026 The pface Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "pface/geometry.hpp"

#include <optional>

/**
 * Perspective-n-Point: recovers the world-to-camera pose from 3D world points
 * and their 2D pixel observations under known intrinsics.
 *
 * solve_pnp_dlt gives a linear estimate; solve_pnp refines it (or a caller
 * supplied pose) with Levenberg-Marquardt on the squared reprojection error.
 */
namespace pface {

struct PnPConfig
{
    int max_iterations = 100;
    double cost_tolerance = 1e-12; ///< relative decrease of the cost
    double step_tolerance = 1e-12; ///< step norm relative to the parameter norm
    double initial_damping = 1e-3;
    double damping_up = 10;
    double damping_down = 0.1;
};

void validate(const PnPConfig& cfg);

struct PnPResult
{
    Pose6DoF pose;
    double rms_reprojection_error = 0; ///< pixels
    int iterations = 0;
    bool converged = false;
    double initial_cost = 0; ///< sum of squared pixel residuals at the start
    double final_cost = 0;
};

/// Minimum number of correspondences accepted by the solvers.
inline constexpr Eigen::Index kMinPnPPoints = 6;

/**
 * Linear pose estimate from the 2N x 12 homogeneous system on
 * K^-1-normalized pixels. The 3x3 block is projected to the nearest rotation
 * and the sign is fixed so the median depth is positive.
 *
 * Throws TooFewPoints for N < 6 and DegenerateConfiguration when the system
 * has a second (near) null direction, e.g. for coplanar points.
 */
Pose6DoF solve_pnp_dlt(const VertexSet& v, const LandmarkSet2D& p, const CameraIntrinsics& k);

/// Levenberg-Marquardt refinement; starts from init when given, else from solve_pnp_dlt.
PnPResult solve_pnp(const VertexSet& v, const LandmarkSet2D& p, const CameraIntrinsics& k, const PnPConfig& cfg = {},
                    const std::optional<Pose6DoF>& init = std::nullopt);

/// sqrt of the mean squared 2D residual between project_world(v, pose, k) and p.
double reprojection_rms(const VertexSet& v, const Pose6DoF& pose, const CameraIntrinsics& k, const LandmarkSet2D& p);

/// Stacked residuals (u_0, v_0, u_1, v_1, ...) of projection minus observation.
Eigen::VectorXd reprojection_residuals(const VertexSet& v, const Pose6DoF& pose, const CameraIntrinsics& k,
                                       const LandmarkSet2D& p);

/**
 * Jacobian of reprojection_residuals with respect to the local increment
 * (d_omega, d_t) applied by apply_increment.
 */
Eigen::Matrix<double, Eigen::Dynamic, 6> reprojection_jacobian(const VertexSet& v, const Pose6DoF& pose,
                                                               const CameraIntrinsics& k);

/// R <- R * rotation_from_axis_angle(d_omega), T <- T + d_t.
Pose6DoF apply_increment(const Pose6DoF& pose, const Eigen::Matrix<double, 6, 1>& delta);

} // namespace pface
