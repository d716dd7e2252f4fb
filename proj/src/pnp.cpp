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

#include "pface/pnp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <vector>

namespace pface {

namespace {

void check_correspondences(const VertexSet& v, const LandmarkSet2D& p)
{
    if (v.frame != Frame::world)
        throw FrameMismatch("pnp: 3D points must be in the world frame");
    if (v.size() != p.rows())
        throw SizeMismatch("pnp: " + std::to_string(v.size()) + " points vs " + std::to_string(p.rows()) +
                           " observations");
    if (v.size() < kMinPnPPoints)
        throw TooFewPoints("pnp: need at least 6 correspondences, got " + std::to_string(v.size()));
    if (!v.points.allFinite() || !p.allFinite())
        throw InputError("pnp: non-finite input");
}

double sum_of_squares(const VertexSet& v, const Pose6DoF& pose, const CameraIntrinsics& k, const LandmarkSet2D& p)
{
    return reprojection_residuals(v, pose, k, p).squaredNorm();
}

Eigen::Matrix<double, 6, 1> parameter_vector(const Pose6DoF& pose)
{
    Eigen::Matrix<double, 6, 1> x;
    x << axis_angle_from_rotation(pose.rotation), pose.translation.transpose();
    return x;
}

} // namespace

void validate(const PnPConfig& cfg)
{
    if (cfg.max_iterations <= 0 || !(cfg.cost_tolerance > 0) || !(cfg.step_tolerance > 0) ||
        !(cfg.initial_damping > 0))
        throw InputError("PnPConfig: iteration count, tolerances and damping must be positive");
    if (!(cfg.damping_up > 1) || !(cfg.damping_down > 0) || !(cfg.damping_down < 1))
        throw InputError("PnPConfig: need damping_up > 1 > damping_down > 0");
}

Eigen::VectorXd reprojection_residuals(const VertexSet& v, const Pose6DoF& pose, const CameraIntrinsics& k,
                                       const LandmarkSet2D& p)
{
    if (v.size() != p.rows())
        throw SizeMismatch("reprojection: " + std::to_string(v.size()) + " points vs " + std::to_string(p.rows()) +
                           " observations");
    const LandmarkSet2D projected = project_world(v, pose, k);
    const LandmarkSet2D diff = projected - p;
    return Eigen::Map<const Eigen::VectorXd>(diff.data(), diff.size());
}

double reprojection_rms(const VertexSet& v, const Pose6DoF& pose, const CameraIntrinsics& k, const LandmarkSet2D& p)
{
    if (v.size() == 0)
        return 0;
    return std::sqrt(sum_of_squares(v, pose, k, p) / static_cast<double>(v.size()));
}

Eigen::Matrix<double, Eigen::Dynamic, 6> reprojection_jacobian(const VertexSet& v, const Pose6DoF& pose,
                                                               const CameraIntrinsics& k)
{
    const VertexSet cam = world_to_camera(v, pose);
    Eigen::Matrix<double, Eigen::Dynamic, 6> jac(2 * v.size(), 6);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const Vector3<double> c = cam.points.row(i).transpose();
        if (!(c.z() > kMinDepth))
            throw BehindCamera(i);
        const double inv_z = 1.0 / c.z();
        Eigen::Matrix<double, 2, 3> d_pixel;
        d_pixel << k.fx * inv_z, 0, -k.fx * c.x() * inv_z * inv_z, 0, k.fy * inv_z, -k.fy * c.y() * inv_z * inv_z;
        // Rotated point before translation; d(q * Exp(w)^T)/dw at 0 is -skew(q).
        const Vector3<double> q = c - pose.translation.transpose();
        jac.block<2, 3>(2 * i, 0) = -d_pixel * skew(q);
        jac.block<2, 3>(2 * i, 3) = d_pixel;
    }
    return jac;
}

Pose6DoF apply_increment(const Pose6DoF& pose, const Eigen::Matrix<double, 6, 1>& delta)
{
    Pose6DoF out;
    out.rotation = pose.rotation * rotation_from_axis_angle<double>(delta.head<3>());
    out.translation = pose.translation + delta.tail<3>().transpose();
    return out;
}

Pose6DoF solve_pnp_dlt(const VertexSet& v, const LandmarkSet2D& p, const CameraIntrinsics& k)
{
    check_correspondences(v, p);
    validate(k);
    const Eigen::Index n = v.size();

    // Similarity normalization of both point sets for conditioning.
    const RowVector3<double> centroid = v.points.colwise().mean();
    const double spread = (v.points.rowwise() - centroid).rowwise().norm().mean();
    if (!(spread > 0))
        throw DegenerateConfiguration("pnp_dlt: all 3D points coincide");
    const double s3 = std::sqrt(3.0) / spread;

    Points2<double> img(n, 2);
    img.col(0) = (p.col(0).array() - k.cx) / k.fx;
    img.col(1) = (p.col(1).array() - k.cy) / k.fy;
    const Eigen::RowVector2d img_centroid = img.colwise().mean();
    const double img_spread = (img.rowwise() - img_centroid).rowwise().norm().mean();
    if (!(img_spread > 0))
        throw DegenerateConfiguration("pnp_dlt: all image points coincide");
    const double s2 = std::sqrt(2.0) / img_spread;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 12);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::RowVector4d x;
        x << s3 * (v.points.row(i) - centroid), 1.0;
        const double u = s2 * (img(i, 0) - img_centroid(0));
        const double w = s2 * (img(i, 1) - img_centroid(1));
        a.block<1, 4>(2 * i, 0) = x;
        a.block<1, 4>(2 * i, 8) = -u * x;
        a.block<1, 4>(2 * i + 1, 4) = x;
        a.block<1, 4>(2 * i + 1, 8) = -w * x;
    }

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    if (!(sigma(0) > 0) || sigma(10) / sigma(0) < 1e-10)
        throw DegenerateConfiguration("pnp_dlt: correspondences do not determine a unique pose");
    const Eigen::VectorXd h = svd.matrixV().col(11);

    // Undo the normalizations: P = T2^-1 * P' * T3.
    Eigen::Matrix<double, 3, 4> projection_n;
    projection_n << h.segment<4>(0).transpose(), h.segment<4>(4).transpose(), h.segment<4>(8).transpose();
    Eigen::Matrix4d t3 = Eigen::Matrix4d::Identity();
    t3.topLeftCorner<3, 3>() *= s3;
    t3.topRightCorner<3, 1>() = -s3 * centroid.transpose();
    Eigen::Matrix3d t2_inv = Eigen::Matrix3d::Identity();
    t2_inv.topLeftCorner<2, 2>() /= s2;
    t2_inv.topRightCorner<2, 1>() = img_centroid.transpose();
    Eigen::Matrix<double, 3, 4> projection = t2_inv * projection_n * t3;

    std::vector<double> depth(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        depth[static_cast<std::size_t>(i)] =
            projection.block<1, 3>(2, 0).dot(v.points.row(i)) + projection(2, 3);
    auto mid = depth.begin() + static_cast<std::ptrdiff_t>(depth.size() / 2);
    std::nth_element(depth.begin(), mid, depth.end());
    if (*mid < 0)
        projection = -projection;

    const Eigen::Matrix3d block = projection.leftCols<3>();
    const Eigen::JacobiSVD<Eigen::Matrix3d> polar(block, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d fix = Eigen::Matrix3d::Identity();
    fix(2, 2) = (polar.matrixU() * polar.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
    const Eigen::Matrix3d column_rotation = polar.matrixU() * fix * polar.matrixV().transpose();
    const double scale = polar.singularValues().sum() / 3.0;
    if (!(scale > 0))
        throw DegenerateConfiguration("pnp_dlt: zero-scale solution");

    Pose6DoF pose;
    pose.rotation = column_rotation.transpose();
    pose.translation = projection.col(3).transpose() / scale;
    return pose;
}

PnPResult solve_pnp(const VertexSet& v, const LandmarkSet2D& p, const CameraIntrinsics& k, const PnPConfig& cfg,
                    const std::optional<Pose6DoF>& init)
{
    validate(cfg);
    validate(k);
    check_correspondences(v, p);

    PnPResult result;
    result.pose = init ? *init : solve_pnp_dlt(v, p, k);
    validate(result.pose, 1e-6);

    Eigen::VectorXd residual = reprojection_residuals(v, result.pose, k, p);
    double cost = residual.squaredNorm();
    result.initial_cost = cost;
    double damping = cfg.initial_damping;

    while (result.iterations < cfg.max_iterations) {
        ++result.iterations;
        const Eigen::Matrix<double, Eigen::Dynamic, 6> jac = reprojection_jacobian(v, result.pose, k);
        const Eigen::Matrix<double, 6, 6> normal = jac.transpose() * jac;
        const Eigen::Matrix<double, 6, 1> gradient = jac.transpose() * residual;

        Eigen::Matrix<double, 6, 6> damped = normal;
        damped.diagonal() += damping * normal.diagonal().cwiseMax(1e-12);
        const Eigen::Matrix<double, 6, 1> step = damped.ldlt().solve(-gradient);
        const double step_limit = cfg.step_tolerance * (parameter_vector(result.pose).norm() + cfg.step_tolerance);

        const Pose6DoF candidate = apply_increment(result.pose, step);
        double candidate_cost = 0;
        Eigen::VectorXd candidate_residual;
        bool feasible = step.allFinite();
        if (feasible) {
            try {
                candidate_residual = reprojection_residuals(v, candidate, k, p);
                candidate_cost = candidate_residual.squaredNorm();
            } catch (const BehindCamera&) {
                feasible = false;
            }
        }

        if (feasible && candidate_cost < cost) {
            const double decrease = cost - candidate_cost;
            result.pose = candidate;
            residual = std::move(candidate_residual);
            cost = candidate_cost;
            damping = std::max(damping * cfg.damping_down, 1e-15);
            if (decrease <= cfg.cost_tolerance * (cost + decrease) || step.norm() <= step_limit || cost == 0) {
                result.converged = true;
                break;
            }
        } else {
            damping *= cfg.damping_up;
            if (step.allFinite() && step.norm() <= step_limit) {
                result.converged = true;
                break;
            }
            if (!std::isfinite(damping))
                break;
        }
    }

    result.final_cost = cost;
    result.rms_reprojection_error = std::sqrt(cost / static_cast<double>(v.size()));
    return result;
}

} // namespace pface
