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

#include "pface/error.hpp"

#include <Eigen/Core>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <string>

/**
 * Frames, rotations and the pinhole camera.
 *
 * All points are row vectors. A world-space point p is taken to camera space
 * by p * R + T, with R a 3x3 rotation and T a 1x3 translation. A point set is
 * an N x 3 matrix, so the whole set is transformed as V * R + T (broadcast
 * over rows). Intrinsics are applied after the perspective division.
 */
namespace pface {

enum class Frame { world, camera };

inline const char* to_string(Frame frame) { return frame == Frame::world ? "world" : "camera"; }

template <typename Scalar>
using Points3 = Eigen::Matrix<Scalar, Eigen::Dynamic, 3, Eigen::RowMajor>;

template <typename Scalar>
using Points2 = Eigen::Matrix<Scalar, Eigen::Dynamic, 2, Eigen::RowMajor>;

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using RowVector3 = Eigen::Matrix<Scalar, 1, 3>;

/// An N x 3 point set in meters, tagged with the frame it lives in.
template <typename Scalar>
struct BasicVertexSet
{
    Points3<Scalar> points;
    Frame frame = Frame::world;

    Eigen::Index size() const { return points.rows(); }
};

/// Rigid transform taking world rows to camera rows: p * rotation + translation.
template <typename Scalar>
struct BasicPose
{
    Matrix3<Scalar> rotation = Matrix3<Scalar>::Identity();
    RowVector3<Scalar> translation = RowVector3<Scalar>::Zero();
};

/// Pinhole intrinsics in pixels.
template <typename Scalar>
struct BasicIntrinsics
{
    Scalar fx = 1;
    Scalar fy = 1;
    Scalar cx = 0;
    Scalar cy = 0;
};

using VertexSet = BasicVertexSet<double>;
using LandmarkSet2D = Points2<double>;
using Pose6DoF = BasicPose<double>;
using CameraIntrinsics = BasicIntrinsics<double>;
using AxisAngle = Vector3<double>;

/// Depths at or below this are treated as behind the camera.
inline constexpr double kMinDepth = 1e-9;

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m)
{
    return m.allFinite();
}

template <typename Scalar>
void validate(const BasicIntrinsics<Scalar>& k)
{
    using std::isfinite;
    if (!(k.fx > 0) || !(k.fy > 0) || !isfinite(k.fx) || !isfinite(k.fy))
        throw InputError("intrinsics: focal lengths must be positive and finite");
    if (!isfinite(k.cx) || !isfinite(k.cy))
        throw InputError("intrinsics: principal point must be finite");
}

/// True if R is orthonormal with determinant +1, both within tol.
template <typename Scalar>
bool is_rotation(const Matrix3<Scalar>& r, Scalar tol)
{
    if (!r.allFinite())
        return false;
    const Scalar orth = (r.transpose() * r - Matrix3<Scalar>::Identity()).cwiseAbs().maxCoeff();
    using std::abs;
    return orth <= tol && abs(r.determinant() - Scalar(1)) <= tol;
}

template <typename Scalar>
void validate(const BasicPose<Scalar>& pose, Scalar tol = Scalar(1e-9))
{
    if (!is_rotation(pose.rotation, tol))
        throw NotARotation("pose rotation is not in SO(3)");
    if (!pose.translation.allFinite())
        throw InputError("pose translation must be finite");
}

/// Cross-product matrix: skew(a) * b == a.cross(b).
template <typename Scalar>
Matrix3<Scalar> skew(const Vector3<Scalar>& a)
{
    Matrix3<Scalar> k;
    k << Scalar(0), -a.z(), a.y(), a.z(), Scalar(0), -a.x(), -a.y(), a.x(), Scalar(0);
    return k;
}

/**
 * Rodrigues map for the row-vector convention.
 *
 * Returns R such that p * R rotates p by |omega| radians about omega/|omega|
 * (right-handed). R is the transpose of the usual column-convention matrix.
 */
template <typename Scalar>
Matrix3<Scalar> rotation_from_axis_angle(const Vector3<Scalar>& omega)
{
    using std::cos;
    using std::sin;
    const Scalar theta2 = omega.squaredNorm();
    Scalar a;
    Scalar b;
    if (theta2 < Scalar(1e-8)) {
        a = Scalar(1) - theta2 / Scalar(6);
        b = Scalar(0.5) - theta2 / Scalar(24);
    } else {
        using std::sqrt;
        const Scalar theta = sqrt(theta2);
        a = sin(theta) / theta;
        b = (Scalar(1) - cos(theta)) / theta2;
    }
    const Matrix3<Scalar> k = skew(omega);
    const Matrix3<Scalar> column_form = Matrix3<Scalar>::Identity() + a * k + b * k * k;
    return column_form.transpose();
}

/**
 * Inverse of rotation_from_axis_angle, returning |omega| in [0, pi].
 *
 * Near pi the axis is recovered from the symmetric part; at exactly pi the
 * sign is chosen so the largest-magnitude component is positive.
 * Throws NotARotation if R is not in SO(3) within 1e-6.
 */
template <typename Scalar>
Vector3<Scalar> axis_angle_from_rotation(const Matrix3<Scalar>& r)
{
    using std::abs;
    using std::atan2;
    using std::sqrt;
    if (!is_rotation(r, Scalar(1e-6)))
        throw NotARotation("axis_angle_from_rotation: matrix is not in SO(3)");

    const Matrix3<Scalar> rc = r.transpose();
    const Scalar c = std::clamp((rc.trace() - Scalar(1)) / Scalar(2), Scalar(-1), Scalar(1));
    const Vector3<Scalar> sin_axis(
        (rc(2, 1) - rc(1, 2)) / Scalar(2), (rc(0, 2) - rc(2, 0)) / Scalar(2), (rc(1, 0) - rc(0, 1)) / Scalar(2));
    const Scalar s = sin_axis.norm();
    const Scalar theta = atan2(s, c);

    if (c > Scalar(-0.99)) {
        if (theta < Scalar(1e-8))
            return sin_axis;
        return sin_axis * (theta / s);
    }

    // (R + R^T)/2 - cos(theta) I = (1 - cos(theta)) a a^T
    const Matrix3<Scalar> outer =
        (rc + rc.transpose()) / Scalar(2) - c * Matrix3<Scalar>::Identity();
    const Scalar one_minus_c = Scalar(1) - c;
    Eigen::Index k = 0;
    outer.diagonal().maxCoeff(&k);
    Vector3<Scalar> axis;
    const Scalar ak = sqrt(std::max(outer(k, k) / one_minus_c, Scalar(0)));
    for (Eigen::Index i = 0; i < 3; ++i)
        axis(i) = (i == k) ? ak : outer(i, k) / (one_minus_c * ak);
    axis.normalize();

    const Scalar agreement = axis.dot(sin_axis);
    if (abs(agreement) > Scalar(1e-12)) {
        if (agreement < Scalar(0))
            axis = -axis;
    } else {
        Eigen::Index largest = 0;
        axis.cwiseAbs().maxCoeff(&largest);
        if (axis(largest) < Scalar(0))
            axis = -axis;
    }
    return axis * theta;
}

/// Angle in radians of the relative rotation between a and b.
template <typename Scalar>
Scalar geodesic_distance(const Matrix3<Scalar>& a, const Matrix3<Scalar>& b)
{
    using std::atan2;
    const Matrix3<Scalar> rel = a.transpose() * b;
    const Scalar c = (rel.trace() - Scalar(1)) / Scalar(2);
    const Vector3<Scalar> sin_axis(
        (rel(2, 1) - rel(1, 2)) / Scalar(2), (rel(0, 2) - rel(2, 0)) / Scalar(2), (rel(1, 0) - rel(0, 1)) / Scalar(2));
    return atan2(sin_axis.norm(), c);
}

/// Applies pose to each row: v * R + T. The input must be in the world frame.
template <typename Scalar>
BasicVertexSet<Scalar> world_to_camera(const BasicVertexSet<Scalar>& v, const BasicPose<Scalar>& pose)
{
    if (v.frame != Frame::world)
        throw FrameMismatch(std::string("world_to_camera: expected world frame, got ") + to_string(v.frame));
    BasicVertexSet<Scalar> out;
    out.frame = Frame::camera;
    out.points = (v.points * pose.rotation).rowwise() + pose.translation;
    return out;
}

/// Pinhole projection of camera-frame points: (fx x/z + cx, fy y/z + cy).
template <typename Scalar>
Points2<Scalar> perspective_project(const BasicVertexSet<Scalar>& v, const BasicIntrinsics<Scalar>& k)
{
    if (v.frame != Frame::camera)
        throw FrameMismatch(std::string("perspective_project: expected camera frame, got ") + to_string(v.frame));
    validate(k);
    Points2<Scalar> out(v.size(), 2);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const Scalar z = v.points(i, 2);
        if (!(z > Scalar(kMinDepth)))
            throw BehindCamera(i);
        out(i, 0) = k.fx * v.points(i, 0) / z + k.cx;
        out(i, 1) = k.fy * v.points(i, 1) / z + k.cy;
    }
    return out;
}

template <typename Scalar>
Points2<Scalar> project_world(
    const BasicVertexSet<Scalar>& v, const BasicPose<Scalar>& pose, const BasicIntrinsics<Scalar>& k)
{
    return perspective_project(world_to_camera(v, pose), k);
}

/// Wraps a bare N x 3 matrix as a world-frame vertex set.
template <typename Derived>
BasicVertexSet<typename Derived::Scalar> world_points(const Eigen::MatrixBase<Derived>& points)
{
    return {points, Frame::world};
}

} // namespace pface
