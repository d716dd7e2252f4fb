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
#include "pface/io.hpp"
#include "pface/topology.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

/**
 * Deterministic synthetic faces: a triangulated ellipsoidal cap roughly the
 * size of a face (0.16 x 0.22 x 0.10 m) with a smooth linear deformation
 * basis, posed in front of a pinhole camera and projected exactly.
 *
 * Every random draw comes from a std::mt19937_64 seeded from the caller's
 * seed, so (seed, config) fixes the output bit for bit.
 */
namespace pface {

/// Linear shape model: template + basis * coeffs, basis stored as (3N) x B
/// with each column a flattened row-major N x 3 displacement field.
struct ShapeModel
{
    VertexSet mean;
    Eigen::MatrixXd basis;

    Eigen::Index n_vertices() const { return mean.size(); }
    Eigen::Index n_basis() const { return basis.cols(); }

    /// World-frame shape for the given coefficients.
    VertexSet shape(const Eigen::VectorXd& coeffs) const;
};

struct FaceModel
{
    ShapeModel shape;
    FaceTopology topology;
};

/// Vertex counts per concentric ring (excluding the centre) used for n vertices.
std::vector<int> ring_sizes_for(Eigen::Index n_vertices);

/// Disk triangulation: a centre vertex plus closed rings of the given sizes.
/// Yields 2N - B - 2 triangles where B is the outer ring size.
Triangles ring_cap_triangles(const std::vector<int>& ring_sizes);

/// Requires n_vertices >= 9 and 0 <= n_basis <= 38. The basis is orthogonal
/// to translations, rotations and uniform scaling of the template.
FaceModel make_shape_model(Eigen::Index n_vertices, Eigen::Index n_basis, std::uint64_t seed);

struct SamplingRanges
{
    double depth_min = 0.3; ///< T_z, meters
    double depth_max = 0.9;
    double yaw_deg = 90; ///< symmetric bounds, uniform sampling
    double pitch_deg = 45;
    double roll_deg = 30;
    double coeff_sigma = 1.0; ///< shape coefficients ~ N(0, sigma^2), clipped at 3 sigma
    int image_width = 800;
    int image_height = 800;
    CameraIntrinsics intrinsics{1000, 1000, 400, 400};
    double min_point_depth = 0.05; ///< instances with a closer vertex are resampled
};

void validate(const SamplingRanges& r);

struct SyntheticInstance
{
    std::string id;
    VertexSet v_world;
    Pose6DoF pose;
    CameraIntrinsics intrinsics;
    LandmarkSet2D landmarks;
    Eigen::VectorXd coeffs;
};

/// Row-convention rotation from Z-Y-X Euler angles (radians): the column
/// form is Rz(roll) * Ry(yaw) * Rx(pitch).
Matrix3<double> rotation_from_euler_zyx(double yaw, double pitch, double roll);

SyntheticInstance sample_instance(const ShapeModel& model, const SamplingRanges& ranges, std::uint64_t seed,
                                  std::string id = "");

/// Exact landmarks plus i.i.d. N(0, sigma^2) noise on every coordinate.
LandmarkSet2D add_landmark_noise(const SyntheticInstance& inst, double sigma_px, std::uint64_t seed);

/// Seed of instance `index` in a dataset generated from `seed`.
std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t index);

struct DatasetConfig
{
    int n_instances = 200;
    std::uint64_t seed = 7;
    double sigma_px = 0; ///< noise added to the stored landmarks
    Eigen::Index n_vertices = 1220;
    Eigen::Index n_basis = 8;
    std::uint64_t model_seed = 1; ///< shape model; shared by train and test splits
    SamplingRanges ranges;
};

io::json to_json(const DatasetConfig& cfg);

struct SyntheticDataset
{
    DatasetConfig config;
    FaceModel model;
    std::vector<SyntheticInstance> instances;
};

SyntheticDataset generate_dataset(const DatasetConfig& cfg);

/**
 * Writes <id>.vertices.json, <id>.pose.json, <id>.intrinsics.json and
 * <id>.landmarks.json per instance, plus topology.json and manifest.json.
 */
void write_dataset(const SyntheticDataset& dataset, const std::filesystem::path& dir);

struct DatasetInstance
{
    std::string id;
    VertexSet vertices;
    Pose6DoF pose;
    CameraIntrinsics intrinsics;
    LandmarkSet2D landmarks;
};

struct Dataset
{
    std::optional<FaceTopology> topology;
    std::vector<DatasetInstance> instances; ///< sorted by id
    int image_width = 800;                  ///< from the manifest when present
    int image_height = 800;
};

/// Ids listed in dir/manifest.json, or every <id>.landmarks.json when there is no manifest.
std::vector<std::string> dataset_ids(const std::filesystem::path& dir);

/// Reads a directory written by write_dataset.
Dataset load_dataset(const std::filesystem::path& dir);

} // namespace pface
