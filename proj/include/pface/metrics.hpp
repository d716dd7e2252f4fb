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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

/**
 * Camera-space reconstruction error.
 *
 * Ground truth and prediction are each a world-space mesh plus a pose. Four
 * camera-space sets are compared:
 *
 *   V1 = Vgt   Rgt   + Tgt        V2 = Vpred Rpred + Tpred
 *   V3 = Vgt   Rpred + Tpred      V4 = Vpred Rgt   + Tgt
 *
 *   L = 1000 * (d(V1,V2) + d(V1,V3) + 10 d(V1,V4))   millimeters
 *
 * where d is the mean per-vertex Euclidean distance (meters). V3 isolates the
 * pose error and V4 the shape error.
 */
namespace pface {

struct TransformedSets
{
    Points3<double> v1;
    Points3<double> v2;
    Points3<double> v3;
    Points3<double> v4;
};

struct InstanceError
{
    double d12 = 0; ///< meters
    double d13 = 0;
    double d14 = 0;
    double l_error_mm = 0;
};

/// A mesh with its world-to-camera pose: one ground-truth or predicted instance.
struct PosedMesh
{
    VertexSet vertices;
    Pose6DoF pose;
};

using InstanceSet = std::map<std::string, PosedMesh>;

struct ScoreReport
{
    std::vector<std::pair<std::string, InstanceError>> instances; ///< sorted by id
    double mean_d12_mm = 0;
    double mean_d13_mm = 0;
    double mean_d14x10_mm = 0;
    double mean_l_error_mm = 0;
};

TransformedSets transformed_sets(const VertexSet& v_gt, const VertexSet& v_pred, const Pose6DoF& pose_gt,
                                 const Pose6DoF& pose_pred);

/// Reduction used for each pair of sets: mean over rows of the row distance.
double mean_vertex_distance(const Points3<double>& a, const Points3<double>& b);

InstanceError instance_error(const VertexSet& v_gt, const VertexSet& v_pred, const Pose6DoF& pose_gt,
                             const Pose6DoF& pose_pred);

/**
 * Scores every ground-truth instance. Throws MissingInstance for a
 * ground-truth id without a prediction, SizeMismatch for a vertex-count
 * mismatch and InputError for a prediction with no ground truth.
 */
ScoreReport score_submission(const InstanceSet& gt, const InstanceSet& pred);

/// CSV with columns id,d12_mm,d13_mm,10*d14_mm,l_error_mm and a final "mean" row.
std::string report_csv(const ScoreReport& report);

/// Loads every <id>.pose.json with its <id>.vertices.(json|csv) from dir.
InstanceSet load_instances(const std::filesystem::path& dir);

void save_instance(const std::filesystem::path& dir, const std::string& id, const PosedMesh& mesh);

} // namespace pface
