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

#include "pface/metrics.hpp"

#include "pface/io.hpp"

namespace pface {

namespace {

constexpr std::string_view kPoseSuffix = ".pose.json";

Points3<double> transform(const Points3<double>& v, const Pose6DoF& pose)
{
    return (v * pose.rotation).rowwise() + pose.translation;
}

} // namespace

TransformedSets transformed_sets(const VertexSet& v_gt, const VertexSet& v_pred, const Pose6DoF& pose_gt,
                                 const Pose6DoF& pose_pred)
{
    if (v_gt.size() != v_pred.size())
        throw SizeMismatch("transformed_sets: " + std::to_string(v_gt.size()) + " vs " +
                           std::to_string(v_pred.size()) + " vertices");
    if (v_gt.frame != Frame::world || v_pred.frame != Frame::world)
        throw FrameMismatch("transformed_sets: vertex sets must be in the world frame");
    return {transform(v_gt.points, pose_gt), transform(v_pred.points, pose_pred), transform(v_gt.points, pose_pred),
            transform(v_pred.points, pose_gt)};
}

double mean_vertex_distance(const Points3<double>& a, const Points3<double>& b)
{
    if (a.rows() == 0)
        return 0;
    return (a - b).rowwise().norm().mean();
}

InstanceError instance_error(const VertexSet& v_gt, const VertexSet& v_pred, const Pose6DoF& pose_gt,
                             const Pose6DoF& pose_pred)
{
    const TransformedSets sets = transformed_sets(v_gt, v_pred, pose_gt, pose_pred);
    InstanceError err;
    err.d12 = mean_vertex_distance(sets.v1, sets.v2);
    err.d13 = mean_vertex_distance(sets.v1, sets.v3);
    err.d14 = mean_vertex_distance(sets.v1, sets.v4);
    err.l_error_mm = 1000.0 * (err.d12 + err.d13 + 10.0 * err.d14);
    return err;
}

ScoreReport score_submission(const InstanceSet& gt, const InstanceSet& pred)
{
    for (const auto& [id, mesh] : pred)
        if (!gt.count(id))
            throw InputError("prediction for unknown instance: " + id);

    ScoreReport report;
    for (const auto& [id, truth] : gt) {
        const auto it = pred.find(id);
        if (it == pred.end())
            throw MissingInstance(id);
        if (it->second.vertices.size() != truth.vertices.size())
            throw SizeMismatch("instance " + id + ": " + std::to_string(it->second.vertices.size()) + " vs " +
                               std::to_string(truth.vertices.size()) + " vertices");
        report.instances.emplace_back(id, instance_error(truth.vertices, it->second.vertices, truth.pose,
                                                         it->second.pose));
    }
    if (report.instances.empty())
        return report;
    for (const auto& [id, err] : report.instances) {
        report.mean_d12_mm += 1000.0 * err.d12;
        report.mean_d13_mm += 1000.0 * err.d13;
        report.mean_d14x10_mm += 10000.0 * err.d14;
        report.mean_l_error_mm += err.l_error_mm;
    }
    const auto n = static_cast<double>(report.instances.size());
    report.mean_d12_mm /= n;
    report.mean_d13_mm /= n;
    report.mean_d14x10_mm /= n;
    report.mean_l_error_mm /= n;
    return report;
}

std::string report_csv(const ScoreReport& report)
{
    std::string out = "id,d12_mm,d13_mm,10*d14_mm,l_error_mm\n";
    for (const auto& [id, err] : report.instances)
        out += id + "," + io::format_9g(1000.0 * err.d12) + "," + io::format_9g(1000.0 * err.d13) + "," +
               io::format_9g(10000.0 * err.d14) + "," + io::format_9g(err.l_error_mm) + "\n";
    out += "mean," + io::format_9g(report.mean_d12_mm) + "," + io::format_9g(report.mean_d13_mm) + "," +
           io::format_9g(report.mean_d14x10_mm) + "," + io::format_9g(report.mean_l_error_mm) + "\n";
    return out;
}

InstanceSet load_instances(const std::filesystem::path& dir)
{
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        throw IoError("not a directory: " + dir.string());
    InstanceSet set;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() <= kPoseSuffix.size() || !name.ends_with(kPoseSuffix))
            continue;
        const std::string id = name.substr(0, name.size() - kPoseSuffix.size());
        fs::path vertices = dir / (id + ".vertices.json");
        if (!fs::exists(vertices))
            vertices = dir / (id + ".vertices.csv");
        if (!fs::exists(vertices))
            throw MissingInstance(id + " (no vertex file in " + dir.string() + ")");
        set.emplace(id, PosedMesh{io::load_vertices(vertices), io::load_pose(entry.path())});
    }
    return set;
}

void save_instance(const std::filesystem::path& dir, const std::string& id, const PosedMesh& mesh)
{
    io::save_vertices(dir / (id + ".vertices.json"), mesh.vertices);
    io::save_pose(dir / (id + ".pose.json"), mesh.pose);
}

} // namespace pface
