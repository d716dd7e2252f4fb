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
#include <vector>

namespace pface {

using Triangles = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

/**
 * Per-triangle edge list: row 3t+k joins t[k] and t[(k+1) mod 3], stored with
 * the smaller index first. Edges shared by two triangles appear twice.
 */
struct EdgeTable
{
    Eigen::Matrix<int, Eigen::Dynamic, 2, Eigen::RowMajor> pairs;
    Eigen::Index n_vertices = 0;

    Eigen::Index size() const { return pairs.rows(); }
};

/**
 * Fixed mesh connectivity plus the 68-landmark index table.
 *
 * Construction validates every invariant; a FaceTopology that exists is valid.
 * The landmark table is either empty or holds exactly 68 distinct indices.
 */
class FaceTopology
{
public:
    static constexpr int kLandmarkCount = 68;

    FaceTopology(Eigen::Index n_vertices, Triangles triangles, std::vector<int> landmark68 = {});

    Eigen::Index n_vertices() const { return n_vertices_; }
    Eigen::Index n_triangles() const { return triangles_.rows(); }
    const Triangles& triangles() const { return triangles_; }
    const std::vector<int>& landmark68() const { return landmark68_; }
    const EdgeTable& edges() const { return edges_; }

private:
    Eigen::Index n_vertices_;
    Triangles triangles_;
    std::vector<int> landmark68_;
    EdgeTable edges_;
};

EdgeTable make_edge_table(const Triangles& triangles, Eigen::Index n_vertices);

/// Reads {"n_vertices": N, "triangles": [[i,j,k], ...], "landmark68": [...]}.
FaceTopology load_topology(const std::filesystem::path& path);
void save_topology(const std::filesystem::path& path, const FaceTopology& topo);

/// Euclidean length of every edge entry, in table order.
Eigen::VectorXd edge_lengths(const Points3<double>& points, const EdgeTable& edges);

inline Eigen::VectorXd edge_lengths(const VertexSet& v, const EdgeTable& edges)
{
    return edge_lengths(v.points, edges);
}

/// Wavefront OBJ: one "v" line per vertex (9 significant digits), 1-based faces.
void export_obj(const VertexSet& v, const FaceTopology& topo, const std::filesystem::path& path);

/// Gathers the landmark rows, in table order.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime, Eigen::RowMajor>
select_landmarks(const Eigen::MatrixBase<Derived>& rows, const FaceTopology& topo)
{
    if (rows.rows() != topo.n_vertices())
        throw SizeMismatch("select_landmarks: " + std::to_string(rows.rows()) + " rows for a topology of " +
                           std::to_string(topo.n_vertices()) + " vertices");
    const auto& idx = topo.landmark68();
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime, Eigen::RowMajor> out(
        static_cast<Eigen::Index>(idx.size()), rows.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = rows.row(idx[i]);
    return out;
}

inline VertexSet select_landmarks(const VertexSet& v, const FaceTopology& topo)
{
    return {select_landmarks(v.points, topo), v.frame};
}

} // namespace pface
