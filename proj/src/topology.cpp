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

#include "pface/topology.hpp"

#include "pface/io.hpp"

#include <unordered_set>

namespace pface {

FaceTopology::FaceTopology(Eigen::Index n_vertices, Triangles triangles, std::vector<int> landmark68)
    : n_vertices_(n_vertices), triangles_(std::move(triangles)), landmark68_(std::move(landmark68))
{
    if (n_vertices_ < 3)
        throw TopologyInvalid("need at least 3 vertices", n_vertices_);
    if (triangles_.rows() == 0)
        throw TopologyInvalid("no triangles", 0);
    for (Eigen::Index t = 0; t < triangles_.rows(); ++t) {
        for (int k = 0; k < 3; ++k)
            if (triangles_(t, k) < 0 || triangles_(t, k) >= n_vertices_)
                throw TopologyInvalid("triangle vertex index out of range", t);
        if (triangles_(t, 0) == triangles_(t, 1) || triangles_(t, 1) == triangles_(t, 2) ||
            triangles_(t, 0) == triangles_(t, 2))
            throw TopologyInvalid("degenerate triangle", t);
    }
    if (!landmark68_.empty() && landmark68_.size() != kLandmarkCount)
        throw TopologyInvalid("landmark table must hold 68 indices", static_cast<std::ptrdiff_t>(landmark68_.size()));
    std::unordered_set<int> seen;
    for (std::size_t i = 0; i < landmark68_.size(); ++i) {
        if (landmark68_[i] < 0 || landmark68_[i] >= n_vertices_)
            throw TopologyInvalid("landmark index out of range", static_cast<std::ptrdiff_t>(i));
        if (!seen.insert(landmark68_[i]).second)
            throw TopologyInvalid("duplicate landmark index", static_cast<std::ptrdiff_t>(i));
    }
    edges_ = make_edge_table(triangles_, n_vertices_);
}

EdgeTable make_edge_table(const Triangles& triangles, Eigen::Index n_vertices)
{
    EdgeTable table;
    table.n_vertices = n_vertices;
    table.pairs.resize(3 * triangles.rows(), 2);
    for (Eigen::Index t = 0; t < triangles.rows(); ++t) {
        for (int k = 0; k < 3; ++k) {
            const int a = triangles(t, k);
            const int b = triangles(t, (k + 1) % 3);
            table.pairs(3 * t + k, 0) = std::min(a, b);
            table.pairs(3 * t + k, 1) = std::max(a, b);
        }
    }
    return table;
}

FaceTopology load_topology(const std::filesystem::path& path)
{
    const io::json j = io::read_json(path);
    try {
        if (!j.is_object() || !j.contains("n_vertices") || !j.contains("triangles"))
            throw ParseError("expected an object with n_vertices and triangles");
        if (!j.at("n_vertices").is_number_integer())
            throw ParseError("n_vertices must be an integer");
        const auto n = j.at("n_vertices").get<long long>();
        const io::json& tris = j.at("triangles");
        if (!tris.is_array())
            throw ParseError("triangles must be an array");
        Triangles triangles(static_cast<Eigen::Index>(tris.size()), 3);
        for (std::size_t t = 0; t < tris.size(); ++t) {
            if (!tris[t].is_array() || tris[t].size() != 3)
                throw ParseError("triangle " + std::to_string(t) + " must have 3 indices");
            for (int k = 0; k < 3; ++k) {
                if (!tris[t][k].is_number_integer())
                    throw ParseError("triangle " + std::to_string(t) + " has a non-integer index");
                triangles(static_cast<Eigen::Index>(t), k) = tris[t][k].get<int>();
            }
        }
        std::vector<int> landmarks;
        if (j.contains("landmark68")) {
            const io::json& lm = j.at("landmark68");
            if (!lm.is_array())
                throw ParseError("landmark68 must be an array");
            for (const auto& x : lm) {
                if (!x.is_number_integer())
                    throw ParseError("landmark68 entries must be integers");
                landmarks.push_back(x.get<int>());
            }
        }
        return FaceTopology(static_cast<Eigen::Index>(n), std::move(triangles), std::move(landmarks));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const io::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void save_topology(const std::filesystem::path& path, const FaceTopology& topo)
{
    std::string out = "{\n  \"n_vertices\": " + std::to_string(topo.n_vertices()) + ",\n  \"triangles\": [";
    const Triangles& tris = topo.triangles();
    for (Eigen::Index t = 0; t < tris.rows(); ++t) {
        out += t ? ",\n    [" : "\n    [";
        out += std::to_string(tris(t, 0)) + ", " + std::to_string(tris(t, 1)) + ", " + std::to_string(tris(t, 2)) + "]";
    }
    out += "\n  ],\n  \"landmark68\": [";
    for (std::size_t i = 0; i < topo.landmark68().size(); ++i)
        out += (i ? ", " : "") + std::to_string(topo.landmark68()[i]);
    out += "]\n}\n";
    io::write_text(path, out);
}

Eigen::VectorXd edge_lengths(const Points3<double>& points, const EdgeTable& edges)
{
    if (points.rows() != edges.n_vertices)
        throw SizeMismatch("edge_lengths: " + std::to_string(points.rows()) + " vertices for a topology of " +
                           std::to_string(edges.n_vertices));
    Eigen::VectorXd lengths(edges.size());
    for (Eigen::Index e = 0; e < edges.size(); ++e)
        lengths(e) = (points.row(edges.pairs(e, 0)) - points.row(edges.pairs(e, 1))).norm();
    return lengths;
}

void export_obj(const VertexSet& v, const FaceTopology& topo, const std::filesystem::path& path)
{
    if (v.size() != topo.n_vertices())
        throw SizeMismatch("export_obj: " + std::to_string(v.size()) + " vertices for a topology of " +
                           std::to_string(topo.n_vertices()));
    std::string out;
    out.reserve(static_cast<std::size_t>(v.size() * 40 + topo.n_triangles() * 20));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out += "v " + io::format_9g(v.points(i, 0)) + " " + io::format_9g(v.points(i, 1)) + " " +
               io::format_9g(v.points(i, 2)) + "\n";
    const Triangles& tris = topo.triangles();
    for (Eigen::Index t = 0; t < tris.rows(); ++t)
        out += "f " + std::to_string(tris(t, 0) + 1) + " " + std::to_string(tris(t, 1) + 1) + " " +
               std::to_string(tris(t, 2) + 1) + "\n";
    io::write_text(path, out);
}

} // namespace pface
