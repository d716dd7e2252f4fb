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
#include "pface/topology.hpp"

/**
 * Mesh and landmark regression losses, each returned together with its
 * (sub)gradient with respect to the prediction.
 *
 *   vertex    (1/N)  sum_i |v_i - v*_i|_1
 *   edge      (1/3M) sum_e | |e| - |e*| |     over the 3M per-triangle edges
 *   landmark  (1/N)  sum_i |p_i - p*_i|_1
 *   total     vertex + w.edge * edge + w.landmark * landmark
 *
 * The subgradient of |x| at 0 is taken as 0.
 */
namespace pface {

struct LossWeights
{
    double edge = 0.25;
    double landmark = 2.0;
};

void validate(const LossWeights& w);

template <typename Gradient>
struct LossTerm
{
    double value = 0;
    Gradient gradient;
};

struct LossReport
{
    double l_vert = 0;
    double l_edge = 0;
    double l_land = 0;
    double l_total = 0;
    Points3<double> grad_vertices;
    Points2<double> grad_landmarks;
};

LossTerm<Points3<double>> vertex_loss(const VertexSet& pred, const VertexSet& gt);

/// Throws DegenerateEdge if a predicted edge is shorter than 1e-12.
LossTerm<Points3<double>> edge_loss(const VertexSet& pred, const VertexSet& gt, const EdgeTable& edges);

LossTerm<Points2<double>> landmark_loss(const LandmarkSet2D& pred, const LandmarkSet2D& gt);

LossReport total_loss(const VertexSet& pred_v, const VertexSet& gt_v, const LandmarkSet2D& pred_p,
                      const LandmarkSet2D& gt_p, const EdgeTable& edges, const LossWeights& weights = {});

} // namespace pface
