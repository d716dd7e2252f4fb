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

#include "pface/losses.hpp"

#include <cmath>

namespace pface {

namespace {

template <typename Derived>
auto sign(const Eigen::MatrixBase<Derived>& m)
{
    return m.unaryExpr([](double x) { return static_cast<double>((x > 0) - (x < 0)); });
}

// Mean over rows of the per-row L1 distance.
template <typename Matrix>
LossTerm<Matrix> mean_l1(const Matrix& pred, const Matrix& gt)
{
    const auto n = static_cast<double>(pred.rows());
    const Matrix diff = pred - gt;
    LossTerm<Matrix> term;
    if (pred.rows() == 0) {
        term.gradient = Matrix::Zero(0, pred.cols());
        return term;
    }
    term.value = diff.cwiseAbs().sum() / n;
    term.gradient = sign(diff) / n;
    return term;
}

} // namespace

void validate(const LossWeights& w)
{
    if (!(w.edge >= 0) || !(w.landmark >= 0) || !std::isfinite(w.edge) || !std::isfinite(w.landmark))
        throw InputError("loss weights must be finite and non-negative");
}

LossTerm<Points3<double>> vertex_loss(const VertexSet& pred, const VertexSet& gt)
{
    if (pred.size() != gt.size())
        throw SizeMismatch("vertex_loss: " + std::to_string(pred.size()) + " vs " + std::to_string(gt.size()));
    if (pred.frame != gt.frame)
        throw FrameMismatch("vertex_loss: prediction and ground truth are in different frames");
    return mean_l1(pred.points, gt.points);
}

LossTerm<Points3<double>> edge_loss(const VertexSet& pred, const VertexSet& gt, const EdgeTable& edges)
{
    if (pred.size() != gt.size())
        throw SizeMismatch("edge_loss: " + std::to_string(pred.size()) + " vs " + std::to_string(gt.size()));
    const Eigen::VectorXd target = edge_lengths(gt, edges);
    const Eigen::VectorXd length = edge_lengths(pred, edges);
    const auto count = static_cast<double>(edges.size());

    LossTerm<Points3<double>> term;
    term.gradient = Points3<double>::Zero(pred.size(), 3);
    for (Eigen::Index e = 0; e < edges.size(); ++e) {
        if (length(e) < 1e-12)
            throw DegenerateEdge(e);
        const double diff = length(e) - target(e);
        term.value += std::abs(diff);
        const double s = static_cast<double>((diff > 0) - (diff < 0));
        if (s == 0)
            continue;
        const int a = edges.pairs(e, 0);
        const int b = edges.pairs(e, 1);
        const RowVector3<double> dir = (pred.points.row(a) - pred.points.row(b)) / length(e);
        term.gradient.row(a) += (s / count) * dir;
        term.gradient.row(b) -= (s / count) * dir;
    }
    term.value /= count;
    return term;
}

LossTerm<Points2<double>> landmark_loss(const LandmarkSet2D& pred, const LandmarkSet2D& gt)
{
    if (pred.rows() != gt.rows())
        throw SizeMismatch("landmark_loss: " + std::to_string(pred.rows()) + " vs " + std::to_string(gt.rows()));
    return mean_l1(pred, gt);
}

LossReport total_loss(const VertexSet& pred_v, const VertexSet& gt_v, const LandmarkSet2D& pred_p,
                      const LandmarkSet2D& gt_p, const EdgeTable& edges, const LossWeights& weights)
{
    validate(weights);
    auto vert = vertex_loss(pred_v, gt_v);
    auto edge = edge_loss(pred_v, gt_v, edges);
    auto land = landmark_loss(pred_p, gt_p);

    LossReport report;
    report.l_vert = vert.value;
    report.l_edge = edge.value;
    report.l_land = land.value;
    report.l_total = vert.value + weights.edge * edge.value + weights.landmark * land.value;
    report.grad_vertices = vert.gradient + weights.edge * edge.gradient;
    report.grad_landmarks = weights.landmark * land.gradient;
    return report;
}

} // namespace pface
