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

#include "pface/gradcheck.hpp"

#include "pface/losses.hpp"
#include "pface/pnp.hpp"
#include "pface/regressor.hpp"
#include "pface/synth.hpp"

#include <random>

namespace pface {

namespace {

// Smallest kink margin accepted for the L1 terms, well above the FD step.
constexpr double kMargin = 1e-4;

struct LossFixture
{
    FaceModel model;
    VertexSet gt;
    VertexSet pred;
    LandmarkSet2D gt_p;
    LandmarkSet2D pred_p;
};

double away_from_zero(std::mt19937_64& rng, double scale)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double g = gauss(rng);
    return (g < 0 ? -1.0 : 1.0) * scale * (0.2 + std::abs(g));
}

// Cap mesh with a random shape, and a prediction displaced from it by a
// rigid motion plus per-coordinate offsets that stay clear of the L1 kinks.
LossFixture make_loss_fixture(const GradcheckOptions& opt)
{
    LossFixture fx{make_shape_model(opt.n_points, 4, opt.seed), {}, {}, {}, {}};
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const EdgeTable& edges = fx.model.topology.edges();
    for (;;) {
        Eigen::VectorXd coeffs(fx.model.shape.n_basis());
        for (Eigen::Index i = 0; i < coeffs.size(); ++i)
            coeffs(i) = gauss(rng);
        fx.gt = fx.model.shape.shape(coeffs);
        const Matrix3<double> q = rotation_from_axis_angle<double>(AxisAngle(gauss(rng), gauss(rng), gauss(rng)));
        const RowVector3<double> t(gauss(rng), gauss(rng), gauss(rng));
        fx.pred.frame = Frame::world;
        fx.pred.points = (fx.gt.points * q).rowwise() + 0.01 * t;
        for (Eigen::Index r = 0; r < fx.pred.points.rows(); ++r)
            for (int c = 0; c < 3; ++c)
                fx.pred.points(r, c) += away_from_zero(rng, 0.002);

        fx.gt_p.resize(opt.n_points, 2);
        fx.pred_p.resize(opt.n_points, 2);
        for (Eigen::Index r = 0; r < opt.n_points; ++r)
            for (int c = 0; c < 2; ++c) {
                fx.gt_p(r, c) = 400.0 + 150.0 * gauss(rng);
                fx.pred_p(r, c) = fx.gt_p(r, c) + away_from_zero(rng, 3.0);
            }

        const Eigen::VectorXd gap = edge_lengths(fx.pred, edges) - edge_lengths(fx.gt, edges);
        if (gap.cwiseAbs().minCoeff() > kMargin && (fx.pred.points - fx.gt.points).cwiseAbs().minCoeff() > kMargin)
            return fx;
    }
}

Eigen::VectorXd flat(const Points3<double>& m)
{
    return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Eigen::VectorXd flat(const Points2<double>& m)
{
    return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

VertexSet as_vertices(const Eigen::VectorXd& x)
{
    return {Eigen::Map<const Points3<double>>(x.data(), x.size() / 3, 3), Frame::world};
}

LandmarkSet2D as_landmarks(const Eigen::VectorXd& x)
{
    return Eigen::Map<const Points2<double>>(x.data(), x.size() / 2, 2);
}

GradcheckResult make_result(std::string name, const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numeric,
                            double tolerance)
{
    return {std::move(name), relative_error(analytic, numeric), tolerance, numeric.size()};
}

// Parameters as one flat vector, in block order.
Eigen::VectorXd pack(const RegressorParameters& p)
{
    Eigen::VectorXd out(p.size());
    Eigen::Index at = 0;
    for_each_block(
        [&](const auto& block) {
            for (Eigen::Index r = 0; r < block.rows(); ++r)
                for (Eigen::Index c = 0; c < block.cols(); ++c)
                    out(at++) = block(r, c);
        },
        p);
    return out;
}

void unpack(const Eigen::VectorXd& x, RegressorParameters& p)
{
    Eigen::Index at = 0;
    for_each_block(
        [&](auto& block) {
            for (Eigen::Index r = 0; r < block.rows(); ++r)
                for (Eigen::Index c = 0; c < block.cols(); ++c)
                    block(r, c) = x(at++);
        },
        p);
}

struct RegressorFixture
{
    SyntheticDataset data;
    std::vector<TrainingExample> examples;
    RegressorModel model;
};

RegressorFixture make_regressor_fixture(const GradcheckOptions& opt)
{
    DatasetConfig cfg;
    cfg.n_instances = 3;
    cfg.seed = opt.seed;
    cfg.n_vertices = opt.n_points;
    cfg.n_basis = 4;
    cfg.model_seed = opt.seed + 1;
    RegressorFixture fx{generate_dataset(cfg), {}, {}};

    Dataset loaded;
    loaded.topology = fx.data.model.topology;
    for (const auto& inst : fx.data.instances)
        loaded.instances.push_back({inst.id, inst.v_world, inst.pose, inst.intrinsics, inst.landmarks});
    const FeatureEncoding enc = make_feature_encoding(opt.n_points, 8, 800, 800);
    fx.examples = make_examples(loaded, enc, 1.0, opt.seed);
    fx.model = init_regressor(fx.examples, enc, 12, opt.seed);

    // Move away from the near-zero initial heads so every block carries signal.
    std::mt19937_64 rng(opt.seed + 2);
    std::normal_distribution<double> gauss(0.0, 0.3);
    for_each_block(
        [&](auto& block) {
            for (Eigen::Index r = 0; r < block.rows(); ++r)
                for (Eigen::Index c = 0; c < block.cols(); ++c)
                    block(r, c) += gauss(rng);
        },
        fx.model.params);
    return fx;
}

} // namespace

Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                 double h)
{
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe(i) = x(i) + h;
        const double up = f(probe);
        probe(i) = x(i) - h;
        const double down = f(probe);
        probe(i) = x(i);
        g(i) = (up - down) / (2 * h);
    }
    return g;
}

Eigen::MatrixXd numeric_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& x, double h)
{
    Eigen::VectorXd probe = x;
    Eigen::MatrixXd jac;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe(i) = x(i) + h;
        const Eigen::VectorXd up = f(probe);
        probe(i) = x(i) - h;
        const Eigen::VectorXd down = f(probe);
        probe(i) = x(i);
        if (i == 0)
            jac.resize(up.size(), x.size());
        jac.col(i) = (up - down) / (2 * h);
    }
    return jac;
}

double relative_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numeric)
{
    if (analytic.rows() != numeric.rows() || analytic.cols() != numeric.cols())
        throw SizeMismatch("relative_error: shapes differ");
    const double scale = numeric.cwiseAbs().maxCoeff();
    const double diff = (analytic - numeric).cwiseAbs().maxCoeff();
    return scale > 0 ? diff / scale : diff;
}

GradcheckResult check_vertex_loss(const GradcheckOptions& opt)
{
    const LossFixture fx = make_loss_fixture(opt);
    const auto f = [&](const Eigen::VectorXd& x) { return vertex_loss(as_vertices(x), fx.gt).value; };
    return make_result("vertex_loss", flat(vertex_loss(fx.pred, fx.gt).gradient),
                       numeric_gradient(f, flat(fx.pred.points), opt.step), opt.loss_tolerance);
}

GradcheckResult check_edge_loss(const GradcheckOptions& opt)
{
    const LossFixture fx = make_loss_fixture(opt);
    const EdgeTable& edges = fx.model.topology.edges();
    const auto f = [&](const Eigen::VectorXd& x) { return edge_loss(as_vertices(x), fx.gt, edges).value; };
    return make_result("edge_loss", flat(edge_loss(fx.pred, fx.gt, edges).gradient),
                       numeric_gradient(f, flat(fx.pred.points), opt.step), opt.loss_tolerance);
}

GradcheckResult check_landmark_loss(const GradcheckOptions& opt)
{
    const LossFixture fx = make_loss_fixture(opt);
    const auto f = [&](const Eigen::VectorXd& x) { return landmark_loss(as_landmarks(x), fx.gt_p).value; };
    return make_result("landmark_loss", flat(landmark_loss(fx.pred_p, fx.gt_p).gradient),
                       numeric_gradient(f, flat(fx.pred_p), opt.step), opt.loss_tolerance);
}

GradcheckResult check_total_loss(const GradcheckOptions& opt)
{
    const LossFixture fx = make_loss_fixture(opt);
    const EdgeTable& edges = fx.model.topology.edges();
    const Eigen::Index nv = 3 * opt.n_points;
    const auto f = [&](const Eigen::VectorXd& x) {
        return total_loss(as_vertices(x.head(nv)), fx.gt, as_landmarks(x.tail(x.size() - nv)), fx.gt_p, edges)
            .l_total;
    };
    Eigen::VectorXd x(nv + 2 * opt.n_points);
    x << flat(fx.pred.points), flat(fx.pred_p);
    const LossReport report = total_loss(fx.pred, fx.gt, fx.pred_p, fx.gt_p, edges);
    Eigen::VectorXd analytic(x.size());
    analytic << flat(report.grad_vertices), flat(report.grad_landmarks);
    return make_result("total_loss", analytic, numeric_gradient(f, x, opt.step), opt.loss_tolerance);
}

GradcheckResult check_pnp_jacobian(const GradcheckOptions& opt)
{
    const FaceModel model = make_shape_model(opt.n_points, 4, opt.seed);
    const SyntheticInstance inst = sample_instance(model.shape, SamplingRanges{}, opt.seed);
    const auto f = [&](const Eigen::VectorXd& delta) {
        return reprojection_residuals(inst.v_world, apply_increment(inst.pose, delta), inst.intrinsics,
                                      inst.landmarks);
    };
    const Eigen::MatrixXd analytic = reprojection_jacobian(inst.v_world, inst.pose, inst.intrinsics);
    return make_result("pnp_jacobian", analytic, numeric_jacobian(f, Eigen::VectorXd::Zero(6), opt.step),
                       opt.loss_tolerance);
}

GradcheckResult check_regressor_parameters(const GradcheckOptions& opt)
{
    const RegressorFixture fx = make_regressor_fixture(opt);
    std::vector<const TrainingExample*> batch;
    for (const auto& ex : fx.examples)
        batch.push_back(&ex);
    const EdgeTable& edges = fx.data.model.topology.edges();
    const LossWeights weights;

    RegressorParameters grad = RegressorParameters::zeros_like(fx.model.params);
    batch_loss(fx.model, batch, edges, weights, &grad);

    RegressorModel probe = fx.model;
    const auto f = [&](const Eigen::VectorXd& x) {
        unpack(x, probe.params);
        return batch_loss(probe, batch, edges, weights, nullptr);
    };
    return make_result("regressor_parameters", pack(grad), numeric_gradient(f, pack(fx.model.params), opt.step),
                       opt.model_tolerance);
}

GradcheckResult check_regressor_inputs(const GradcheckOptions& opt)
{
    const RegressorFixture fx = make_regressor_fixture(opt);
    const Eigen::VectorXd& x = fx.examples.front().features;
    const auto f = [&](const Eigen::VectorXd& in) {
        const RegressorOutput out = forward(fx.model, in);
        Eigen::VectorXd y(5 * fx.model.n_vertices);
        y << flat(out.vertices.points), flat(out.landmarks);
        return y;
    };
    return make_result("regressor_inputs", input_jacobian(fx.model, x), numeric_jacobian(f, x, opt.step),
                       opt.model_tolerance);
}

std::vector<GradcheckResult> run_gradchecks(const GradcheckOptions& opt)
{
    return {check_vertex_loss(opt),    check_edge_loss(opt),    check_landmark_loss(opt),
            check_total_loss(opt),     check_pnp_jacobian(opt), check_regressor_parameters(opt),
            check_regressor_inputs(opt)};
}

} // namespace pface
