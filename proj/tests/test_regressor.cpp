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
#include "pface/metrics.hpp"
#include "pface/regressor.hpp"
#include "test_util.hpp"

#include "doctest.h"

#include <fstream>
#include <iterator>
#include <numbers>

using namespace pface;
using pface::testing::TempDir;

namespace {

Dataset as_dataset(const SyntheticDataset& s)
{
    Dataset d;
    d.topology = s.model.topology;
    for (const auto& inst : s.instances)
        d.instances.push_back({inst.id, inst.v_world, inst.pose, inst.intrinsics, inst.landmarks});
    return d;
}

Dataset small_dataset(int n, std::uint64_t seed, Eigen::Index n_vertices = 120)
{
    DatasetConfig cfg;
    cfg.n_instances = n;
    cfg.seed = seed;
    cfg.n_vertices = n_vertices;
    cfg.n_basis = 4;
    return as_dataset(generate_dataset(cfg));
}

TrainConfig small_config()
{
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batch_size = 8;
    cfg.hidden = 16;
    cfg.feature_points = 12;
    return cfg;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool same_parameters(const RegressorParameters& a, const RegressorParameters& b)
{
    return a.w1 == b.w1 && a.b1 == b.b1 && a.w2v == b.w2v && a.b2v == b.b2v && a.w2p == b.w2p && a.b2p == b.b2p;
}

} // namespace

TEST_CASE("feature encoding")
{
    const FeatureEncoding enc = make_feature_encoding(1220, 64, 800, 800);
    CHECK(enc.input_dim() == 128);
    CHECK(enc.indices.front() == 0);
    CHECK(enc.indices.back() < 1220);

    std::mt19937_64 rng(1);
    const LandmarkSet2D p = (pface::testing::random_points(rng, 1220).leftCols(2).array() * 4000 + 400).matrix();
    const Eigen::VectorXd f = enc.encode(p);
    const LandmarkSet2D back = enc.decode(f);
    for (std::size_t k = 0; k < enc.indices.size(); ++k)
        CHECK((back.row(static_cast<Eigen::Index>(k)) - p.row(enc.indices[k])).norm() < 1e-12);

    LandmarkSet2D corners(2, 2);
    corners << 0, 0, 800, 800;
    const FeatureEncoding two{{0, 1}, 800, 800};
    CHECK(two.encode(corners) == Eigen::Vector4d(-1, -1, 1, 1));

    CHECK_THROWS_AS(make_feature_encoding(10, 11, 800, 800), InputError);
    CHECK_THROWS_AS(enc.encode(LandmarkSet2D::Zero(100, 2)), SizeMismatch);
}

TEST_CASE("zero network outputs the normalization offsets")
{
    const Dataset d = small_dataset(6, 1);
    const FeatureEncoding enc = make_feature_encoding(120, 12, 800, 800);
    const auto examples = make_examples(d, enc, 0, 1);
    RegressorModel model = init_regressor(examples, enc, 10, 2);
    model.params = RegressorParameters::zeros_like(model.params);
    const RegressorOutput out = forward(model, examples[0].features);
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(out.vertices.points.data(), 360);
    CHECK(v == model.vertex_offset);
    CHECK(out.landmarks.col(0).isConstant(400, 0));
    CHECK(out.landmarks.col(1).isConstant(400, 0));
    CHECK(out.vertices.frame == Frame::world);

    // The vertex offset is the per-coordinate training mean.
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(360);
    for (const auto& ex : examples)
        mean += Eigen::Map<const Eigen::VectorXd>(ex.vertices.points.data(), 360);
    CHECK((mean / 6.0 - model.vertex_offset).cwiseAbs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS(forward(model, Eigen::VectorXd::Zero(5)), SizeMismatch);
}

TEST_CASE("forward pass is deterministic and matches its Jacobian")
{
    const Dataset d = small_dataset(4, 2);
    const FeatureEncoding enc = make_feature_encoding(120, 12, 800, 800);
    const auto examples = make_examples(d, enc, 1.0, 3);
    const RegressorModel model = init_regressor(examples, enc, 20, 4);
    const RegressorOutput a = forward(model, examples[1].features);
    const RegressorOutput b = forward(model, examples[1].features);
    CHECK(a.vertices.points == b.vertices.points);
    CHECK(a.landmarks == b.landmarks);

    CHECK(check_regressor_inputs().passed());
    const auto f = [&](const Eigen::VectorXd& x) {
        const RegressorOutput o = forward(model, x);
        Eigen::VectorXd y(600);
        y << Eigen::Map<const Eigen::VectorXd>(o.vertices.points.data(), 360),
            Eigen::Map<const Eigen::VectorXd>(o.landmarks.data(), 240);
        return y;
    };
    CHECK(relative_error(input_jacobian(model, examples[1].features), numeric_jacobian(f, examples[1].features)) <
          1e-5);
}

TEST_CASE("parameter gradients match finite differences")
{
    const GradcheckResult r = check_regressor_parameters();
    CHECK(r.max_relative_error < 1e-4);
}

TEST_CASE("loss terms reach only their own head")
{
    const Dataset d = small_dataset(3, 5);
    const FeatureEncoding enc = make_feature_encoding(120, 12, 800, 800);
    const auto examples = make_examples(d, enc, 1.0, 5);
    const RegressorModel model = init_regressor(examples, enc, 10, 6);
    std::vector<const TrainingExample*> batch;
    for (const auto& ex : examples)
        batch.push_back(&ex);
    const EdgeTable& edges = d.topology->edges();

    RegressorParameters g = RegressorParameters::zeros_like(model.params);
    batch_loss(model, batch, edges, {0.25, 0.0}, &g);
    CHECK(g.w2p.isZero(0));
    CHECK(g.b2p.isZero(0));
    CHECK(!g.w2v.isZero(0));

    RegressorParameters without_edge = g;
    RegressorParameters with_edge = g;
    batch_loss(model, batch, edges, {0.0, 0.0}, &without_edge);
    batch_loss(model, batch, edges, {0.25, 0.0}, &with_edge);
    CHECK(without_edge.w2v != with_edge.w2v);

    RegressorParameters lm_only = g;
    RegressorParameters lm_edge = g;
    batch_loss(model, batch, edges, {0.0, 2.0}, &lm_only);
    batch_loss(model, batch, edges, {0.25, 2.0}, &lm_edge);
    CHECK(lm_only.w2p == lm_edge.w2p);
    CHECK(lm_only.b2p == lm_edge.b2p);
}

TEST_CASE("learning rate schedule")
{
    TrainConfig cfg;
    cfg.epochs = 10;
    cfg.batch_size = 10;
    cfg.learning_rate = 0.5;
    cfg.warmup_steps = 20;
    // 100 examples: 10 steps per epoch, 100 in total.
    CHECK(cfg.total_steps(100) == 100);
    CHECK(cfg.learning_rate_at(0, 100) == doctest::Approx(0.5 / 20));
    CHECK(cfg.learning_rate_at(19, 100) == doctest::Approx(0.5));
    CHECK(cfg.learning_rate_at(20, 100) == doctest::Approx(0.5));
    CHECK(cfg.learning_rate_at(60, 100) == doctest::Approx(0.25));
    CHECK(cfg.learning_rate_at(99, 100) == doctest::Approx(0.5 / 80));
    cfg.poly_power = 2;
    CHECK(cfg.learning_rate_at(60, 100) == doctest::Approx(0.125));

    cfg.warmup_steps.reset();
    CHECK(cfg.resolved_warmup(100) == 10);
    cfg.epochs = 10000;
    CHECK(cfg.resolved_warmup(100) == 1000);
}

TEST_CASE("training config validation")
{
    TrainConfig cfg = small_config();
    cfg.warmup_steps = 1000;
    CHECK_THROWS_AS(validate(cfg, 10), InputError);
    cfg = small_config();
    cfg.learning_rate = -1;
    CHECK_THROWS_AS(validate(cfg, 10), InputError);
    cfg = small_config();
    cfg.batch_size = 0;
    CHECK_THROWS_AS(validate(cfg, 10), InputError);
    CHECK_THROWS_AS(train_on_dataset(Dataset{}, small_config()), EmptyDataset);
    CHECK(config_hash(small_config()) == config_hash(small_config()));
    cfg = small_config();
    cfg.seed = 99;
    CHECK(config_hash(cfg) != config_hash(small_config()));
}

TEST_CASE("zero learning rate leaves the model untouched")
{
    const Dataset d = small_dataset(24, 7);
    TrainConfig cfg = small_config();
    cfg.learning_rate = 0;
    const FeatureEncoding enc = make_feature_encoding(120, cfg.feature_points, 800, 800);
    const auto examples = make_examples(d, enc, cfg.feature_noise_px, cfg.seed);
    const RegressorModel init = init_regressor(examples, enc, cfg.hidden, cfg.seed);
    const TrainResult r = train(init, examples, d.topology->edges(), cfg);
    CHECK(same_parameters(r.model.params, init.params));
    REQUIRE(r.epoch_loss.size() == 5);
    for (double l : r.epoch_loss)
        CHECK(l == doctest::Approx(r.epoch_loss[0]).epsilon(1e-12));
}

TEST_CASE("training lowers the loss and is reproducible")
{
    const Dataset d = small_dataset(64, 8);
    TrainConfig cfg = small_config();
    cfg.epochs = 20;
    const TrainResult a = train_on_dataset(d, cfg);
    const TrainResult b = train_on_dataset(d, cfg);
    CHECK(a.epoch_loss.back() < a.epoch_loss.front());
    CHECK(a.epoch_loss == b.epoch_loss);
    CHECK(same_parameters(a.model.params, b.model.params));
    CHECK(a.model.config_hash == config_hash(cfg));
}

TEST_CASE("divergence is reported")
{
    const Dataset d = small_dataset(16, 9);
    TrainConfig cfg = small_config();
    cfg.learning_rate = 1e300;
    cfg.warmup_steps = 0;
    CHECK_THROWS_AS(train_on_dataset(d, cfg), NonFiniteLoss);
}

TEST_CASE("model files round trip exactly")
{
    TempDir dir("model");
    const Dataset d = small_dataset(16, 10);
    const TrainResult r = train_on_dataset(d, small_config());
    save_model(dir / "m.jmlr", r.model);
    const RegressorModel back = load_model(dir / "m.jmlr");
    CHECK(same_parameters(back.params, r.model.params));
    CHECK(back.vertex_offset == r.model.vertex_offset);
    CHECK(back.vertex_scale == r.model.vertex_scale);
    CHECK(back.encoding.indices == r.model.encoding.indices);
    CHECK(back.config_hash == r.model.config_hash);
    CHECK(back.seed == r.model.seed);

    save_model(dir / "again.jmlr", back);
    CHECK(slurp(dir / "m.jmlr") == slurp(dir / "again.jmlr"));

    // Header line, then exactly 8 bytes per parameter.
    const std::string bytes = slurp(dir / "m.jmlr");
    const std::size_t newline = bytes.find('\n');
    CHECK(bytes.size() - newline - 1 == 8 * static_cast<std::size_t>(r.model.params.size()));
    const io::json header = io::json::parse(bytes.substr(0, newline));
    CHECK(header.at("parameter_order")[0] == "W1");

    std::ofstream(dir / "short.jmlr", std::ios::binary) << bytes.substr(0, bytes.size() - 8);
    CHECK_THROWS_AS(load_model(dir / "short.jmlr"), ParseError);
    std::ofstream(dir / "junk.jmlr") << "not json\n";
    CHECK_THROWS_AS(load_model(dir / "junk.jmlr"), ParseError);
    CHECK_THROWS_AS(load_model(dir / "missing.jmlr"), IoError);
}
