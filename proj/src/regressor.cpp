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

#include "pface/regressor.hpp"

#include "pface/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace pface {

namespace {

constexpr const char* kModelFormat = "pface-jmlr";
constexpr int kModelVersion = 1;

Eigen::VectorXd interleave(const Eigen::Vector2d& pair, Eigen::Index n)
{
    return pair.replicate(n, 1);
}

Eigen::VectorXd flatten(const Points3<double>& m)
{
    return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Eigen::VectorXd flatten(const Points2<double>& m)
{
    return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

void fill_gaussian(Eigen::MatrixXd& m, std::mt19937_64& rng, double stddev)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    // Row-major fill order keeps the draw sequence independent of storage order.
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            m(r, c) = stddev * gauss(rng);
}

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void put_le(std::string& out, double x)
{
    const auto bits = std::bit_cast<std::uint64_t>(x);
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double get_le(const unsigned char* p)
{
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

template <typename Block>
void append_block(std::string& out, const Block& block)
{
    for (Eigen::Index r = 0; r < block.rows(); ++r)
        for (Eigen::Index c = 0; c < block.cols(); ++c)
            put_le(out, block(r, c));
}

io::json vector_json(const Eigen::VectorXd& v)
{
    return io::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const io::json& j, Eigen::Index expected, const char* what)
{
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != expected)
        throw ParseError(std::string("model header: bad ") + what);
    Eigen::VectorXd v(expected);
    for (Eigen::Index i = 0; i < expected; ++i)
        v(i) = j[static_cast<std::size_t>(i)].get<double>();
    return v;
}

} // namespace

Eigen::VectorXd FeatureEncoding::encode(const LandmarkSet2D& landmarks) const
{
    Eigen::VectorXd f(input_dim());
    const double hw = 0.5 * image_width;
    const double hh = 0.5 * image_height;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const int idx = indices[k];
        if (idx >= landmarks.rows())
            throw SizeMismatch("feature index " + std::to_string(idx) + " outside a landmark set of " +
                               std::to_string(landmarks.rows()));
        f(static_cast<Eigen::Index>(2 * k)) = (landmarks(idx, 0) - hw) / hw;
        f(static_cast<Eigen::Index>(2 * k + 1)) = (landmarks(idx, 1) - hh) / hh;
    }
    return f;
}

LandmarkSet2D FeatureEncoding::decode(const Eigen::VectorXd& features) const
{
    if (features.size() != input_dim())
        throw SizeMismatch("decode: expected " + std::to_string(input_dim()) + " features");
    LandmarkSet2D out(static_cast<Eigen::Index>(indices.size()), 2);
    for (Eigen::Index k = 0; k < out.rows(); ++k) {
        out(k, 0) = 0.5 * image_width * (features(2 * k) + 1.0);
        out(k, 1) = 0.5 * image_height * (features(2 * k + 1) + 1.0);
    }
    return out;
}

FeatureEncoding make_feature_encoding(Eigen::Index n_vertices, int n_points, double image_width, double image_height)
{
    if (n_points < 1 || n_points > n_vertices)
        throw InputError("feature point count must be in [1, n_vertices]");
    if (!(image_width > 0) || !(image_height > 0))
        throw InputError("image size must be positive");
    FeatureEncoding enc;
    enc.image_width = image_width;
    enc.image_height = image_height;
    for (int k = 0; k < n_points; ++k)
        enc.indices.push_back(static_cast<int>(k * n_vertices / n_points));
    return enc;
}

RegressorParameters RegressorParameters::zeros_like(const RegressorParameters& other)
{
    RegressorParameters z = other;
    for_each_block([](auto& block) { block.setZero(); }, z);
    return z;
}

Eigen::Index RegressorParameters::size() const
{
    return w1.size() + b1.size() + w2v.size() + b2v.size() + w2p.size() + b2p.size();
}

void validate(const RegressorModel& model)
{
    const Eigen::Index h = model.hidden();
    const Eigen::Index n = model.n_vertices;
    const auto& p = model.params;
    if (model.input_dim() != model.encoding.input_dim() || p.b1.size() != h || p.w2v.rows() != 3 * n ||
        p.w2v.cols() != h || p.b2v.size() != 3 * n || p.w2p.rows() != 2 * n || p.w2p.cols() != h ||
        p.b2p.size() != 2 * n || model.vertex_offset.size() != 3 * n || model.vertex_scale.size() != 3 * n)
        throw SizeMismatch("regressor: parameter shapes do not match the declared dimensions");
    bool finite = model.vertex_offset.allFinite() && model.vertex_scale.allFinite() &&
                  model.landmark_offset.allFinite() && model.landmark_scale.allFinite();
    for_each_block([&](const auto& block) { finite = finite && block.allFinite(); }, p);
    if (!finite)
        throw NumericalError("regressor: non-finite parameter");
}

long TrainConfig::total_steps(std::size_t n_examples) const
{
    const auto per_epoch = static_cast<long>((n_examples + static_cast<std::size_t>(batch_size) - 1) /
                                             static_cast<std::size_t>(batch_size));
    return per_epoch * epochs;
}

long TrainConfig::resolved_warmup(std::size_t n_examples) const
{
    if (warmup_steps)
        return *warmup_steps;
    return std::min<long>(1000, total_steps(n_examples) / 10);
}

double TrainConfig::learning_rate_at(long step, std::size_t n_examples) const
{
    const long total = total_steps(n_examples);
    const long warmup = resolved_warmup(n_examples);
    if (step < warmup)
        return learning_rate * static_cast<double>(step + 1) / static_cast<double>(warmup);
    if (total <= warmup)
        return learning_rate;
    const double progress = static_cast<double>(step - warmup) / static_cast<double>(total - warmup);
    return learning_rate * std::pow(std::max(0.0, 1.0 - progress), poly_power);
}

void validate(const TrainConfig& cfg, std::size_t n_examples)
{
    if (cfg.epochs <= 0 || cfg.batch_size <= 0 || cfg.hidden <= 0 || cfg.feature_points <= 0)
        throw InputError("train config: epochs, batch size, hidden width and feature count must be positive");
    if (!(cfg.learning_rate >= 0) || !(cfg.poly_power > 0) || !(cfg.feature_noise_px >= 0))
        throw InputError("train config: learning rate and noise must be non-negative, poly power positive");
    if (!(cfg.beta1 >= 0 && cfg.beta1 < 1) || !(cfg.beta2 >= 0 && cfg.beta2 < 1) || !(cfg.epsilon > 0))
        throw InputError("train config: moment decay rates must be in [0, 1) and epsilon positive");
    if (cfg.warmup_steps && (*cfg.warmup_steps < 0 || *cfg.warmup_steps > cfg.total_steps(n_examples)))
        throw InputError("train config: warmup must not exceed the total step count");
    validate(cfg.weights);
}

std::string config_hash(const TrainConfig& cfg)
{
    std::ostringstream s;
    s << cfg.epochs << '|' << io::format_exact(cfg.learning_rate) << '|' << cfg.batch_size << '|'
      << (cfg.warmup_steps ? std::to_string(*cfg.warmup_steps) : "auto") << '|' << io::format_exact(cfg.poly_power)
      << '|' << cfg.seed << '|' << io::format_exact(cfg.weights.edge) << '|' << io::format_exact(cfg.weights.landmark)
      << '|' << cfg.hidden << '|' << cfg.feature_points << '|' << io::format_exact(cfg.feature_noise_px) << '|'
      << io::format_exact(cfg.beta1) << '|' << io::format_exact(cfg.beta2) << '|' << io::format_exact(cfg.epsilon);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(s.str())));
    return buf;
}

RegressorOutput forward(const RegressorModel& model, const Eigen::VectorXd& features)
{
    if (features.size() != model.input_dim())
        throw SizeMismatch("forward: expected " + std::to_string(model.input_dim()) + " features, got " +
                           std::to_string(features.size()));
    const auto& p = model.params;
    const Eigen::Index n = model.n_vertices;
    const Eigen::VectorXd h = (p.w1 * features + p.b1).array().tanh();
    const Eigen::VectorXd v =
        model.vertex_offset + model.vertex_scale.cwiseProduct(p.w2v * h + p.b2v);
    const Eigen::VectorXd lm = interleave(model.landmark_offset, n) +
                               interleave(model.landmark_scale, n).cwiseProduct(p.w2p * h + p.b2p);
    RegressorOutput out;
    out.vertices = {Eigen::Map<const Points3<double>>(v.data(), n, 3), Frame::world};
    out.landmarks = Eigen::Map<const Points2<double>>(lm.data(), n, 2);
    return out;
}

Eigen::MatrixXd input_jacobian(const RegressorModel& model, const Eigen::VectorXd& features)
{
    if (features.size() != model.input_dim())
        throw SizeMismatch("input_jacobian: wrong feature count");
    const auto& p = model.params;
    const Eigen::Index n = model.n_vertices;
    const Eigen::VectorXd h = (p.w1 * features + p.b1).array().tanh();
    const Eigen::MatrixXd hidden = (1.0 - h.array().square()).matrix().asDiagonal() * p.w1;
    Eigen::MatrixXd jac(5 * n, model.input_dim());
    jac.topRows(3 * n) = model.vertex_scale.asDiagonal() * (p.w2v * hidden);
    jac.bottomRows(2 * n) = interleave(model.landmark_scale, n).asDiagonal() * (p.w2p * hidden);
    return jac;
}

RegressorModel init_regressor(const std::vector<TrainingExample>& examples, const FeatureEncoding& encoding,
                              int hidden, std::uint64_t seed)
{
    if (examples.empty())
        throw EmptyDataset("init_regressor: no training examples");
    if (hidden <= 0)
        throw InputError("init_regressor: hidden width must be positive");
    const Eigen::Index n = examples.front().vertices.size();
    Eigen::MatrixXd stacked(3 * n, static_cast<Eigen::Index>(examples.size()));
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (examples[i].vertices.size() != n)
            throw SizeMismatch("init_regressor: examples have different vertex counts");
        stacked.col(static_cast<Eigen::Index>(i)) = flatten(examples[i].vertices.points);
    }

    RegressorModel model;
    model.encoding = encoding;
    model.n_vertices = n;
    model.seed = seed;
    model.vertex_offset = stacked.rowwise().mean();
    const Eigen::MatrixXd centred = stacked.colwise() - model.vertex_offset;
    model.vertex_scale = (centred.rowwise().squaredNorm() / static_cast<double>(examples.size()))
                             .array()
                             .sqrt()
                             .max(1e-6)
                             .matrix();
    model.landmark_offset << 0.5 * encoding.image_width, 0.5 * encoding.image_height;
    model.landmark_scale = model.landmark_offset;

    const Eigen::Index d = encoding.input_dim();
    std::mt19937_64 rng(seed);
    auto& p = model.params;
    p.w1.resize(hidden, d);
    fill_gaussian(p.w1, rng, 1.0 / std::sqrt(static_cast<double>(d)));
    p.b1 = Eigen::VectorXd::Zero(hidden);
    p.w2v.resize(3 * n, hidden);
    fill_gaussian(p.w2v, rng, 0.01 / std::sqrt(static_cast<double>(hidden)));
    p.b2v = Eigen::VectorXd::Zero(3 * n);
    p.w2p.resize(2 * n, hidden);
    fill_gaussian(p.w2p, rng, 0.01 / std::sqrt(static_cast<double>(hidden)));
    p.b2p = Eigen::VectorXd::Zero(2 * n);
    return model;
}

double batch_loss(const RegressorModel& model, const std::vector<const TrainingExample*>& batch,
                  const EdgeTable& edges, const LossWeights& weights, RegressorParameters* grad)
{
    const auto b = static_cast<Eigen::Index>(batch.size());
    if (b == 0)
        throw EmptyDataset("batch_loss: empty batch");
    const Eigen::Index n = model.n_vertices;
    const auto& p = model.params;

    Eigen::MatrixXd x(model.input_dim(), b);
    for (Eigen::Index i = 0; i < b; ++i) {
        if (batch[static_cast<std::size_t>(i)]->features.size() != model.input_dim())
            throw SizeMismatch("batch_loss: wrong feature count");
        x.col(i) = batch[static_cast<std::size_t>(i)]->features;
    }
    const Eigen::MatrixXd h = ((p.w1 * x).colwise() + p.b1).array().tanh();
    const Eigen::MatrixXd zv = (p.w2v * h).colwise() + p.b2v;
    const Eigen::MatrixXd zp = (p.w2p * h).colwise() + p.b2p;
    const Eigen::VectorXd lm_offset = interleave(model.landmark_offset, n);
    const Eigen::VectorXd lm_scale = interleave(model.landmark_scale, n);

    Eigen::MatrixXd gv(3 * n, b);
    Eigen::MatrixXd gp(2 * n, b);
    double total = 0;
    for (Eigen::Index i = 0; i < b; ++i) {
        const TrainingExample& ex = *batch[static_cast<std::size_t>(i)];
        const Eigen::VectorXd v = model.vertex_offset + model.vertex_scale.cwiseProduct(zv.col(i));
        const Eigen::VectorXd lm = lm_offset + lm_scale.cwiseProduct(zp.col(i));
        const VertexSet pred_v{Eigen::Map<const Points3<double>>(v.data(), n, 3), Frame::world};
        const LandmarkSet2D pred_p = Eigen::Map<const Points2<double>>(lm.data(), n, 2);
        const LossReport report = total_loss(pred_v, ex.vertices, pred_p, ex.landmarks, edges, weights);
        total += report.l_total;
        if (grad) {
            gv.col(i) = flatten(report.grad_vertices).cwiseProduct(model.vertex_scale) / static_cast<double>(b);
            gp.col(i) = flatten(report.grad_landmarks).cwiseProduct(lm_scale) / static_cast<double>(b);
        }
    }

    if (grad) {
        grad->w2v.noalias() = gv * h.transpose();
        grad->b2v = gv.rowwise().sum();
        grad->w2p.noalias() = gp * h.transpose();
        grad->b2p = gp.rowwise().sum();
        Eigen::MatrixXd dh = p.w2v.transpose() * gv;
        dh.noalias() += p.w2p.transpose() * gp;
        const Eigen::MatrixXd da = dh.cwiseProduct((1.0 - h.array().square()).matrix());
        grad->w1.noalias() = da * x.transpose();
        grad->b1 = da.rowwise().sum();
    }
    return total / static_cast<double>(b);
}

TrainResult train(RegressorModel model, const std::vector<TrainingExample>& examples, const EdgeTable& edges,
                  const TrainConfig& cfg)
{
    if (examples.empty())
        throw EmptyDataset("train: no training examples");
    validate(cfg, examples.size());
    validate(model);

    RegressorParameters grad = RegressorParameters::zeros_like(model.params);
    RegressorParameters first_moment = grad;
    RegressorParameters second_moment = grad;

    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(cfg.seed);

    TrainResult result;
    long step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_sum = 0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            std::vector<const TrainingExample*> batch;
            for (std::size_t i = start; i < stop; ++i)
                batch.push_back(&examples[order[i]]);

            const double loss = batch_loss(model, batch, edges, cfg.weights, &grad);
            bool finite = std::isfinite(loss);
            for_each_block([&](const auto& g) { finite = finite && g.allFinite(); }, grad);
            if (!finite)
                throw NonFiniteLoss(step, "epoch " + std::to_string(epoch + 1) + ", batch loss " +
                                              io::format_9g(loss));
            epoch_sum += loss * static_cast<double>(batch.size());

            const double lr = cfg.learning_rate_at(step, examples.size());
            ++step;
            const double correction1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
            const double correction2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
            for_each_block(
                [&](auto& w, const auto& g, auto& m, auto& s) {
                    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
                    s = cfg.beta2 * s + (1.0 - cfg.beta2) * g.cwiseAbs2();
                    w.array() -= lr * (m.array() / correction1) / ((s.array() / correction2).sqrt() + cfg.epsilon);
                },
                model.params, grad, first_moment, second_moment);
        }
        result.epoch_loss.push_back(epoch_sum / static_cast<double>(examples.size()));
    }
    result.model = std::move(model);
    return result;
}

std::vector<TrainingExample> make_examples(const Dataset& dataset, const FeatureEncoding& encoding, double noise_px,
                                           std::uint64_t seed)
{
    if (!(noise_px >= 0))
        throw InputError("feature noise must be non-negative");
    std::vector<TrainingExample> out;
    out.reserve(dataset.instances.size());
    for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
        const DatasetInstance& inst = dataset.instances[i];
        LandmarkSet2D observed = inst.landmarks;
        if (noise_px > 0) {
            std::mt19937_64 rng(instance_seed(seed, i));
            std::normal_distribution<double> gauss(0.0, noise_px);
            for (Eigen::Index r = 0; r < observed.rows(); ++r)
                for (Eigen::Index c = 0; c < 2; ++c)
                    observed(r, c) += gauss(rng);
        }
        out.push_back({inst.id, encoding.encode(observed), inst.vertices, inst.landmarks});
    }
    return out;
}

TrainResult train_on_dataset(const Dataset& dataset, const TrainConfig& cfg)
{
    if (dataset.instances.empty())
        throw EmptyDataset("train: dataset has no instances");
    if (!dataset.topology)
        throw InputError("train: dataset has no topology");
    const Eigen::Index n = dataset.topology->n_vertices();
    const FeatureEncoding enc = make_feature_encoding(n, cfg.feature_points, dataset.image_width, dataset.image_height);
    const std::vector<TrainingExample> examples = make_examples(dataset, enc, cfg.feature_noise_px, cfg.seed);
    validate(cfg, examples.size());
    RegressorModel model = init_regressor(examples, enc, cfg.hidden, cfg.seed);
    model.config_hash = config_hash(cfg);
    return train(std::move(model), examples, dataset.topology->edges(), cfg);
}

PosedPrediction predict_with_pose(const RegressorModel& model, const Eigen::VectorXd& features,
                                  const CameraIntrinsics& k, const PnPConfig& cfg)
{
    RegressorOutput out = forward(model, features);
    PnPResult pnp = solve_pnp(out.vertices, out.landmarks, k, cfg);
    return {std::move(out.vertices), std::move(out.landmarks), std::move(pnp)};
}

PosedPrediction predict_template_baseline(const RegressorModel& model, const Eigen::VectorXd& features,
                                          const CameraIntrinsics& k)
{
    if (features.size() != model.input_dim())
        throw SizeMismatch("baseline: wrong feature count");
    const Eigen::Index n = model.n_vertices;
    VertexSet mesh{Eigen::Map<const Points3<double>>(model.vertex_offset.data(), n, 3), Frame::world};
    VertexSet subset{Points3<double>(static_cast<Eigen::Index>(model.encoding.indices.size()), 3), Frame::world};
    for (std::size_t i = 0; i < model.encoding.indices.size(); ++i)
        subset.points.row(static_cast<Eigen::Index>(i)) = mesh.points.row(model.encoding.indices[i]);
    const LandmarkSet2D observed = model.encoding.decode(features);

    PnPResult pnp;
    pnp.pose = solve_pnp_dlt(subset, observed, k);
    pnp.rms_reprojection_error = reprojection_rms(subset, pnp.pose, k, observed);
    LandmarkSet2D landmarks = project_world(mesh, pnp.pose, k);
    return {std::move(mesh), std::move(landmarks), std::move(pnp)};
}

void save_model(const std::filesystem::path& path, const RegressorModel& model)
{
    validate(model);
    io::json header = {{"format", kModelFormat},
                       {"version", kModelVersion},
                       {"input_dim", model.input_dim()},
                       {"hidden", model.hidden()},
                       {"n_vertices", model.n_vertices},
                       {"feature_indices", model.encoding.indices},
                       {"image_width", model.encoding.image_width},
                       {"image_height", model.encoding.image_height},
                       {"vertex_offset", vector_json(model.vertex_offset)},
                       {"vertex_scale", vector_json(model.vertex_scale)},
                       {"landmark_offset", {model.landmark_offset(0), model.landmark_offset(1)}},
                       {"landmark_scale", {model.landmark_scale(0), model.landmark_scale(1)}},
                       {"seed", model.seed},
                       {"config_hash", model.config_hash},
                       {"parameter_count", model.params.size()},
                       {"parameter_order", {"W1", "b1", "W2v", "b2v", "W2p", "b2p"}}};
    std::string out = header.dump() + "\n";
    out.reserve(out.size() + 8 * static_cast<std::size_t>(model.params.size()));
    for_each_block([&](const auto& block) { append_block(out, block); }, model.params);
    io::write_text(path, out);
}

RegressorModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::string header_line;
    std::getline(in, header_line);
    const std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    io::json header;
    try {
        header = io::json::parse(header_line);
    } catch (const io::json::parse_error& e) {
        throw ParseError(path.string() + ": bad model header: " + e.what());
    }
    try {
        if (header.value("format", "") != kModelFormat || header.value("version", 0) != kModelVersion)
            throw ParseError("unsupported model format");
        RegressorModel model;
        const auto d = header.at("input_dim").get<Eigen::Index>();
        const auto h = header.at("hidden").get<Eigen::Index>();
        const auto n = header.at("n_vertices").get<Eigen::Index>();
        if (d <= 0 || h <= 0 || n <= 0)
            throw ParseError("non-positive dimension");
        model.n_vertices = n;
        model.encoding.indices = header.at("feature_indices").get<std::vector<int>>();
        model.encoding.image_width = header.at("image_width").get<double>();
        model.encoding.image_height = header.at("image_height").get<double>();
        model.vertex_offset = vector_from_json(header.at("vertex_offset"), 3 * n, "vertex_offset");
        model.vertex_scale = vector_from_json(header.at("vertex_scale"), 3 * n, "vertex_scale");
        model.landmark_offset = vector_from_json(header.at("landmark_offset"), 2, "landmark_offset");
        model.landmark_scale = vector_from_json(header.at("landmark_scale"), 2, "landmark_scale");
        model.seed = header.at("seed").get<std::uint64_t>();
        model.config_hash = header.at("config_hash").get<std::string>();

        auto& p = model.params;
        p.w1.resize(h, d);
        p.b1.resize(h);
        p.w2v.resize(3 * n, h);
        p.b2v.resize(3 * n);
        p.w2p.resize(2 * n, h);
        p.b2p.resize(2 * n);
        if (body.size() != 8 * static_cast<std::size_t>(p.size()))
            throw ParseError("parameter block has " + std::to_string(body.size()) + " bytes, expected " +
                             std::to_string(8 * p.size()));
        const auto* bytes = reinterpret_cast<const unsigned char*>(body.data());
        for_each_block(
            [&](auto& block) {
                for (Eigen::Index r = 0; r < block.rows(); ++r)
                    for (Eigen::Index c = 0; c < block.cols(); ++c) {
                        block(r, c) = get_le(bytes);
                        bytes += 8;
                    }
            },
            p);
        validate(model);
        return model;
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const io::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace pface
