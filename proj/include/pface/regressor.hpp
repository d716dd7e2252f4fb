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
#include "pface/losses.hpp"
#include "pface/pnp.hpp"
#include "pface/synth.hpp"
#include "pface/topology.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

/**
 * Joint mesh and landmark regressor.
 *
 * A one-hidden-layer tanh network maps sparse 2D observations to two outputs:
 * the full world-space mesh (meters) and the projection of every vertex
 * (pixels). The pose is never regressed; it is recovered afterwards by PnP
 * between the two outputs.
 *
 *   h = tanh(W1 x + b1)
 *   v = vertex_offset   + vertex_scale   .* (W2v h + b2v)     3N, row-major N x 3
 *   p = landmark_offset + landmark_scale .* (W2p h + b2p)     2N, row-major N x 2
 */
namespace pface {

/// Network input: pixel positions of a fixed vertex subset, mapped to [-1, 1] by the image frame.
struct FeatureEncoding
{
    std::vector<int> indices;
    double image_width = 800;
    double image_height = 800;

    Eigen::Index input_dim() const { return 2 * static_cast<Eigen::Index>(indices.size()); }

    /// Gathers the subset from a full N x 2 landmark set and normalizes it.
    Eigen::VectorXd encode(const LandmarkSet2D& landmarks) const;

    /// Inverse of the normalization: D features back to an S x 2 pixel set.
    LandmarkSet2D decode(const Eigen::VectorXd& features) const;
};

/// S indices spread evenly over [0, n_vertices).
FeatureEncoding make_feature_encoding(Eigen::Index n_vertices, int n_points, double image_width, double image_height);

/// Trainable weights, visited in file order W1, b1, W2v, b2v, W2p, b2p.
struct RegressorParameters
{
    Eigen::MatrixXd w1;
    Eigen::VectorXd b1;
    Eigen::MatrixXd w2v;
    Eigen::VectorXd b2v;
    Eigen::MatrixXd w2p;
    Eigen::VectorXd b2p;

    /// Same shapes as other, all zeros.
    static RegressorParameters zeros_like(const RegressorParameters& other);

    Eigen::Index size() const;
};

template <typename F, typename... Params>
void for_each_block(F&& f, Params&... p)
{
    f(p.w1...);
    f(p.b1...);
    f(p.w2v...);
    f(p.b2v...);
    f(p.w2p...);
    f(p.b2p...);
}

struct RegressorModel
{
    FeatureEncoding encoding;
    Eigen::Index n_vertices = 0;
    RegressorParameters params;
    Eigen::VectorXd vertex_offset; ///< 3N
    Eigen::VectorXd vertex_scale;  ///< 3N
    Eigen::Vector2d landmark_offset = Eigen::Vector2d::Zero();
    Eigen::Vector2d landmark_scale = Eigen::Vector2d::Ones();
    std::uint64_t seed = 0;
    std::string config_hash;

    Eigen::Index input_dim() const { return params.w1.cols(); }
    Eigen::Index hidden() const { return params.w1.rows(); }
};

void validate(const RegressorModel& model);

struct TrainingExample
{
    std::string id;
    Eigen::VectorXd features;
    VertexSet vertices;
    LandmarkSet2D landmarks;
};

struct TrainConfig
{
    int epochs = 40;
    double learning_rate = 1e-2;
    int batch_size = 64;
    std::optional<long> warmup_steps; ///< default: min(1000, total_steps / 10)
    double poly_power = 1.0;
    std::uint64_t seed = 7;
    LossWeights weights;
    int hidden = 256;
    int feature_points = 64;
    double feature_noise_px = 1.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    long total_steps(std::size_t n_examples) const;
    long resolved_warmup(std::size_t n_examples) const;
    /// Learning rate at 0-based step: linear warmup, then polynomial decay to zero.
    double learning_rate_at(long step, std::size_t n_examples) const;
};

void validate(const TrainConfig& cfg, std::size_t n_examples);

/// Stable hex digest of the config, stored in saved models.
std::string config_hash(const TrainConfig& cfg);

struct RegressorOutput
{
    VertexSet vertices;
    LandmarkSet2D landmarks;
};

RegressorOutput forward(const RegressorModel& model, const Eigen::VectorXd& features);

/// d(outputs)/d(features): rows are the 3N vertex coordinates then the 2N landmark coordinates.
Eigen::MatrixXd input_jacobian(const RegressorModel& model, const Eigen::VectorXd& features);

/**
 * Fresh model: normalization taken from the examples (per-coordinate vertex
 * mean and standard deviation, image centre and half extent for landmarks),
 * W1 ~ N(0, 1/D), heads ~ N(0, 0.01/H), zero biases.
 */
RegressorModel init_regressor(const std::vector<TrainingExample>& examples, const FeatureEncoding& encoding,
                              int hidden, std::uint64_t seed);

/// Mean total loss over the batch; fills grad (same shapes as params) when non-null.
double batch_loss(const RegressorModel& model, const std::vector<const TrainingExample*>& batch,
                  const EdgeTable& edges, const LossWeights& weights, RegressorParameters* grad);

struct TrainResult
{
    RegressorModel model;
    std::vector<double> epoch_loss; ///< mean training loss per epoch, measured during the epoch
};

/**
 * Mini-batch training on the weighted mesh + landmark loss with manual
 * backprop. Updates use bias-corrected Adam moments. Throws EmptyDataset and
 * NonFiniteLoss.
 */
TrainResult train(RegressorModel model, const std::vector<TrainingExample>& examples, const EdgeTable& edges,
                  const TrainConfig& cfg);

/// Features from each instance's stored landmarks plus seeded N(0, noise_px^2) pixel noise.
std::vector<TrainingExample> make_examples(const Dataset& dataset, const FeatureEncoding& encoding, double noise_px,
                                           std::uint64_t seed);

/// Encoding + init + train over a loaded dataset (which must carry a topology).
TrainResult train_on_dataset(const Dataset& dataset, const TrainConfig& cfg);

struct PosedPrediction
{
    VertexSet vertices;
    LandmarkSet2D landmarks;
    PnPResult pnp;
};

/// Forward pass, then PnP between the predicted mesh and predicted landmarks.
PosedPrediction predict_with_pose(const RegressorModel& model, const Eigen::VectorXd& features,
                                  const CameraIntrinsics& k, const PnPConfig& cfg = {});

/// Reference predictor: the template mesh (training mean stored in the model)
/// posed by DLT on the feature points alone. The network weights are unused.
PosedPrediction predict_template_baseline(const RegressorModel& model, const Eigen::VectorXd& features,
                                          const CameraIntrinsics& k);

/**
 * Model file: a single-line JSON header (dimensions, encoding, normalization,
 * seed, config hash), a newline, then every parameter as a little-endian
 * float64 in block order W1, b1, W2v, b2v, W2p, b2p, matrices row-major.
 */
void save_model(const std::filesystem::path& path, const RegressorModel& model);
RegressorModel load_model(const std::filesystem::path& path);

} // namespace pface
