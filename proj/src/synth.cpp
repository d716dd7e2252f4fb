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

#include "pface/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace pface {

namespace {

constexpr double kHalfWidth = 0.08;  // x semi-axis of the cap outline
constexpr double kHalfHeight = 0.11; // y semi-axis
constexpr double kDepth = 0.10;      // z extent of the full ellipsoid
constexpr double kRimFlatten = 0.99; // cap stops short of the ellipsoid equator
constexpr int kMaxPolynomialDegree = 4;
constexpr int kSimilarityDirections = 7; // 3 translations, 3 rotations, 1 scale

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double symmetric(std::mt19937_64& rng, double bound)
{
    return bound * (2.0 * uniform01(rng) - 1.0);
}

double deg2rad(double deg)
{
    return deg * std::numbers::pi / 180.0;
}

// Vertex positions on the ellipsoidal cap, centre first then ring by ring.
Points3<double> cap_positions(const std::vector<int>& rings)
{
    Eigen::Index n = 1;
    for (int r : rings)
        n += r;
    Points3<double> pts(n, 3);
    pts.row(0) << 0, 0, -kDepth;
    Eigen::Index next = 1;
    const auto ring_count = static_cast<double>(rings.size());
    for (std::size_t k = 0; k < rings.size(); ++k) {
        const double rho = static_cast<double>(k + 1) / ring_count;
        const double z = -kDepth * std::sqrt(1.0 - kRimFlatten * rho * rho);
        for (int j = 0; j < rings[k]; ++j) {
            const double theta = 2.0 * std::numbers::pi * j / rings[k];
            pts.row(next++) << kHalfWidth * rho * std::cos(theta), kHalfHeight * rho * std::sin(theta), z;
        }
    }
    return pts;
}

} // namespace

VertexSet ShapeModel::shape(const Eigen::VectorXd& coeffs) const
{
    if (coeffs.size() != n_basis())
        throw SizeMismatch("shape: " + std::to_string(coeffs.size()) + " coefficients for a basis of " +
                           std::to_string(n_basis()));
    VertexSet out = mean;
    if (n_basis() > 0) {
        const Eigen::VectorXd offset = basis * coeffs;
        out.points += Eigen::Map<const Points3<double>>(offset.data(), mean.size(), 3);
    }
    return out;
}

std::vector<int> ring_sizes_for(Eigen::Index n_vertices)
{
    if (n_vertices < 9)
        throw RangeInvalid("shape model needs at least 9 vertices");
    const Eigen::Index budget = n_vertices - 1;
    int rings = 1;
    while (3 * (rings + 1) * (rings + 2) <= budget)
        ++rings;
    std::vector<int> sizes(static_cast<std::size_t>(rings));
    Eigen::Index used = 0;
    for (int k = 0; k < rings; ++k) {
        sizes[static_cast<std::size_t>(k)] = 6 * (k + 1);
        used += 6 * (k + 1);
    }
    // Spread the remainder from the outside in.
    for (Eigen::Index left = budget - used, k = rings - 1; left > 0; --left) {
        ++sizes[static_cast<std::size_t>(k)];
        k = (k == 0) ? rings - 1 : k - 1;
    }
    return sizes;
}

Triangles ring_cap_triangles(const std::vector<int>& ring_sizes)
{
    if (ring_sizes.empty())
        throw RangeInvalid("ring_cap_triangles: need at least one ring");
    for (int r : ring_sizes)
        if (r < 3)
            throw RangeInvalid("ring_cap_triangles: every ring needs at least 3 vertices");

    std::vector<Eigen::Vector3i> tris;
    const int first = ring_sizes[0];
    for (int j = 0; j < first; ++j)
        tris.emplace_back(0, 1 + j, 1 + (j + 1) % first);

    int inner_start = 1;
    for (std::size_t k = 1; k < ring_sizes.size(); ++k) {
        const int a = ring_sizes[k - 1];
        const int b = ring_sizes[k];
        const int outer_start = inner_start + a;
        // Zip the two closed rings together by angular order.
        int i = 0;
        int j = 0;
        while (i < a || j < b) {
            const double next_inner = static_cast<double>(i + 1) / a;
            const double next_outer = static_cast<double>(j + 1) / b;
            const int vi = inner_start + i % a;
            const int vj = outer_start + j % b;
            if (j == b || (i < a && next_inner <= next_outer)) {
                tris.emplace_back(vi, vj, inner_start + (i + 1) % a);
                ++i;
            } else {
                tris.emplace_back(vi, vj, outer_start + (j + 1) % b);
                ++j;
            }
        }
        inner_start = outer_start;
    }

    Triangles out(static_cast<Eigen::Index>(tris.size()), 3);
    for (std::size_t t = 0; t < tris.size(); ++t)
        out.row(static_cast<Eigen::Index>(t)) = tris[t].transpose();
    return out;
}

FaceModel make_shape_model(Eigen::Index n_vertices, Eigen::Index n_basis, std::uint64_t seed)
{
    const std::vector<int> rings = ring_sizes_for(n_vertices);
    const int n_monomials = (kMaxPolynomialDegree + 1) * (kMaxPolynomialDegree + 2) / 2;
    const Eigen::Index max_basis = 3 * n_monomials - kSimilarityDirections;
    if (n_basis < 0 || n_basis > max_basis)
        throw RangeInvalid("make_shape_model: n_basis must be in [0, " + std::to_string(max_basis) + "]");

    Points3<double> pts = cap_positions(rings);
    pts.rowwise() -= pts.colwise().mean();

    std::vector<int> landmarks;
    if (n_vertices >= FaceTopology::kLandmarkCount)
        for (int i = 0; i < FaceTopology::kLandmarkCount; ++i)
            landmarks.push_back(static_cast<int>(i * n_vertices / FaceTopology::kLandmarkCount));
    FaceTopology topology(n_vertices, ring_cap_triangles(rings), std::move(landmarks));

    // Smooth displacement fields: random low-degree polynomials in the
    // normalized (x, y) outline coordinates, one per axis.
    std::mt19937_64 rng(splitmix64(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Eigen::VectorXd xi = pts.col(0) / kHalfWidth;
    const Eigen::VectorXd eta = pts.col(1) / kHalfHeight;
    Eigen::MatrixXd basis(3 * n_vertices, n_basis);
    for (Eigen::Index b = 0; b < n_basis; ++b) {
        Points3<double> field = Points3<double>::Zero(n_vertices, 3);
        for (int deg = 0; deg <= kMaxPolynomialDegree; ++deg) {
            for (int px = deg; px >= 0; --px) {
                const Eigen::VectorXd mono = xi.array().pow(px) * eta.array().pow(deg - px);
                for (int axis = 0; axis < 3; ++axis)
                    field.col(axis) += (gauss(rng) / (1.0 + deg)) * mono;
            }
        }
        basis.col(b) = Eigen::Map<const Eigen::VectorXd>(field.data(), field.size());
    }
    // Fields that only translate, rotate or scale the template would be
    // indistinguishable from the pose (and scale from depth); they lead the
    // orthogonalization and are dropped afterwards.
    Eigen::MatrixXd gauge = Eigen::MatrixXd::Zero(3 * n_vertices, kSimilarityDirections);
    for (int axis = 0; axis < 3; ++axis) {
        Points3<double> t = Points3<double>::Zero(n_vertices, 3);
        t.col(axis).setOnes();
        Points3<double> r(n_vertices, 3);
        for (Eigen::Index i = 0; i < n_vertices; ++i)
            r.row(i) = skew<double>(Vector3<double>::Unit(axis)) * pts.row(i).transpose();
        gauge.col(axis) = Eigen::Map<const Eigen::VectorXd>(t.data(), t.size());
        gauge.col(3 + axis) = Eigen::Map<const Eigen::VectorXd>(r.data(), r.size());
    }
    gauge.col(6) = Eigen::Map<const Eigen::VectorXd>(pts.data(), pts.size());
    Eigen::MatrixXd all(3 * n_vertices, kSimilarityDirections + n_basis);
    all << gauge, basis;

    // Two passes of modified Gram-Schmidt, then per-field RMS displacement.
    for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index b = 0; b < all.cols(); ++b) {
            for (Eigen::Index c = 0; c < b; ++c)
                all.col(b) -= all.col(c).dot(all.col(b)) * all.col(c);
            if (all.col(b).norm() < 1e-9)
                throw RangeInvalid("make_shape_model: too few vertices for " + std::to_string(n_basis) +
                                   " independent shape directions");
            all.col(b).normalize();
        }
    }
    basis = all.rightCols(n_basis);
    for (Eigen::Index b = 0; b < n_basis; ++b) {
        const double rms_mm = 6.0 / (1.0 + 0.3 * static_cast<double>(b));
        basis.col(b) *= 1e-3 * rms_mm * std::sqrt(static_cast<double>(n_vertices));
    }

    return {ShapeModel{{pts, Frame::world}, std::move(basis)}, std::move(topology)};
}

void validate(const SamplingRanges& r)
{
    if (!(r.depth_min >= 0.2) || !(r.depth_max <= 1.5) || !(r.depth_min <= r.depth_max))
        throw RangeInvalid("depth range must lie within [0.2, 1.5] m");
    if (!(r.yaw_deg >= 0 && r.yaw_deg <= 90) || !(r.pitch_deg >= 0 && r.pitch_deg <= 45) ||
        !(r.roll_deg >= 0 && r.roll_deg <= 30))
        throw RangeInvalid("angle bounds must lie within yaw 90, pitch 45, roll 30 degrees");
    if (!(r.coeff_sigma >= 0) || !std::isfinite(r.coeff_sigma))
        throw RangeInvalid("coefficient sigma must be finite and non-negative");
    if (r.image_width <= 0 || r.image_height <= 0)
        throw RangeInvalid("image size must be positive");
    if (!(r.min_point_depth > 0))
        throw RangeInvalid("minimum point depth must be positive");
    try {
        validate(r.intrinsics);
    } catch (const InputError& e) {
        throw RangeInvalid(e.what());
    }
}

Matrix3<double> rotation_from_euler_zyx(double yaw, double pitch, double roll)
{
    Matrix3<double> rx;
    Matrix3<double> ry;
    Matrix3<double> rz;
    rx << 1, 0, 0, 0, std::cos(pitch), -std::sin(pitch), 0, std::sin(pitch), std::cos(pitch);
    ry << std::cos(yaw), 0, std::sin(yaw), 0, 1, 0, -std::sin(yaw), 0, std::cos(yaw);
    rz << std::cos(roll), -std::sin(roll), 0, std::sin(roll), std::cos(roll), 0, 0, 0, 1;
    return (rz * ry * rx).transpose();
}

SyntheticInstance sample_instance(const ShapeModel& model, const SamplingRanges& ranges, std::uint64_t seed,
                                  std::string id)
{
    validate(ranges);
    std::mt19937_64 rng(splitmix64(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const CameraIntrinsics& k = ranges.intrinsics;

    for (int attempt = 0; attempt < 1000; ++attempt) {
        SyntheticInstance inst;
        inst.id = id;
        inst.intrinsics = k;
        inst.coeffs.resize(model.n_basis());
        for (Eigen::Index b = 0; b < model.n_basis(); ++b)
            inst.coeffs(b) = ranges.coeff_sigma * std::clamp(gauss(rng), -3.0, 3.0);
        inst.v_world = model.shape(inst.coeffs);

        const double yaw = symmetric(rng, deg2rad(ranges.yaw_deg));
        const double pitch = symmetric(rng, deg2rad(ranges.pitch_deg));
        const double roll = symmetric(rng, deg2rad(ranges.roll_deg));
        inst.pose.rotation = rotation_from_euler_zyx(yaw, pitch, roll);

        // Place the shape centroid at a pixel inside the central half of the image.
        const double tz = ranges.depth_min + (ranges.depth_max - ranges.depth_min) * uniform01(rng);
        const double u = 0.5 * ranges.image_width + symmetric(rng, 0.25 * ranges.image_width);
        const double v = 0.5 * ranges.image_height + symmetric(rng, 0.25 * ranges.image_height);
        const RowVector3<double> centre = inst.v_world.points.colwise().mean() * inst.pose.rotation;
        const double z = centre.z() + tz;
        inst.pose.translation << (u - k.cx) * z / k.fx - centre.x(), (v - k.cy) * z / k.fy - centre.y(), tz;

        const VertexSet cam = world_to_camera(inst.v_world, inst.pose);
        if (cam.points.col(2).minCoeff() <= ranges.min_point_depth)
            continue;
        inst.landmarks = perspective_project(cam, k);
        return inst;
    }
    throw RangeInvalid("sample_instance: could not place the face in front of the camera");
}

LandmarkSet2D add_landmark_noise(const SyntheticInstance& inst, double sigma_px, std::uint64_t seed)
{
    if (!(sigma_px >= 0) || !std::isfinite(sigma_px))
        throw RangeInvalid("noise sigma must be finite and non-negative");
    LandmarkSet2D out = inst.landmarks;
    if (sigma_px == 0)
        return out;
    std::mt19937_64 rng(splitmix64(seed));
    std::normal_distribution<double> gauss(0.0, sigma_px);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index c = 0; c < 2; ++c)
            out(i, c) += gauss(rng);
    return out;
}

std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t index)
{
    return splitmix64(splitmix64(seed) + index);
}

io::json to_json(const DatasetConfig& cfg)
{
    const SamplingRanges& r = cfg.ranges;
    return {{"n_instances", cfg.n_instances},
            {"seed", cfg.seed},
            {"sigma_px", cfg.sigma_px},
            {"n_vertices", cfg.n_vertices},
            {"n_basis", cfg.n_basis},
            {"model_seed", cfg.model_seed},
            {"ranges",
             {{"depth_min", r.depth_min},
              {"depth_max", r.depth_max},
              {"yaw_deg", r.yaw_deg},
              {"pitch_deg", r.pitch_deg},
              {"roll_deg", r.roll_deg},
              {"coeff_sigma", r.coeff_sigma},
              {"image_width", r.image_width},
              {"image_height", r.image_height},
              {"min_point_depth", r.min_point_depth},
              {"intrinsics", io::intrinsics_to_json(r.intrinsics)}}}};
}

SyntheticDataset generate_dataset(const DatasetConfig& cfg)
{
    if (cfg.n_instances < 0)
        throw RangeInvalid("instance count must be non-negative");
    validate(cfg.ranges);
    SyntheticDataset ds{cfg, make_shape_model(cfg.n_vertices, cfg.n_basis, cfg.model_seed), {}};
    ds.instances.reserve(static_cast<std::size_t>(cfg.n_instances));
    for (int i = 0; i < cfg.n_instances; ++i) {
        char id[32];
        std::snprintf(id, sizeof(id), "inst_%05d", i);
        const std::uint64_t s = instance_seed(cfg.seed, static_cast<std::uint64_t>(i));
        SyntheticInstance inst = sample_instance(ds.model.shape, cfg.ranges, s, id);
        if (cfg.sigma_px > 0)
            inst.landmarks = add_landmark_noise(inst, cfg.sigma_px, splitmix64(s));
        ds.instances.push_back(std::move(inst));
    }
    return ds;
}

void write_dataset(const SyntheticDataset& dataset, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir.string() + ": " + ec.message());

    io::json ids = io::json::array();
    for (const auto& inst : dataset.instances) {
        io::save_vertices(dir / (inst.id + ".vertices.json"), inst.v_world);
        io::save_pose(dir / (inst.id + ".pose.json"), inst.pose);
        io::save_intrinsics(dir / (inst.id + ".intrinsics.json"), inst.intrinsics);
        io::save_landmarks(dir / (inst.id + ".landmarks.json"), inst.landmarks);
        ids.push_back(inst.id);
    }
    save_topology(dir / "topology.json", dataset.model.topology);
    io::write_json(dir / "manifest.json", {{"ids", ids}, {"generator", to_json(dataset.config)}});
}

std::vector<std::string> dataset_ids(const std::filesystem::path& dir)
{
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        throw IoError("not a directory: " + dir.string());
    std::vector<std::string> ids;
    if (fs::exists(dir / "manifest.json")) {
        const io::json manifest = io::read_json(dir / "manifest.json");
        if (!manifest.contains("ids") || !manifest.at("ids").is_array())
            throw ParseError((dir / "manifest.json").string() + ": missing ids array");
        for (const auto& id : manifest.at("ids")) {
            if (!id.is_string())
                throw ParseError((dir / "manifest.json").string() + ": ids must be strings");
            ids.push_back(id.get<std::string>());
        }
    } else {
        constexpr std::string_view suffix = ".landmarks.json";
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            if (name.size() > suffix.size() && name.ends_with(suffix))
                ids.push_back(name.substr(0, name.size() - suffix.size()));
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

Dataset load_dataset(const std::filesystem::path& dir)
{
    Dataset ds;
    if (std::filesystem::exists(dir / "topology.json"))
        ds.topology = load_topology(dir / "topology.json");
    if (std::filesystem::exists(dir / "manifest.json")) {
        const io::json manifest = io::read_json(dir / "manifest.json");
        const io::json ranges = manifest.value("generator", io::json::object()).value("ranges", io::json::object());
        ds.image_width = ranges.value("image_width", ds.image_width);
        ds.image_height = ranges.value("image_height", ds.image_height);
    }
    for (const auto& id : dataset_ids(dir)) {
        DatasetInstance inst;
        inst.id = id;
        auto vertices = dir / (id + ".vertices.json");
        if (!std::filesystem::exists(vertices))
            vertices = dir / (id + ".vertices.csv");
        if (!std::filesystem::exists(vertices) || !std::filesystem::exists(dir / (id + ".pose.json")))
            throw MissingInstance(id);
        inst.vertices = io::load_vertices(vertices);
        inst.pose = io::load_pose(dir / (id + ".pose.json"));
        inst.intrinsics = io::load_intrinsics(dir / (id + ".intrinsics.json"));
        inst.landmarks = io::load_landmarks(dir / (id + ".landmarks.json"));
        if (inst.landmarks.rows() != inst.vertices.size())
            throw SizeMismatch("instance " + id + ": landmark and vertex counts differ");
        if (ds.topology && inst.vertices.size() != ds.topology->n_vertices())
            throw SizeMismatch("instance " + id + ": vertex count does not match the topology");
        ds.instances.push_back(std::move(inst));
    }
    return ds;
}

} // namespace pface
