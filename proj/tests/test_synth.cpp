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
#include "pface/synth.hpp"
#include "test_util.hpp"

#include "doctest.h"

#include <fstream>
#include <iterator>
#include <numbers>
#include <set>

using namespace pface;
using pface::testing::TempDir;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double triangle_area(const Points3<double>& v, const Triangles& t, Eigen::Index f)
{
    const Eigen::Vector3d a = v.row(t(f, 0)).transpose();
    const Eigen::Vector3d b = v.row(t(f, 1)).transpose();
    const Eigen::Vector3d c = v.row(t(f, 2)).transpose();
    return 0.5 * (skew<double>(b - a) * (c - a)).norm();
}

} // namespace

TEST_CASE("ring triangulation counts")
{
    for (Eigen::Index n : {9, 10, 50, 300, 1220}) {
        const std::vector<int> rings = ring_sizes_for(n);
        int total = 1;
        for (int r : rings)
            total += r;
        CHECK(total == n);
        const Triangles t = ring_cap_triangles(rings);
        CHECK(t.rows() == 2 * n - rings.back() - 2);
    }
    CHECK_THROWS_AS(ring_sizes_for(8), RangeInvalid);
    CHECK_THROWS_AS(ring_cap_triangles({6, 2}), RangeInvalid);
}

TEST_CASE("full-size shape model")
{
    const FaceModel m = make_shape_model(1220, 8, 1);
    CHECK(m.shape.n_vertices() == 1220);
    CHECK(m.topology.n_vertices() == 1220);
    CHECK(m.topology.landmark68().size() == 68);
    const Triangles& t = m.topology.triangles();
    double smallest = 1;
    for (Eigen::Index f = 0; f < t.rows(); ++f)
        smallest = std::min(smallest, triangle_area(m.shape.mean.points, t, f));
    CHECK(smallest > 1e-7);

    // Template centred, proportions of a face.
    CHECK(m.shape.mean.points.colwise().mean().norm() < 1e-15);
    const Eigen::RowVector3d extent =
        m.shape.mean.points.colwise().maxCoeff() - m.shape.mean.points.colwise().minCoeff();
    CHECK(extent(0) == doctest::Approx(0.16).epsilon(0.02));
    CHECK(extent(1) == doctest::Approx(0.22).epsilon(0.02));
    CHECK(extent(2) < 0.1);
}

TEST_CASE("shape basis is orthogonal and free of rigid motions")
{
    const FaceModel m = make_shape_model(500, 12, 3);
    const Eigen::MatrixXd& b = m.shape.basis;
    const Eigen::MatrixXd gram = b.transpose() * b;
    for (Eigen::Index i = 0; i < gram.rows(); ++i)
        for (Eigen::Index j = 0; j < gram.cols(); ++j)
            if (i != j)
                CHECK(std::abs(gram(i, j)) < 1e-9);

    const Points3<double>& p = m.shape.mean.points;
    for (Eigen::Index col = 0; col < b.cols(); ++col) {
        const Points3<double> field = Eigen::Map<const Points3<double>>(b.col(col).data(), 500, 3);
        CHECK(field.colwise().sum().norm() < 1e-9);             // translation
        CHECK(std::abs((field.array() * p.array()).sum()) < 1e-9); // scale
        Eigen::Vector3d moment = Eigen::Vector3d::Zero();       // rotation
        for (Eigen::Index i = 0; i < 500; ++i)
            moment += skew<double>(p.row(i).transpose()) * field.row(i).transpose();
        CHECK(moment.norm() < 1e-9);
    }
    CHECK_THROWS_AS(make_shape_model(500, 39, 3), RangeInvalid);
}

TEST_CASE("shape model is deterministic per seed")
{
    const FaceModel a = make_shape_model(200, 6, 42);
    const FaceModel b = make_shape_model(200, 6, 42);
    const FaceModel c = make_shape_model(200, 6, 43);
    CHECK(a.shape.basis == b.shape.basis);
    CHECK(a.shape.mean.points == b.shape.mean.points);
    CHECK(a.shape.basis != c.shape.basis);
}

TEST_CASE("euler angles compose the documented axis rotations")
{
    using pface::rotation_from_axis_angle;
    const double yaw = 0.4;
    const double pitch = -0.3;
    const double roll = 0.2;
    const Matrix3<double> expected = rotation_from_axis_angle(AxisAngle(pitch, 0, 0)) *
                                     rotation_from_axis_angle(AxisAngle(0, yaw, 0)) *
                                     rotation_from_axis_angle(AxisAngle(0, 0, roll));
    CHECK((rotation_from_euler_zyx(yaw, pitch, roll) - expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((rotation_from_euler_zyx(0.5, 0, 0) - rotation_from_axis_angle(AxisAngle(0, 0.5, 0))).norm() < 1e-15);
}

TEST_CASE("sampled instances stay in range and project exactly")
{
    const FaceModel m = make_shape_model(1220, 8, 1);
    const SamplingRanges ranges;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const SyntheticInstance inst = sample_instance(m.shape, ranges, seed);
        CHECK(inst.pose.translation.z() >= 0.3);
        CHECK(inst.pose.translation.z() <= 0.9);
        CHECK_NOTHROW(validate(inst.pose));
        CHECK((inst.landmarks - project_world(inst.v_world, inst.pose, inst.intrinsics)).cwiseAbs().maxCoeff() <=
              1e-12);
        CHECK(world_to_camera(inst.v_world, inst.pose).points.col(2).minCoeff() > 0.05);
        CHECK(inst.coeffs.cwiseAbs().maxCoeff() <= 3.0);
        const Eigen::RowVector2d centre = inst.landmarks.colwise().mean();
        // The centroid pixel is placed in the central half; the mean of the projections stays near it.
        CHECK(centre.x() > 100);
        CHECK(centre.x() < 700);
    }
    CHECK(ranges.image_width == 800);
    CHECK(ranges.image_height == 800);
}

TEST_CASE("zero coefficients and zero angles give the template")
{
    const FaceModel m = make_shape_model(300, 8, 1);
    SamplingRanges r;
    r.yaw_deg = r.pitch_deg = r.roll_deg = 0;
    r.coeff_sigma = 0;
    const SyntheticInstance inst = sample_instance(m.shape, r, 5);
    CHECK(inst.v_world.points == m.shape.mean.points);
    CHECK(inst.pose.rotation == Matrix3<double>::Identity());
}

TEST_CASE("invalid ranges")
{
    const FaceModel m = make_shape_model(50, 2, 1);
    SamplingRanges r;
    r.depth_min = 0.1;
    CHECK_THROWS_AS(sample_instance(m.shape, r, 0), RangeInvalid);
    r = SamplingRanges{};
    r.depth_max = 2.0;
    CHECK_THROWS_AS(sample_instance(m.shape, r, 0), RangeInvalid);
    r = SamplingRanges{};
    r.depth_min = 0.8;
    r.depth_max = 0.4;
    CHECK_THROWS_AS(sample_instance(m.shape, r, 0), RangeInvalid);
    r = SamplingRanges{};
    r.yaw_deg = 120;
    CHECK_THROWS_AS(sample_instance(m.shape, r, 0), RangeInvalid);
    r = SamplingRanges{};
    r.intrinsics.fx = 0;
    CHECK_THROWS_AS(sample_instance(m.shape, r, 0), RangeInvalid);
}

TEST_CASE("landmark noise")
{
    const FaceModel m = make_shape_model(1220, 8, 1);
    const SyntheticInstance inst = sample_instance(m.shape, SamplingRanges{}, 3);
    CHECK(add_landmark_noise(inst, 0, 9) == inst.landmarks);
    CHECK(add_landmark_noise(inst, 1.5, 9) == add_landmark_noise(inst, 1.5, 9));
    CHECK(add_landmark_noise(inst, 1.5, 9) != add_landmark_noise(inst, 1.5, 10));

    // Pooled per-coordinate spread over 41 draws (100,040 samples).
    const double sigma = 2.0;
    double sum = 0;
    double sum_sq = 0;
    std::size_t count = 0;
    for (std::uint64_t s = 0; s < 41; ++s) {
        const LandmarkSet2D d = add_landmark_noise(inst, sigma, s) - inst.landmarks;
        sum += d.sum();
        sum_sq += d.squaredNorm();
        count += static_cast<std::size_t>(d.size());
    }
    const double mean = sum / static_cast<double>(count);
    const double sd = std::sqrt(sum_sq / static_cast<double>(count) - mean * mean);
    CHECK(sd > 0.99 * sigma);
    CHECK(sd < 1.01 * sigma);
}

TEST_CASE("instance seeds do not collide")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        for (std::uint64_t i = 0; i < 500; ++i)
            seen.insert(instance_seed(seed, i));
    CHECK(seen.size() == 20 * 500);
}

TEST_CASE("dataset files round trip")
{
    TempDir dir("synth");
    DatasetConfig cfg;
    cfg.n_instances = 10;
    cfg.seed = 3;
    const SyntheticDataset ds = generate_dataset(cfg);
    write_dataset(ds, dir.path());

    std::size_t data_files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
        const std::string name = e.path().filename().string();
        data_files += name.rfind("inst_", 0) == 0;
    }
    CHECK(data_files == 40);
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    CHECK(std::filesystem::exists(dir / "topology.json"));
    const io::json manifest = io::read_json(dir / "manifest.json");
    CHECK(manifest.at("ids").size() == 10);
    CHECK(manifest.at("generator").at("seed").get<std::uint64_t>() == 3);

    const Dataset back = load_dataset(dir.path());
    REQUIRE(back.instances.size() == 10);
    REQUIRE(back.topology.has_value());
    CHECK(back.topology->n_triangles() == ds.model.topology.n_triangles());
    for (std::size_t i = 0; i < 10; ++i) {
        const DatasetInstance& inst = back.instances[i];
        CHECK(inst.id == ds.instances[i].id);
        CHECK(inst.vertices.points == ds.instances[i].v_world.points);
        const LandmarkSet2D p = project_world(inst.vertices, inst.pose, inst.intrinsics);
        CHECK((p - inst.landmarks).cwiseAbs().maxCoeff() <= 1e-9);
    }

    const InstanceSet gt = load_instances(dir.path());
    CHECK(score_submission(gt, gt).mean_l_error_mm == 0);
}

TEST_CASE("dataset generation is byte-identical per seed")
{
    TempDir a("synth_a");
    TempDir b("synth_b");
    DatasetConfig cfg;
    cfg.n_instances = 4;
    cfg.sigma_px = 0.5;
    write_dataset(generate_dataset(cfg), a.path());
    write_dataset(generate_dataset(cfg), b.path());
    std::size_t compared = 0;
    for (const auto& e : std::filesystem::directory_iterator(a.path())) {
        CHECK(slurp(e.path()) == slurp(b / e.path().filename().string()));
        ++compared;
    }
    CHECK(compared == 4 * 4 + 2);
}

TEST_CASE("noisy datasets store perturbed landmarks")
{
    DatasetConfig cfg;
    cfg.n_instances = 2;
    cfg.n_vertices = 200;
    const SyntheticDataset exact = generate_dataset(cfg);
    cfg.sigma_px = 1.0;
    const SyntheticDataset noisy = generate_dataset(cfg);
    CHECK(exact.instances[0].v_world.points == noisy.instances[0].v_world.points);
    const double rms = std::sqrt((noisy.instances[0].landmarks - exact.instances[0].landmarks).squaredNorm() / 400);
    CHECK(rms == doctest::Approx(1.0).epsilon(0.15));
}
