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

#include "pface/io.hpp"
#include "test_util.hpp"

#include "doctest.h"

#include <cmath>
#include <fstream>
#include <limits>

using namespace pface;
using pface::testing::TempDir;

TEST_CASE("exact formatting round trips every double")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> uni(-1e3, 1e3);
    for (int i = 0; i < 2000; ++i) {
        const double x = uni(rng) * std::pow(10.0, (i % 21) - 10);
        CHECK(std::stod(io::format_exact(x)) == x);
    }
    CHECK(io::format_exact(2.0) == "2.0");
    CHECK(io::format_exact(0.1) == "0.1");
    CHECK(io::format_9g(1.0 / 3.0) == "0.333333333");
}

TEST_CASE("vertices round trip through json and csv bit for bit")
{
    TempDir dir("io_vertices");
    std::mt19937_64 rng(2);
    const VertexSet v = world_points(pface::testing::random_points(rng, 25));
    for (const char* name : {"v.json", "v.csv"}) {
        io::save_vertices(dir / name, v);
        const VertexSet back = io::load_vertices(dir / name);
        CHECK(back.frame == Frame::world);
        CHECK(back.points == v.points);
    }
}

TEST_CASE("landmarks and poses round trip")
{
    TempDir dir("io_pose");
    std::mt19937_64 rng(3);
    LandmarkSet2D p = pface::testing::random_points(rng, 10).leftCols(2) * 4000;
    io::save_landmarks(dir / "p.csv", p);
    CHECK(io::load_landmarks(dir / "p.csv") == p);
    io::save_landmarks(dir / "p.json", p);
    CHECK(io::load_landmarks(dir / "p.json") == p);

    const Pose6DoF pose = pface::testing::random_pose(rng);
    io::save_pose(dir / "pose.json", pose);
    const Pose6DoF back = io::load_pose(dir / "pose.json");
    CHECK(back.rotation == pose.rotation);
    CHECK(back.translation == pose.translation);

    const CameraIntrinsics k{1000.5, 999.25, 400.125, 380};
    io::save_intrinsics(dir / "k.json", k);
    const CameraIntrinsics kb = io::load_intrinsics(dir / "k.json");
    CHECK(kb.fx == k.fx);
    CHECK(kb.fy == k.fy);
    CHECK(kb.cx == k.cx);
    CHECK(kb.cy == k.cy);
}

TEST_CASE("pose file layout")
{
    Pose6DoF pose;
    pose.translation << 0.1, 0, 0.5;
    const io::json j = io::pose_to_json(pose);
    CHECK(j.at("R").size() == 3);
    CHECK(j.at("R")[0].size() == 3);
    CHECK(j.at("T").size() == 3);
    CHECK(j.at("T")[2].get<double>() == 0.5);
}

TEST_CASE("malformed inputs")
{
    TempDir dir("io_bad");
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream(dir / name) << text;
        return dir / name;
    };
    CHECK_THROWS_AS(io::load_vertices(write("a.json", "[[1,2]]")), ParseError);
    CHECK_THROWS_AS(io::load_vertices(write("b.json", "[[1,2,3")), ParseError);
    CHECK_THROWS_AS(io::load_vertices(write("c.csv", "1,2,x\n")), ParseError);
    CHECK_THROWS_AS(io::load_vertices(write("d.csv", "1,2,3,4\n")), ParseError);
    CHECK_THROWS_AS(io::load_vertices(write("e.txt", "1,2,3\n")), InputError);
    CHECK_THROWS_AS(io::load_vertices(dir / "missing.json"), IoError);
    CHECK_THROWS_AS(io::load_pose(write("p.json", R"({"R": [[1,0,0],[0,1,0]], "T": [0,0,1]})")), ParseError);
    CHECK_THROWS_AS(io::load_pose(write("q.json", R"({"R": [[2,0,0],[0,1,0],[0,0,1]], "T": [0,0,1]})")),
                    NotARotation);
    CHECK_THROWS_AS(io::load_intrinsics(write("k.json", R"({"fx": -1, "fy": 1, "cx": 0, "cy": 0})")), InputError);
}
