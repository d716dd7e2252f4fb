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

#include <filesystem>
#include <random>
#include <string>

namespace pface::testing {

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir
{
public:
    explicit TempDir(const std::string& tag)
    {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("pface_" + tag + "_" + std::to_string(rd()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline AxisAngle random_axis_angle(std::mt19937_64& rng, double max_angle)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, max_angle);
    AxisAngle axis(gauss(rng), gauss(rng), gauss(rng));
    return axis.normalized() * uni(rng);
}

inline Pose6DoF random_pose(std::mt19937_64& rng, double depth = 0.6)
{
    std::uniform_real_distribution<double> uni(-0.05, 0.05);
    Pose6DoF pose;
    pose.rotation = rotation_from_axis_angle(random_axis_angle(rng, 1.0));
    pose.translation << uni(rng), uni(rng), depth;
    return pose;
}

inline Points3<double> random_points(std::mt19937_64& rng, Eigen::Index n, double scale = 0.1)
{
    std::uniform_real_distribution<double> uni(-scale, scale);
    Points3<double> p(n, 3);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c)
            p(i, c) = uni(rng);
    return p;
}

} // namespace pface::testing
