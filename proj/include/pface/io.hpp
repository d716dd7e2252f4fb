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

#include "json.hpp"

#include <filesystem>
#include <string>

/**
 * File formats shared by the CLI and the dataset writer.
 *
 *   pose        {"R": [[..],[..],[..]], "T": [tx, ty, tz]}      meters
 *   intrinsics  {"fx": .., "fy": .., "cx": .., "cy": ..}         pixels
 *   vertices    [[x, y, z], ...] (.json) or "x,y,z" rows (.csv)  meters
 *   landmarks   [[u, v], ...]    (.json) or "u,v" rows (.csv)    pixels
 *
 * Data files are written with shortest round-trip decimals, so a load after a
 * save returns bit-identical doubles.
 */
namespace pface::io {

namespace fs = std::filesystem;
using nlohmann::json;

/// Shortest decimal that parses back to exactly x.
std::string format_exact(double x);

/// Nine significant digits, %.9g style. Used for reports and OBJ output.
std::string format_9g(double x);

json read_json(const fs::path& path);
void write_json(const fs::path& path, const json& value);
void write_text(const fs::path& path, const std::string& text);

json pose_to_json(const Pose6DoF& pose);
Pose6DoF pose_from_json(const json& j);
Pose6DoF load_pose(const fs::path& path);
void save_pose(const fs::path& path, const Pose6DoF& pose);

json intrinsics_to_json(const CameraIntrinsics& k);
CameraIntrinsics intrinsics_from_json(const json& j);
CameraIntrinsics load_intrinsics(const fs::path& path);
void save_intrinsics(const fs::path& path, const CameraIntrinsics& k);

/// Loads an N x 3 world-frame vertex set; format picked by extension.
VertexSet load_vertices(const fs::path& path);
void save_vertices(const fs::path& path, const VertexSet& v);

LandmarkSet2D load_landmarks(const fs::path& path);
void save_landmarks(const fs::path& path, const LandmarkSet2D& p);

} // namespace pface::io
