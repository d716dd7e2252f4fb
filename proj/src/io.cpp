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

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace pface::io {

namespace {

std::string lower_extension(const fs::path& path)
{
    std::string ext = path.extension().string();
    for (auto& ch : ext)
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return ext;
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double number_at(const json& j, const std::string& what)
{
    if (!j.is_number())
        throw ParseError(what + ": expected a number");
    return j.get<double>();
}

template <int Cols>
Eigen::Matrix<double, Eigen::Dynamic, Cols, Eigen::RowMajor> rows_from_json(const json& j, const std::string& what)
{
    if (!j.is_array())
        throw ParseError(what + ": expected an array of rows");
    Eigen::Matrix<double, Eigen::Dynamic, Cols, Eigen::RowMajor> m(static_cast<Eigen::Index>(j.size()), Cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& row = j[i];
        if (!row.is_array() || row.size() != Cols)
            throw ParseError(what + ": row " + std::to_string(i) + " must have " + std::to_string(Cols) + " entries");
        for (int c = 0; c < Cols; ++c)
            m(static_cast<Eigen::Index>(i), c) = number_at(row[c], what);
    }
    if (!m.allFinite())
        throw ParseError(what + ": non-finite coordinate");
    return m;
}

template <int Cols>
Eigen::Matrix<double, Eigen::Dynamic, Cols, Eigen::RowMajor> rows_from_csv(const std::string& text, const std::string& what)
{
    std::vector<double> values;
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::size_t pos = 0;
        for (int c = 0; c < Cols; ++c) {
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t'))
                ++pos;
            double x = 0;
            const char* first = line.data() + pos;
            const char* last = line.data() + line.size();
            auto [ptr, ec] = std::from_chars(first, last, x);
            if (ec != std::errc())
                throw ParseError(what + ": bad number on line " + std::to_string(line_no));
            pos = static_cast<std::size_t>(ptr - line.data());
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r'))
                ++pos;
            if (c + 1 < Cols) {
                if (pos >= line.size() || line[pos] != ',')
                    throw ParseError(what + ": expected " + std::to_string(Cols) + " columns on line " +
                                     std::to_string(line_no));
                ++pos;
            } else if (pos != line.size()) {
                throw ParseError(what + ": trailing data on line " + std::to_string(line_no));
            }
            values.push_back(x);
        }
    }
    const auto n = static_cast<Eigen::Index>(values.size() / Cols);
    Eigen::Matrix<double, Eigen::Dynamic, Cols, Eigen::RowMajor> m(n, Cols);
    std::copy(values.begin(), values.end(), m.data());
    if (!m.allFinite())
        throw ParseError(what + ": non-finite coordinate");
    return m;
}

template <typename Matrix>
std::string rows_to_json_text(const Matrix& m)
{
    std::string out = "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out += i == 0 ? "\n  [" : ",\n  [";
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c)
                out += ", ";
            out += format_exact(m(i, c));
        }
        out += "]";
    }
    out += m.rows() ? "\n]\n" : "]\n";
    return out;
}

template <typename Matrix>
std::string rows_to_csv_text(const Matrix& m)
{
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c)
                out += ',';
            out += format_exact(m(i, c));
        }
        out += '\n';
    }
    return out;
}

template <int Cols>
Eigen::Matrix<double, Eigen::Dynamic, Cols, Eigen::RowMajor> load_rows(const fs::path& path)
{
    const std::string ext = lower_extension(path);
    if (ext == ".csv")
        return rows_from_csv<Cols>(read_text(path), path.string());
    if (ext == ".json")
        return rows_from_json<Cols>(read_json(path), path.string());
    throw InputError("unsupported point file extension: " + path.string());
}

template <typename Matrix>
void save_rows(const fs::path& path, const Matrix& m)
{
    const std::string ext = lower_extension(path);
    if (ext == ".csv")
        write_text(path, rows_to_csv_text(m));
    else if (ext == ".json")
        write_text(path, rows_to_json_text(m));
    else
        throw InputError("unsupported point file extension: " + path.string());
}

} // namespace

std::string format_exact(double x)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    std::string s(buf, ptr);
    // Keep integral values recognizable as floating point in JSON.
    if (s.find_first_of(".eninf") == std::string::npos)
        s += ".0";
    return s;
}

std::string format_9g(double x)
{
    if (x == 0)
        return "0";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 9);
    return {buf, ptr};
}

json read_json(const fs::path& path)
{
    const std::string text = read_text(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << text;
    if (!out)
        throw IoError("write failed for " + path.string());
}

void write_json(const fs::path& path, const json& value)
{
    write_text(path, value.dump(2) + "\n");
}

json pose_to_json(const Pose6DoF& pose)
{
    json r = json::array();
    for (int i = 0; i < 3; ++i)
        r.push_back({pose.rotation(i, 0), pose.rotation(i, 1), pose.rotation(i, 2)});
    return {{"R", r}, {"T", {pose.translation(0), pose.translation(1), pose.translation(2)}}};
}

Pose6DoF pose_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("R") || !j.contains("T"))
        throw ParseError("pose: expected an object with R and T");
    const json& r = j.at("R");
    const json& t = j.at("T");
    if (!r.is_array() || r.size() != 3 || !t.is_array() || t.size() != 3)
        throw ParseError("pose: R must be 3x3 and T must have 3 entries");
    Pose6DoF pose;
    for (int i = 0; i < 3; ++i) {
        if (!r[i].is_array() || r[i].size() != 3)
            throw ParseError("pose: R must be 3x3");
        for (int c = 0; c < 3; ++c)
            pose.rotation(i, c) = number_at(r[i][c], "pose.R");
        pose.translation(i) = number_at(t[i], "pose.T");
    }
    validate(pose, 1e-6);
    return pose;
}

Pose6DoF load_pose(const fs::path& path)
{
    try {
        return pose_from_json(read_json(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void save_pose(const fs::path& path, const Pose6DoF& pose)
{
    write_json(path, pose_to_json(pose));
}

json intrinsics_to_json(const CameraIntrinsics& k)
{
    return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}};
}

CameraIntrinsics intrinsics_from_json(const json& j)
{
    if (!j.is_object())
        throw ParseError("intrinsics: expected an object");
    CameraIntrinsics k;
    for (const char* key : {"fx", "fy", "cx", "cy"})
        if (!j.contains(key))
            throw ParseError(std::string("intrinsics: missing ") + key);
    k.fx = number_at(j.at("fx"), "intrinsics.fx");
    k.fy = number_at(j.at("fy"), "intrinsics.fy");
    k.cx = number_at(j.at("cx"), "intrinsics.cx");
    k.cy = number_at(j.at("cy"), "intrinsics.cy");
    validate(k);
    return k;
}

CameraIntrinsics load_intrinsics(const fs::path& path)
{
    return intrinsics_from_json(read_json(path));
}

void save_intrinsics(const fs::path& path, const CameraIntrinsics& k)
{
    write_json(path, intrinsics_to_json(k));
}

VertexSet load_vertices(const fs::path& path)
{
    return {load_rows<3>(path), Frame::world};
}

void save_vertices(const fs::path& path, const VertexSet& v)
{
    save_rows(path, v.points);
}

LandmarkSet2D load_landmarks(const fs::path& path)
{
    return load_rows<2>(path);
}

void save_landmarks(const fs::path& path, const LandmarkSet2D& p)
{
    save_rows(path, p);
}

} // namespace pface::io
