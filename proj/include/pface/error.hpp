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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pface {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed files, missing instances, invalid ranges. The CLI maps these to exit code 2.
class InputError : public Error
{
public:
    using Error::Error;
};

/// A numerical failure: degenerate geometry, non-finite values.
class NumericalError : public Error
{
public:
    using Error::Error;
};

class FrameMismatch : public InputError
{
public:
    using InputError::InputError;
};

class SizeMismatch : public InputError
{
public:
    using InputError::InputError;
};

class ParseError : public InputError
{
public:
    using InputError::InputError;
};

class IoError : public InputError
{
public:
    using InputError::InputError;
};

class RangeInvalid : public InputError
{
public:
    using InputError::InputError;
};

class TooFewPoints : public InputError
{
public:
    using InputError::InputError;
};

class EmptyDataset : public InputError
{
public:
    using InputError::InputError;
};

class NotARotation : public InputError
{
public:
    using InputError::InputError;
};

class TopologyInvalid : public InputError
{
public:
    TopologyInvalid(const std::string& reason, std::ptrdiff_t index)
        : InputError("invalid topology: " + reason + " (entry " + std::to_string(index) + ")"), index_(index)
    {
    }

    std::ptrdiff_t index() const noexcept { return index_; }

private:
    std::ptrdiff_t index_;
};

class MissingInstance : public InputError
{
public:
    explicit MissingInstance(std::string id) : InputError("missing instance: " + id), id_(std::move(id)) {}

    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

/// A point at or behind the camera plane (depth <= 1e-9 m).
class BehindCamera : public NumericalError
{
public:
    explicit BehindCamera(std::ptrdiff_t index)
        : NumericalError("point " + std::to_string(index) + " is behind the camera"), index_(index)
    {
    }

    std::ptrdiff_t index() const noexcept { return index_; }

private:
    std::ptrdiff_t index_;
};

class DegenerateEdge : public NumericalError
{
public:
    explicit DegenerateEdge(std::ptrdiff_t index)
        : NumericalError("predicted edge " + std::to_string(index) + " has zero length"), index_(index)
    {
    }

    std::ptrdiff_t index() const noexcept { return index_; }

private:
    std::ptrdiff_t index_;
};

class DegenerateConfiguration : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

class NonFiniteLoss : public NumericalError
{
public:
    NonFiniteLoss(long step, const std::string& detail)
        : NumericalError("non-finite loss at step " + std::to_string(step) + ": " + detail), step_(step)
    {
    }

    long step() const noexcept { return step_; }

private:
    long step_;
};

} // namespace pface
