// Copyright 2026 The gestures Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

namespace gestures {

/// Argument outside the mathematical domain of an operation (gamma < 1,
/// r_max >= 1, e < 2, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Sequence shorter than the requested number of segments.
class ShortSequenceError : public DomainError {
 public:
  ShortSequenceError(std::size_t length, std::size_t segments)
      : DomainError("sequence of length " + std::to_string(length) +
                    " cannot be split into " + std::to_string(segments) +
                    " non-empty segments"),
        length_(length),
        segments_(segments) {}

  std::size_t length() const noexcept { return length_; }
  std::size_t segments() const noexcept { return segments_; }

 private:
  std::size_t length_;
  std::size_t segments_;
};

/// Mismatched tensor or vector dimensions.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent input data (manifests, feature files, run
/// directories).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public DataError {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : DataError(path.string() + ": " + what), path_(path) {}

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

/// Non-finite loss or gradient during training.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad command-line usage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gestures
