// Copyright 2026 The centerdet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace centerdet {

enum class ErrorKind {
  // visdrone_io
  MalformedLine,
  InvalidGeometry,
  InvalidCategory,
  InvalidScore,
  // geometry
  NonPositiveScale,
  // heatmap_codec
  InvalidOverlap,
  CenterOutOfBounds,
  ObjectOutOfBounds,
  StrideMismatch,
  // loss
  ShapeMismatch,
  NonPositiveObjectCount,
  CellOutOfBounds,
  // tta
  UnknownScale,
  ProviderFailure,
  // evaluator
  ImageIdMismatch,
  EmptyGroundTruth,
  // runtime
  BadMagic,
  UnsupportedVersion,
  CorruptFile,
  DimensionMismatch,
  UnknownFormat,
  EmptyReport,
  InvalidConfig,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::InvalidGeometry: return "InvalidGeometry";
    case ErrorKind::InvalidCategory: return "InvalidCategory";
    case ErrorKind::InvalidScore: return "InvalidScore";
    case ErrorKind::NonPositiveScale: return "NonPositiveScale";
    case ErrorKind::InvalidOverlap: return "InvalidOverlap";
    case ErrorKind::CenterOutOfBounds: return "CenterOutOfBounds";
    case ErrorKind::ObjectOutOfBounds: return "ObjectOutOfBounds";
    case ErrorKind::StrideMismatch: return "StrideMismatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonPositiveObjectCount: return "NonPositiveObjectCount";
    case ErrorKind::CellOutOfBounds: return "CellOutOfBounds";
    case ErrorKind::UnknownScale: return "UnknownScale";
    case ErrorKind::ProviderFailure: return "ProviderFailure";
    case ErrorKind::ImageIdMismatch: return "ImageIdMismatch";
    case ErrorKind::EmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::CorruptFile: return "CorruptFile";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnknownFormat: return "UnknownFormat";
    case ErrorKind::EmptyReport: return "EmptyReport";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` carries the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Error raised while reading a multi-line text file; remembers the 1-based line.
class LineError : public Error {
 public:
  LineError(ErrorKind kind, std::size_t line, const std::string& what)
      : Error(kind, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace centerdet
