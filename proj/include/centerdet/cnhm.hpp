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
//
// CNHM: raw detection-head maps on disk.
//
//   offset  size  field
//   0       4     magic "CNHM"
//   4       4     version (1)
//   8       4     num_classes
//   12      4     height
//   16      4     width
//   20      4     stride
//   24      4     input_width  (= width * stride)
//   28      4     input_height (= height * stride)
//   32      ...   heatmap, size_map, offset_map as row-major float32
//
// Every integer and float is little-endian.
#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "centerdet/error.hpp"
#include "centerdet/heatmap_codec.hpp"

namespace centerdet {

inline constexpr std::array<char, 4> kCnhmMagic = {'C', 'N', 'H', 'M'};
inline constexpr std::uint32_t kCnhmVersion = 1;
inline constexpr std::size_t kCnhmHeaderBytes = 32;

struct MapFileHeader {
  std::array<char, 4> magic = kCnhmMagic;
  std::uint32_t version = kCnhmVersion;
  std::uint32_t num_classes = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t stride = 0;
  std::uint32_t input_width = 0;
  std::uint32_t input_height = 0;
};

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos + i]) << (8 * i);
  return v;
}

template <typename Real>
void put_plane(std::vector<std::uint8_t>& out, const std::vector<Real>& values) {
  for (Real value : values) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(value)));
}

template <typename Real>
void get_plane(std::span<const std::uint8_t> in, std::size_t& pos, std::vector<Real>& values,
               std::size_t count) {
  values.resize(count);
  for (std::size_t i = 0; i < count; ++i, pos += 4) {
    values[i] = static_cast<Real>(std::bit_cast<float>(get_u32(in, pos)));
  }
}

}  // namespace detail

/// Serialise maps. Values are stored as float32, so float maps round-trip
/// bit-exactly and double maps are rounded once.
template <typename Real>
std::vector<std::uint8_t> write_maps(const BasicDetectionMaps<Real>& maps) {
  if (!maps.consistent()) {
    throw Error(ErrorKind::DimensionMismatch, "map arrays do not match their dimensions");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kCnhmHeaderBytes +
              4 * (maps.heatmap.size() + maps.size_map.size() + maps.offset_map.size()));
  out.insert(out.end(), kCnhmMagic.begin(), kCnhmMagic.end());
  detail::put_u32(out, kCnhmVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(maps.num_classes));
  detail::put_u32(out, static_cast<std::uint32_t>(maps.height));
  detail::put_u32(out, static_cast<std::uint32_t>(maps.width));
  detail::put_u32(out, static_cast<std::uint32_t>(maps.stride));
  detail::put_u32(out, static_cast<std::uint32_t>(maps.input_width()));
  detail::put_u32(out, static_cast<std::uint32_t>(maps.input_height()));
  detail::put_plane(out, maps.heatmap);
  detail::put_plane(out, maps.size_map);
  detail::put_plane(out, maps.offset_map);
  return out;
}

inline MapFileHeader read_map_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kCnhmHeaderBytes) {
    throw Error(ErrorKind::CorruptFile, "file shorter than the 32-byte header");
  }
  MapFileHeader h;
  std::memcpy(h.magic.data(), bytes.data(), 4);
  if (h.magic != kCnhmMagic) throw Error(ErrorKind::BadMagic, "expected \"CNHM\"");
  h.version = detail::get_u32(bytes, 4);
  if (h.version != kCnhmVersion) {
    throw Error(ErrorKind::UnsupportedVersion, "version " + std::to_string(h.version));
  }
  h.num_classes = detail::get_u32(bytes, 8);
  h.height = detail::get_u32(bytes, 12);
  h.width = detail::get_u32(bytes, 16);
  h.stride = detail::get_u32(bytes, 20);
  h.input_width = detail::get_u32(bytes, 24);
  h.input_height = detail::get_u32(bytes, 28);
  constexpr std::uint64_t kMaxDim = 1u << 20;
  if (h.num_classes == 0 || h.height == 0 || h.width == 0 || h.stride == 0 ||
      h.num_classes > 4096 || h.height > kMaxDim || h.width > kMaxDim || h.stride > kMaxDim) {
    throw Error(ErrorKind::DimensionMismatch, "header dimensions out of range");
  }
  if (std::uint64_t{h.width} * h.stride != h.input_width ||
      std::uint64_t{h.height} * h.stride != h.input_height) {
    throw Error(ErrorKind::DimensionMismatch, "input size is not map size times stride");
  }
  return h;
}

template <typename Real = float>
BasicDetectionMaps<Real> read_maps(std::span<const std::uint8_t> bytes) {
  const MapFileHeader h = read_map_header(bytes);
  const std::uint64_t plane = std::uint64_t{h.height} * h.width;
  const std::uint64_t floats = plane * (std::uint64_t{h.num_classes} + 4);
  if (bytes.size() != kCnhmHeaderBytes + 4 * floats) {
    throw Error(ErrorKind::CorruptFile, "payload is " + std::to_string(bytes.size()) +
                                            " bytes, expected " +
                                            std::to_string(kCnhmHeaderBytes + 4 * floats));
  }
  BasicDetectionMaps<Real> m;
  m.num_classes = static_cast<int>(h.num_classes);
  m.height = static_cast<int>(h.height);
  m.width = static_cast<int>(h.width);
  m.stride = static_cast<int>(h.stride);
  std::size_t pos = kCnhmHeaderBytes;
  detail::get_plane(bytes, pos, m.heatmap, static_cast<std::size_t>(plane * h.num_classes));
  detail::get_plane(bytes, pos, m.size_map, static_cast<std::size_t>(plane * 2));
  detail::get_plane(bytes, pos, m.offset_map, static_cast<std::size_t>(plane * 2));
  return m;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorKind::Io, "short write to " + path.string());
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  write_file_bytes(path, std::span<const std::uint8_t>(
                             reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace centerdet
