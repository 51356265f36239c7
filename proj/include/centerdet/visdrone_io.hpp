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
// VisDrone DET text formats.
//
//   annotation line: left,top,width,height,score_flag,category,truncation,occlusion
//   result line:     left,top,width,height,score,category,-1,-1
//
// Readers accept CRLF line endings, blank lines and a trailing comma.
// Writers emit LF only.
#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "centerdet/error.hpp"
#include "centerdet/geometry.hpp"

namespace centerdet {

inline constexpr int kNumCategories = 12;
inline constexpr int kIgnoreCategory = 0;
inline constexpr int kOthersCategory = 11;
inline constexpr int kFirstEvalCategory = 1;
inline constexpr int kLastEvalCategory = 10;
inline constexpr int kNumEvalClasses = kLastEvalCategory - kFirstEvalCategory + 1;

inline constexpr std::array<std::string_view, kNumCategories> kCategoryNames = {
    "ignored", "pedestrian", "people", "bicycle", "car",   "van",
    "truck",   "tricycle",   "awning-tricycle", "bus", "motor", "others"};

// Column headings used in per-class tables.
inline constexpr std::array<std::string_view, kNumCategories> kCategoryShortNames = {
    "ignored", "ped", "people", "bicycle", "car", "van",
    "truck",   "tricycle", "awn", "bus", "motor", "others"};

constexpr bool is_valid_category(int id) noexcept { return id >= 0 && id < kNumCategories; }
constexpr bool is_evaluated_category(int id) noexcept {
  return id >= kFirstEvalCategory && id <= kLastEvalCategory;
}

inline std::string_view category_name(int id) {
  if (!is_valid_category(id)) throw Error(ErrorKind::InvalidCategory, std::to_string(id));
  return kCategoryNames[static_cast<std::size_t>(id)];
}

inline std::optional<int> category_from_short_name(std::string_view name) {
  for (int i = 0; i < kNumCategories; ++i) {
    if (kCategoryShortNames[static_cast<std::size_t>(i)] == name ||
        kCategoryNames[static_cast<std::size_t>(i)] == name) {
      return i;
    }
  }
  return std::nullopt;
}

struct GroundTruthObject {
  BBox bbox;
  int score_flag = 1;  // 0 marks an ignored entry
  int category = 0;
  int truncation = 0;
  int occlusion = 0;

  bool is_ignore_region() const noexcept { return category == kIgnoreCategory; }

  friend bool operator==(const GroundTruthObject&, const GroundTruthObject&) = default;
};

struct ImageAnnotations {
  std::string image_id;
  std::vector<GroundTruthObject> objects;
};

struct ImageDetections {
  std::string image_id;
  std::vector<Detection> detections;
};

namespace detail {

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  line = trim(line);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  if (fields.size() > 1 && fields.back().empty()) fields.pop_back();
  return fields;
}

inline int parse_int_field(std::string_view field, std::size_t index) {
  int value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw Error(ErrorKind::MalformedLine,
                "field " + std::to_string(index + 1) + " is not an integer: '" +
                    std::string(field) + "'");
  }
  return value;
}

inline double parse_real_field(std::string_view field, std::size_t index) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw Error(ErrorKind::MalformedLine,
                "field " + std::to_string(index + 1) + " is not a number: '" +
                    std::string(field) + "'");
  }
  return value;
}

// Two decimals, trailing zeros stripped: 10 -> "10", 12.5 -> "12.5".
inline std::string format_coord(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s(buf);
  const auto dot = s.find('.');
  if (dot != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

template <typename LineFn>
void for_each_line(std::string_view content, LineFn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    ++line_no;
    const std::string_view line = trim(content.substr(start, end - start));
    if (!line.empty()) fn(line, line_no);
    if (end == content.size()) break;
    start = end + 1;
  }
}

}  // namespace detail

inline GroundTruthObject parse_annotation_line(std::string_view line) {
  const auto fields = detail::split_fields(line);
  if (fields.size() < 8) {
    throw Error(ErrorKind::MalformedLine,
                "expected 8 fields, got " + std::to_string(fields.size()));
  }
  std::array<int, 8> v{};
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const int parsed = detail::parse_int_field(fields[i], i);
    if (i < v.size()) v[i] = parsed;
  }
  if (v[2] <= 0 || v[3] <= 0) {
    throw Error(ErrorKind::InvalidGeometry, "width and height must be positive");
  }
  if (!is_valid_category(v[5])) {
    throw Error(ErrorKind::InvalidCategory, "category " + std::to_string(v[5]));
  }
  GroundTruthObject obj;
  obj.bbox = BBox::from_xywh(v[0], v[1], v[2], v[3]);
  obj.score_flag = v[4];
  obj.category = v[5];
  obj.truncation = v[6];
  obj.occlusion = v[7];
  return obj;
}

/// Parse a whole annotation file; errors carry the 1-based line number.
inline ImageAnnotations load_annotations(std::string_view content, std::string image_id) {
  ImageAnnotations out{std::move(image_id), {}};
  detail::for_each_line(content, [&](std::string_view line, std::size_t line_no) {
    try {
      out.objects.push_back(parse_annotation_line(line));
    } catch (const Error& e) {
      throw LineError(e.kind(), line_no, e.what());
    }
  });
  return out;
}

inline Detection parse_result_line(std::string_view line) {
  const auto fields = detail::split_fields(line);
  if (fields.size() < 6) {
    throw Error(ErrorKind::MalformedLine,
                "expected at least 6 fields, got " + std::to_string(fields.size()));
  }
  const double left = detail::parse_real_field(fields[0], 0);
  const double top = detail::parse_real_field(fields[1], 1);
  const double w = detail::parse_real_field(fields[2], 2);
  const double h = detail::parse_real_field(fields[3], 3);
  const double score = detail::parse_real_field(fields[4], 4);
  const int category = detail::parse_int_field(fields[5], 5);
  for (std::size_t i = 6; i < fields.size(); ++i) detail::parse_int_field(fields[i], i);
  if (w < 0.0 || h < 0.0) throw Error(ErrorKind::InvalidGeometry, "negative width or height");
  if (score < 0.0 || score > 1.0) throw Error(ErrorKind::InvalidScore, std::string(fields[4]));
  if (!is_valid_category(category)) {
    throw Error(ErrorKind::InvalidCategory, "category " + std::to_string(category));
  }
  return Detection{category, BBox::from_xywh(left, top, w, h), score};
}

inline ImageDetections load_detections(std::string_view content, std::string image_id) {
  ImageDetections out{std::move(image_id), {}};
  detail::for_each_line(content, [&](std::string_view line, std::size_t line_no) {
    try {
      out.detections.push_back(parse_result_line(line));
    } catch (const Error& e) {
      throw LineError(e.kind(), line_no, e.what());
    }
  });
  return out;
}

/// Render detections in the challenge submission format, one LF-terminated
/// line each. Coordinates keep up to two decimals; scores keep six.
inline std::string write_detections(std::span<const Detection> dets) {
  std::string out;
  for (const Detection& d : dets) {
    if (!std::isfinite(d.score) || d.score < 0.0 || d.score > 1.0) {
      throw Error(ErrorKind::InvalidScore, "score " + std::to_string(d.score));
    }
    if (!d.bbox.valid()) throw Error(ErrorKind::InvalidGeometry, "box is not finite and ordered");
    char score[32];
    std::snprintf(score, sizeof(score), "%.6f", d.score);
    out += detail::format_coord(d.bbox.x1);
    out += ',';
    out += detail::format_coord(d.bbox.y1);
    out += ',';
    out += detail::format_coord(d.bbox.width());
    out += ',';
    out += detail::format_coord(d.bbox.height());
    out += ',';
    out += score;
    out += ',';
    out += std::to_string(d.class_id);
    out += ",-1,-1\n";
  }
  return out;
}

}  // namespace centerdet
