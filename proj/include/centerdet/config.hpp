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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "centerdet/error.hpp"
#include "centerdet/heatmap_codec.hpp"
#include "centerdet/oracle.hpp"
#include "centerdet/tta.hpp"
#include "json.hpp"

namespace centerdet {

/// Inference-time input preparation; applied by whatever runs the network.
struct PreprocessSpec {
  int test_resolution = 2048;
  std::array<double, 3> normalization_mean = {0.485, 0.456, 0.406};
  std::array<double, 3> normalization_std = {0.229, 0.224, 0.225};

  void validate(int stride = kDefaultStride) const {
    if (test_resolution < 1 || stride < 1 || test_resolution % stride != 0) {
      throw Error(ErrorKind::InvalidConfig, "test_resolution must be a positive multiple of stride");
    }
  }
};

/// Every tunable of the command-line tool. A JSON file may set any subset
/// using the flag names as keys, e.g. {"scales": [1, 1.5], "nms-iou": 0.6}.
struct RunConfig {
  std::vector<double> scales = {0.5, 0.75, 1.0, 1.25, 1.5};
  bool flip = true;
  int resolution = 2048;
  double nms_iou = 0.5;
  int max_dets = 500;
  int topk = kDefaultTopK;
  double score_floor = 0.0;
  std::uint64_t seed = 0;
  double noise = 0.0;
  std::string format = "markdown";
  int stride = kDefaultStride;
  int jobs = 1;
  std::optional<ImageSize> image_size;

  TtaConfig tta() const {
    TtaConfig cfg;
    cfg.base_resolution = resolution;
    cfg.scales = scales;
    cfg.use_flip = flip;
    cfg.nms_iou = nms_iou;
    cfg.max_dets = max_dets;
    return cfg;
  }

  void validate() const {
    tta().validate();
    if (topk < 1) throw Error(ErrorKind::InvalidConfig, "topk must be >= 1");
    if (!(noise >= 0.0)) throw Error(ErrorKind::InvalidConfig, "noise must be >= 0");
    if (stride < 1) throw Error(ErrorKind::InvalidConfig, "stride must be >= 1");
    if (jobs < 1) throw Error(ErrorKind::InvalidConfig, "jobs must be >= 1");
    if (image_size && (image_size->width < 1 || image_size->height < 1)) {
      throw Error(ErrorKind::InvalidConfig, "image-size must be positive");
    }
  }
};

/// "WxH" -> ImageSize.
inline ImageSize parse_image_size(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument("missing 'x'");
    std::size_t used_w = 0;
    std::size_t used_h = 0;
    const int w = std::stoi(text.substr(0, x), &used_w);
    const int h = std::stoi(text.substr(x + 1), &used_h);
    if (used_w != x || used_h != text.size() - x - 1 || w < 1 || h < 1) {
      throw std::invalid_argument("bad number");
    }
    return {w, h};
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidConfig, "image size must look like 1360x765, got '" + text + "'");
  }
}

inline void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "scales") {
        cfg.scales = value.get<std::vector<double>>();
      } else if (key == "flip") {
        cfg.flip = value.get<bool>();
      } else if (key == "resolution") {
        cfg.resolution = value.get<int>();
      } else if (key == "nms-iou") {
        cfg.nms_iou = value.get<double>();
      } else if (key == "max-dets") {
        cfg.max_dets = value.get<int>();
      } else if (key == "topk") {
        cfg.topk = value.get<int>();
      } else if (key == "score-floor") {
        cfg.score_floor = value.get<double>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "noise") {
        cfg.noise = value.get<double>();
      } else if (key == "format") {
        cfg.format = value.get<std::string>();
      } else if (key == "stride") {
        cfg.stride = value.get<int>();
      } else if (key == "jobs") {
        cfg.jobs = value.get<int>();
      } else if (key == "image-size") {
        cfg.image_size = parse_image_size(value.get<std::string>());
      } else {
        throw Error(ErrorKind::InvalidConfig, "unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, e.what());
  }
}

}  // namespace centerdet
