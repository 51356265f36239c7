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
// Sweeps a few test-time augmentation settings over noisy oracle maps of
// random scenes and prints the scores as a markdown table.
//
//   tta_sweep [num_images] [noise]
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "centerdet.hpp"

namespace {

using namespace centerdet;

std::vector<ImageAnnotations> random_images(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> side(8.0, 120.0);
  std::uniform_real_distribution<double> pos(0.0, 1900.0);
  std::uniform_int_distribution<int> cls(1, 10);
  std::uniform_int_distribution<int> count(5, 40);
  std::vector<ImageAnnotations> out;
  for (int i = 0; i < n; ++i) {
    ImageAnnotations ann{"img" + std::to_string(i), {}};
    const int k = count(rng);
    for (int j = 0; j < k; ++j) {
      GroundTruthObject o;
      const double x = pos(rng);
      const double y = pos(rng);
      o.bbox = {x, y, x + side(rng), y + side(rng)};
      o.category = cls(rng);
      ann.objects.push_back(o);
    }
    out.push_back(std::move(ann));
  }
  return out;
}

SweepRow score(const std::string& label, const std::vector<ImageAnnotations>& images,
               const TtaConfig& cfg, double noise) {
  std::vector<ImageDetections> dets;
  for (const ImageAnnotations& ann : images) {
    const auto provider = oracle_provider<float>(ann, cfg, noise, 17);
    dets.push_back({ann.image_id, run_tta(provider, cfg, kDefaultTopK, 0.05)});
  }
  return make_row(label, evaluate(dets, images));
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 4;
  const double noise = argc > 2 ? std::atof(argv[2]) : 0.4;
  const auto images = random_images(n, 2019);

  struct Setting {
    std::string label;
    double lo, hi;
    bool flip;
  };
  const std::vector<Setting> settings = {{"scale 1, no flip", 1.0, 1.0, false},
                                         {"scale 1, flip", 1.0, 1.0, true},
                                         {"scales 0.5-1.5, flip", 0.5, 1.5, true},
                                         {"scales 1-2, flip", 1.0, 2.0, true}};
  std::vector<SweepRow> rows;
  for (const Setting& s : settings) {
    TtaConfig cfg;
    cfg.scales = scale_grid(s.lo, s.hi);
    cfg.use_flip = s.flip;
    SweepRow row = score(s.label, images, cfg, noise);
    row.per_class_ap.clear();
    rows.push_back(std::move(row));
    std::fprintf(stderr, "done: %s\n", s.label.c_str());
  }
  std::cout << render_report(rows, ReportFormat::Markdown);
  return 0;
}
