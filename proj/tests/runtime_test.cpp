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
#include <gtest/gtest.h>

#include <cstring>
#include <string>
#include <vector>

#include "centerdet/cnhm.hpp"
#include "centerdet/config.hpp"
#include "centerdet/oracle.hpp"
#include "centerdet/report.hpp"
#include "test_support.hpp"

namespace centerdet {
namespace {

const std::filesystem::path kData = CENTERDET_DATA_DIR;

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

void put_u32(std::vector<std::uint8_t>& b, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

TEST(Cnhm, TinyMapLayout) {
  auto m = DetectionMapsF32::zeros(1, 2, 2, 4);
  m.heatmap = {0.25f, 0.5f, 0.75f, 1.0f};
  const auto bytes = write_maps(m);
  ASSERT_EQ(bytes.size(), 112u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "CNHM");
  const std::vector<std::uint8_t> version = {1, 0, 0, 0};
  EXPECT_TRUE(std::equal(version.begin(), version.end(), bytes.begin() + 4));
  EXPECT_EQ(bytes[24], 8);  // input width, little-endian
  EXPECT_EQ(bytes[28], 8);
  // 0.25f = 0x3e800000, stored low byte first
  EXPECT_EQ(bytes[32], 0x00);
  EXPECT_EQ(bytes[34], 0x80);
  EXPECT_EQ(bytes[35], 0x3e);
  const auto h = read_map_header(bytes);
  EXPECT_EQ(h.num_classes, 1u);
  EXPECT_EQ(h.stride, 4u);
}

TEST(Cnhm, RoundTripIsBitExact) {
  testing::Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = testing::random_maps(rng, testing::uniform_int(rng, 1, 10),
                                        testing::uniform_int(rng, 1, 20),
                                        testing::uniform_int(rng, 1, 20),
                                        testing::uniform_int(rng, 1, 8));
    const auto back = read_maps(write_maps(m));
    EXPECT_EQ(back, m);
    EXPECT_EQ(std::memcmp(back.heatmap.data(), m.heatmap.data(), 4 * m.heatmap.size()), 0);
  }
}

TEST(Cnhm, DoubleMapsAreRoundedOnce) {
  auto m = DetectionMaps::zeros(1, 1, 1, 4);
  m.heatmap[0] = 0.1;
  const auto back = read_maps<double>(write_maps(m));
  EXPECT_EQ(back.heatmap[0], static_cast<double>(0.1f));
}

TEST(Cnhm, ReadErrors) {
  const auto good = write_maps(DetectionMapsF32::zeros(1, 2, 2, 4));
  EXPECT_EQ(kind_of([&] {
              read_maps(std::span<const std::uint8_t>(good.data(), good.size() - 1));
            }),
            ErrorKind::CorruptFile);
  EXPECT_EQ(kind_of([&] { read_maps(std::span<const std::uint8_t>(good.data(), 20)); }),
            ErrorKind::CorruptFile);
  auto extra = good;
  extra.push_back(0);
  EXPECT_EQ(kind_of([&] { read_maps(extra); }), ErrorKind::CorruptFile);

  auto bad = good;
  std::memcpy(bad.data(), "XXXX", 4);
  EXPECT_EQ(kind_of([&] { read_maps(bad); }), ErrorKind::BadMagic);
  bad = good;
  put_u32(bad, 4, 2);
  EXPECT_EQ(kind_of([&] { read_maps(bad); }), ErrorKind::UnsupportedVersion);
  bad = good;
  put_u32(bad, 24, 9);
  EXPECT_EQ(kind_of([&] { read_maps(bad); }), ErrorKind::DimensionMismatch);
  bad = good;
  put_u32(bad, 8, 0);
  EXPECT_EQ(kind_of([&] { read_maps(bad); }), ErrorKind::DimensionMismatch);
}

TEST(Cnhm, FileHelpers) {
  const auto dir = std::filesystem::temp_directory_path() / "centerdet_runtime_test";
  std::filesystem::create_directories(dir);
  const auto m = DetectionMapsF32::zeros(2, 3, 4, 4);
  write_file_bytes(dir / "m.cnhm", write_maps(m));
  EXPECT_EQ(read_maps(read_file_bytes(dir / "m.cnhm")), m);
  EXPECT_EQ(kind_of([&] { read_file_bytes(dir / "missing.cnhm"); }), ErrorKind::Io);
  std::filesystem::remove_all(dir);
}

TEST(Oracle, NoiselessUnitScaleIsEncode) {
  testing::Rng rng(1);
  testing::SceneSpec spec;
  spec.image_size = 256;
  const auto scene = testing::random_scene(rng, spec);
  TtaConfig cfg;
  cfg.base_resolution = 256;
  const auto provider = oracle_provider(testing::as_annotations("x", scene), cfg, 0.0, 9);
  EXPECT_EQ(provider(1.0, false), encode_targets(scene, 256, 256));
}

TEST(Oracle, SeededNoiseIsDeterministic) {
  testing::Rng rng(2);
  testing::SceneSpec spec;
  spec.image_size = 256;
  const auto ann = testing::as_annotations("x", testing::random_scene(rng, spec));
  TtaConfig cfg;
  cfg.base_resolution = 256;
  const auto a = oracle_provider(ann, cfg, 0.05, 42);
  const auto b = oracle_provider(ann, cfg, 0.05, 42);
  const auto c = oracle_provider(ann, cfg, 0.05, 43);
  const auto ma = a(0.5, true);
  EXPECT_EQ(ma, b(0.5, true));
  EXPECT_NE(ma.heatmap, c(0.5, true).heatmap);
  const auto clean = oracle_provider(ann, cfg, 0.0, 42)(0.5, true);
  for (std::size_t i = 0; i < ma.heatmap.size(); ++i) {
    EXPECT_GE(ma.heatmap[i], 0.0);
    EXPECT_LE(ma.heatmap[i], 1.0);
    EXPECT_LE(std::abs(ma.heatmap[i] - clean.heatmap[i]), 0.05 + 1e-15);
  }
  EXPECT_EQ(ma.size_map, clean.size_map);
}

TEST(Oracle, StretchesNonSquareImages) {
  GroundTruthObject o;
  o.category = 4;
  o.bbox = {680, 191.25, 1360, 382.5};
  TtaConfig cfg;
  const auto m = oracle_provider(ImageAnnotations{"x", {o}}, cfg, 0.0, 0, 4, ImageSize{1360, 765})(1.0, false);
  const auto dets = decode(m, 10, 0.5);
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_NEAR(dets[0].bbox.x1, 1024, 1e-9);
  EXPECT_NEAR(dets[0].bbox.y2, 1024, 1e-9);
}

TEST(Oracle, ScaledResolution) {
  EXPECT_EQ(scaled_resolution(2048, 0.75, 4), 1536);
  EXPECT_EQ(scaled_resolution(512, 2.25, 4), 1152);
  EXPECT_EQ(kind_of([] { scaled_resolution(512, 0.3, 4); }), ErrorKind::StrideMismatch);
  EXPECT_EQ(kind_of([] { scaled_resolution(512, 0.0, 4); }), ErrorKind::UnknownScale);
}

std::vector<SweepRow> load_rows(const std::string& name) {
  return rows_from_json(nlohmann::json::parse(read_text_file(kData / "fixtures" / name)));
}

SweepRow ours() {
  SweepRow r = load_rows("track1_leaderboard.json")[6];
  r.per_class_ap = load_rows("per_class_ap.json")[0].per_class_ap;
  return r;
}

TEST(Report, MarkdownReproducesPublishedRows) {
  const auto rows = load_rows("published_rows.json");
  EXPECT_EQ(render_report(rows, ReportFormat::Markdown),
            read_text_file(kData / "fixtures" / "published_rows.md"));
}

TEST(Report, MarkdownSummaryRow) {
  const auto rows = load_rows("track1_leaderboard.json");
  const std::string md = render_report(rows, ReportFormat::Markdown);
  EXPECT_NE(md.find("| CN-DhVaSa(ours) | 27.83 | 50.73 | 26.77 | 0.00 | 0.18 | 7.78 | 46.81 |\n"),
            std::string::npos);
  EXPECT_NE(md.find("| DPNet-ensemble | 29.62 | 54.00 | 28.70 | 0.58 | 3.69 | 17.10 | 42.37 |\n"),
            std::string::npos);
  EXPECT_EQ(md.find("| Input |"), std::string::npos);
}

TEST(Report, Csv) {
  const std::vector<SweepRow> rows = {ours()};
  EXPECT_EQ(render_report(rows, ReportFormat::Csv),
            "label,AP,AP50,AP75,AR1,AR10,AR100,AR500,ped,people,bicycle,car,van,truck,tricycle,"
            "awn,bus,motor\n"
            "CN-DhVaSa(ours),27.83,50.73,26.77,0.00,0.18,7.78,46.81,31.05,12.99,9.08,51.92,38.33,"
            "31.14,24.24,21.06,40.94,20.35\n");
}

TEST(Report, SvgBarChart) {
  const auto rows = load_rows("per_class_ap.json");
  const std::vector<SweepRow> image = {rows[0]};
  const std::string svg = render_report(image, ReportFormat::Svg);
  EXPECT_EQ(svg.rfind("<svg ", 0), 0u);
  std::size_t bars = 0;
  std::string tallest;
  double best = -1.0;
  for (std::size_t pos = svg.find("<rect class=\"bar\""); pos != std::string::npos;
       pos = svg.find("<rect class=\"bar\"", pos + 1)) {
    ++bars;
    const auto cls = svg.find("data-class=\"", pos) + 12;
    const std::string name = svg.substr(cls, svg.find('"', cls) - cls);
    const auto hp = svg.find("height=\"", pos) + 8;
    const double h = std::stod(svg.substr(hp, svg.find('"', hp) - hp));
    if (h > best) {
      best = h;
      tallest = name;
    }
  }
  EXPECT_EQ(bars, 10u);
  EXPECT_EQ(tallest, "car");
  EXPECT_EQ(render_report(image, ReportFormat::Svg), svg);
  const std::vector<SweepRow> summary_only = {load_rows("track1_leaderboard.json")[0]};
  EXPECT_EQ(kind_of([&] { render_report(summary_only, ReportFormat::Svg); }), ErrorKind::EmptyReport);
}

TEST(Report, Errors) {
  EXPECT_EQ(kind_of([] { render_report({}, ReportFormat::Markdown); }), ErrorKind::EmptyReport);
  EXPECT_EQ(kind_of([] { parse_report_format("pdf"); }), ErrorKind::UnknownFormat);
  EXPECT_EQ(parse_report_format("md"), ReportFormat::Markdown);
}

TEST(Report, JsonRoundTrip) {
  const auto rows = load_rows("track1_leaderboard.json");
  const auto back = rows_from_json(rows_to_json(rows));
  ASSERT_EQ(back.size(), rows.size());
  EXPECT_EQ(render_report(back, ReportFormat::Markdown), render_report(rows, ReportFormat::Markdown));
}

TEST(Config, JsonKeysMirrorFlags) {
  RunConfig cfg;
  apply_json(cfg, nlohmann::json::parse(read_text_file(kData / "configs" / "512_s1-2.5.json")));
  EXPECT_EQ(cfg.resolution, 512);
  EXPECT_EQ(cfg.scales, scale_grid(1.0, 2.5));
  EXPECT_TRUE(cfg.flip);
  EXPECT_NO_THROW(cfg.validate());
  apply_json(cfg, nlohmann::json{{"nms-iou", 0.6}, {"image-size", "1360x765"}, {"seed", 7}});
  EXPECT_EQ(cfg.nms_iou, 0.6);
  EXPECT_EQ(cfg.image_size->width, 1360);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(kind_of([&] { apply_json(cfg, nlohmann::json{{"bogus", 1}}); }), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([&] { apply_json(cfg, nlohmann::json{{"topk", "many"}}); }),
            ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([] { parse_image_size("1360*765"); }), ErrorKind::InvalidConfig);
}

TEST(Config, PreprocessDefaults) {
  const PreprocessSpec p;
  EXPECT_EQ(p.test_resolution, 2048);
  EXPECT_EQ(p.normalization_mean[0], 0.485);
  EXPECT_EQ(p.normalization_std[2], 0.225);
  EXPECT_NO_THROW(p.validate(4));
  EXPECT_THROW(p.validate(3), Error);
}

TEST(AnnotationFixtures, ParseAndSurviveRoundTrip) {
  for (const auto& entry : std::filesystem::directory_iterator(kData / "fixtures" / "annotations")) {
    const std::string text = read_text_file(entry.path());
    const ImageAnnotations a = load_annotations(text, entry.path().stem().string());
    // Ground truth written as detections and read back keeps every box.
    std::vector<Detection> as_dets;
    for (const auto& o : a.objects) as_dets.push_back({o.category, o.bbox, 1.0});
    const auto back = load_detections(write_detections(as_dets), "x").detections;
    EXPECT_EQ(back, as_dets) << entry.path();
  }
}

}  // namespace
}  // namespace centerdet
