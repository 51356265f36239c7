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
// centerdet command line.
//
//   encode    annotations -> oracle maps (one .cnhm per scale and flip)
//   decode    .cnhm maps  -> VisDrone result files
//   eval      result files + annotations -> metrics
//   tta-eval  .cnhm maps + annotations -> fused detections -> metrics
//   report    metric row files (JSON) -> markdown / csv / svg
//
// Exit status: 0 success, 1 validation error, 2 I/O error.
#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "centerdet.hpp"

namespace centerdet::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Shortest round-trip text of a scale: 0.5 -> "0.5", 1.0 -> "1".
inline std::string scale_text(double scale) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), scale);
  return std::string(buf, res.ptr);
}

/// `<image_id>_s<scale>_<f|n>.cnhm`
inline std::string map_file_name(const std::string& image_id, double scale, bool flipped) {
  return image_id + "_s" + scale_text(scale) + "_" + (flipped ? "f" : "n") + ".cnhm";
}

/// Files with `extension` in `path` (or `path` itself when it is a file), sorted.
inline std::vector<fs::path> list_files(const fs::path& path, const std::string& extension) {
  if (!fs::exists(path)) throw Error(ErrorKind::Io, "no such file or directory: " + path.string());
  std::vector<fs::path> out;
  if (fs::is_regular_file(path)) {
    out.push_back(path);
    return out;
  }
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<ImageAnnotations> load_annotation_dir(const fs::path& path) {
  std::vector<ImageAnnotations> out;
  for (const fs::path& file : list_files(path, ".txt")) {
    try {
      out.push_back(load_annotations(read_text_file(file), file.stem().string()));
    } catch (const LineError& e) {
      throw Error(e.kind(), file.string() + ": " + e.what());
    }
  }
  return out;
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorKind::Io, "cannot create " + dir.string());
}

/// Run fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(jobs, static_cast<int>(n))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
  } else {
    write_text_file(out_path, text);
  }
}

// Print metrics in the requested format, or as JSON rows with --format json.
inline void emit_metrics(const SweepRow& row, const RunConfig& cfg, const std::string& out_path,
                         std::ostream& out) {
  const std::vector<SweepRow> rows = {row};
  if (cfg.format == "json") {
    emit(rows_to_json(rows).dump(2) + "\n", out_path, out);
  } else {
    emit(render_report(rows, parse_report_format(cfg.format)), out_path, out);
  }
}

struct Paths {
  std::string annotations;
  std::string detections;
  std::string maps;
  std::string out;
  std::string results;
  std::string label;
  std::vector<std::string> inputs;
  std::string config;
  std::string image_size;
};

inline void cmd_encode(const RunConfig& cfg, const Paths& p, std::ostream& out) {
  const TtaConfig tta = cfg.tta();
  const auto images = load_annotation_dir(p.annotations);
  ensure_dir(p.out);
  std::vector<std::size_t> written(images.size(), 0);
  parallel_for(images.size(), cfg.jobs, [&](std::size_t i) {
    const auto provider =
        oracle_provider<double>(images[i], tta, cfg.noise, cfg.seed, cfg.stride, cfg.image_size);
    for (double scale : tta.scales) {
      for (bool flipped : {false, true}) {
        if (flipped && !tta.use_flip) continue;
        const auto bytes = write_maps(provider(scale, flipped));
        write_file_bytes(fs::path(p.out) / map_file_name(images[i].image_id, scale, flipped), bytes);
        ++written[i];
      }
    }
  });
  std::size_t total = 0;
  for (std::size_t n : written) total += n;
  out << "encoded " << images.size() << " images into " << total << " map files\n";
}

inline void cmd_decode(const RunConfig& cfg, const Paths& p, std::ostream& out) {
  const auto files = list_files(p.maps, ".cnhm");
  ensure_dir(p.out);
  parallel_for(files.size(), cfg.jobs, [&](std::size_t i) {
    const auto maps = read_maps<float>(read_file_bytes(files[i]));
    const auto dets = decode(maps, cfg.topk, cfg.score_floor);
    write_text_file(fs::path(p.out) / (files[i].stem().string() + ".txt"), write_detections(dets));
  });
  out << "decoded " << files.size() << " map files\n";
}

inline void cmd_eval(const RunConfig& cfg, const Paths& p, std::ostream& out) {
  const auto annotations = load_annotation_dir(p.annotations);
  std::vector<ImageDetections> detections;
  for (const ImageAnnotations& a : annotations) {
    const fs::path file = fs::path(p.detections) / (a.image_id + ".txt");
    if (!fs::exists(file)) continue;
    try {
      detections.push_back(load_detections(read_text_file(file), a.image_id));
    } catch (const LineError& e) {
      throw Error(e.kind(), file.string() + ": " + e.what());
    }
  }
  EvalConfig ecfg;
  const EvalResult r = evaluate(detections, annotations, ecfg);
  emit_metrics(make_row(p.label.empty() ? "eval" : p.label, r), cfg, p.out, out);
}

inline void cmd_tta_eval(const RunConfig& cfg, const Paths& p, std::ostream& out) {
  const TtaConfig tta = cfg.tta();
  const auto annotations = load_annotation_dir(p.annotations);
  std::vector<ImageDetections> detections(annotations.size());
  if (!p.results.empty()) ensure_dir(p.results);
  parallel_for(annotations.size(), cfg.jobs, [&](std::size_t i) {
    const std::string id = annotations[i].image_id;
    const fs::path dir = p.maps;
    MapProvider<float> provider = [&dir, &id](double scale, bool flipped) {
      const fs::path file = dir / map_file_name(id, scale, flipped);
      if (!fs::exists(file)) {
        throw Error(ErrorKind::ProviderFailure, "missing map file " + file.string());
      }
      return read_maps<float>(read_file_bytes(file));
    };
    auto dets = run_tta(provider, tta, cfg.topk, cfg.score_floor);
    if (cfg.image_size) {
      dets = base_to_image(dets, tta.base_resolution, cfg.image_size->width, cfg.image_size->height);
    }
    if (!p.results.empty()) write_text_file(fs::path(p.results) / (id + ".txt"), write_detections(dets));
    detections[i] = ImageDetections{id, std::move(dets)};
  });
  const EvalResult r = evaluate(detections, annotations, EvalConfig{});
  emit_metrics(make_row(p.label.empty() ? "tta-eval" : p.label, r), cfg, p.out, out);
}

inline void cmd_report(const RunConfig& cfg, const Paths& p, std::ostream& out) {
  std::vector<SweepRow> rows;
  for (const std::string& input : p.inputs) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_text_file(input));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::InvalidConfig, input + ": " + e.what());
    }
    auto part = rows_from_json(doc);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  emit(render_report(rows, parse_report_format(cfg.format)), p.out, out);
}

// --config has to be read before the other flags bind, so that flags win.
inline std::optional<std::string> find_config_arg(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  Paths p;
  try {
    if (const auto config_path = find_config_arg(argc, argv)) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_text_file(*config_path));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, *config_path + ": " + e.what());
      }
      apply_json(cfg, j);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::Io ? kExitIo : kExitValidation;
  }

  CLI::App app{"center-point detection toolkit: codec, test-time augmentation, VisDrone evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", p.config, "JSON file with default values for any flag");

  auto add_tta_flags = [&](CLI::App* sub) {
    sub->add_option("--scales", cfg.scales, "test scales, e.g. --scales 0.5 0.75 1 1.25 1.5")
        ->expected(1, -1);
    sub->add_flag("--flip,!--no-flip", cfg.flip, "fuse horizontally flipped inference");
    sub->add_option("--resolution", cfg.resolution, "square base input resolution");
    sub->add_option("--nms-iou", cfg.nms_iou, "IoU threshold of the multi-scale NMS");
    sub->add_option("--max-dets", cfg.max_dets, "detections kept per image after fusion");
    sub->add_option("--stride", cfg.stride, "input pixels per map cell");
    sub->add_option("--image-size", p.image_size, "original image size WxH (default: square base)");
    sub->add_option("--jobs", cfg.jobs, "images processed concurrently");
  };
  auto add_decode_flags = [&](CLI::App* sub) {
    sub->add_option("--topk", cfg.topk, "peaks decoded per map");
    sub->add_option("--score-floor", cfg.score_floor, "minimum peak score");
  };
  auto add_output_flags = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "markdown | csv | svg | json");
    sub->add_option("--out", p.out, "write to this file instead of stdout");
    sub->add_option("--label", p.label, "row label");
  };

  CLI::App* encode = app.add_subcommand("encode", "render oracle maps from annotations");
  encode->add_option("--annotations", p.annotations, "annotation file or directory")->required();
  encode->add_option("--out", p.out, "output directory")->required();
  encode->add_option("--noise", cfg.noise, "uniform heatmap noise amplitude");
  encode->add_option("--seed", cfg.seed, "noise seed");
  add_tta_flags(encode);

  CLI::App* dec = app.add_subcommand("decode", "decode map files into result files");
  dec->add_option("--maps", p.maps, "map file or directory")->required();
  dec->add_option("--out", p.out, "output directory")->required();
  dec->add_option("--jobs", cfg.jobs, "files processed concurrently");
  add_decode_flags(dec);

  CLI::App* ev = app.add_subcommand("eval", "score result files against annotations");
  ev->add_option("--detections", p.detections, "directory of result files")->required();
  ev->add_option("--annotations", p.annotations, "annotation directory")->required();
  add_output_flags(ev);

  CLI::App* tta = app.add_subcommand("tta-eval", "fuse augmented map files and score them");
  tta->add_option("--maps", p.maps, "directory of <id>_s<scale>_<f|n>.cnhm files")->required();
  tta->add_option("--annotations", p.annotations, "annotation directory")->required();
  tta->add_option("--results", p.results, "also write fused result files here");
  add_tta_flags(tta);
  add_decode_flags(tta);
  add_output_flags(tta);

  CLI::App* rep = app.add_subcommand("report", "render metric rows");
  rep->add_option("--input", p.inputs, "JSON row file(s)")->required()->expected(1, -1);
  rep->add_option("--format", cfg.format, "markdown | csv | svg");
  rep->add_option("--out", p.out, "write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (!p.image_size.empty()) cfg.image_size = parse_image_size(p.image_size);
    cfg.validate();
    if (encode->parsed()) cmd_encode(cfg, p, out);
    else if (dec->parsed()) cmd_decode(cfg, p, out);
    else if (ev->parsed()) cmd_eval(cfg, p, out);
    else if (tta->parsed()) cmd_tta_eval(cfg, p, out);
    else if (rep->parsed()) cmd_report(cfg, p, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::Io ? kExitIo : kExitValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace centerdet::cli
