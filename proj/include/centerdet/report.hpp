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
// Result tables and charts. Metric values are held as fractions and printed
// as percentages with two decimals.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "centerdet/error.hpp"
#include "centerdet/evaluator.hpp"
#include "centerdet/visdrone_io.hpp"
#include "json.hpp"

namespace centerdet {

struct SweepRow {
  std::string label;
  std::optional<EvalResult> metrics;    // summary columns; absent for per-class-only rows
  std::map<int, double> per_class_ap;   // class id -> AP
};

inline SweepRow make_row(std::string label, const EvalResult& r) {
  return SweepRow{std::move(label), r, r.per_class_ap};
}

enum class ReportFormat { Csv, Markdown, Svg };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "markdown" || s == "md") return ReportFormat::Markdown;
  if (s == "svg") return ReportFormat::Svg;
  throw Error(ErrorKind::UnknownFormat, std::string(s));
}

inline constexpr std::array<int, 4> kReportMaxDets = {1, 10, 100, 500};

namespace detail {

inline std::string pct(double fraction) {
  if (!std::isfinite(fraction)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

inline std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::vector<std::string> summary_cells(const EvalResult& m) {
  std::vector<std::string> cells = {pct(m.ap), pct(m.ap50), pct(m.ap75)};
  for (int k : kReportMaxDets) {
    const auto it = m.ar.find(k);
    cells.push_back(it == m.ar.end() ? "-" : pct(it->second));
  }
  return cells;
}

inline std::vector<int> class_columns(std::span<const SweepRow> rows) {
  std::set<int> ids;
  for (const SweepRow& r : rows) {
    for (const auto& [c, v] : r.per_class_ap) ids.insert(c);
  }
  return {ids.begin(), ids.end()};
}

inline std::string short_name(int class_id) {
  return is_valid_category(class_id) ? std::string(kCategoryShortNames[static_cast<std::size_t>(class_id)])
                                     : std::to_string(class_id);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string markdown(std::span<const SweepRow> rows) {
  std::string out;
  const bool any_summary =
      std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.metrics.has_value(); });
  if (any_summary) {
    out += "| Method | AP[%] | AP50[%] | AP75[%] | AR1[%] | AR10[%] | AR100[%] | AR500[%] |\n";
    out += "|---|---:|---:|---:|---:|---:|---:|---:|\n";
    for (const SweepRow& r : rows) {
      if (!r.metrics) continue;
      out += "| " + r.label + " |";
      for (const std::string& cell : summary_cells(*r.metrics)) out += " " + cell + " |";
      out += "\n";
    }
  }
  const std::vector<int> classes = class_columns(rows);
  if (!classes.empty()) {
    if (!out.empty()) out += "\n";
    out += "| Input |";
    for (int c : classes) out += " " + short_name(c) + " |";
    out += "\n|---|";
    for (std::size_t i = 0; i < classes.size(); ++i) out += "---:|";
    out += "\n";
    for (const SweepRow& r : rows) {
      if (r.per_class_ap.empty()) continue;
      out += "| " + r.label + " |";
      for (int c : classes) {
        const auto it = r.per_class_ap.find(c);
        out += " " + (it == r.per_class_ap.end() ? std::string("-") : pct(it->second)) + " |";
      }
      out += "\n";
    }
  }
  return out;
}

inline std::string csv(std::span<const SweepRow> rows) {
  const std::vector<int> classes = class_columns(rows);
  std::string out = "label,AP,AP50,AP75,AR1,AR10,AR100,AR500";
  for (int c : classes) out += "," + short_name(c);
  out += "\n";
  for (const SweepRow& r : rows) {
    out += csv_field(r.label);
    if (r.metrics) {
      for (const std::string& cell : summary_cells(*r.metrics)) out += "," + (cell == "-" ? "" : cell);
    } else {
      out += ",,,,,,,";
    }
    for (int c : classes) {
      const auto it = r.per_class_ap.find(c);
      out += ",";
      if (it != r.per_class_ap.end()) out += pct(it->second);
    }
    out += "\n";
  }
  return out;
}

// Grouped per-class AP bars, one colour per row.
inline std::string svg(std::span<const SweepRow> rows) {
  const std::vector<int> classes = class_columns(rows);
  std::vector<const SweepRow*> series;
  for (const SweepRow& r : rows) {
    if (!r.per_class_ap.empty()) series.push_back(&r);
  }
  if (classes.empty()) throw Error(ErrorKind::EmptyReport, "no per-class AP values to plot");

  static constexpr std::array<std::string_view, 6> kPalette = {
      "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"};
  constexpr double kLeft = 50.0, kTop = 20.0, kPlotH = 260.0, kGroupW = 60.0, kBottom = 60.0;
  const double plot_w = kGroupW * static_cast<double>(classes.size());
  const double width = kLeft + plot_w + 20.0;
  const double height = kTop + kPlotH + kBottom;
  double peak = 0.0;
  for (const SweepRow* r : series) {
    for (const auto& [c, v] : r->per_class_ap) peak = std::max(peak, v * 100.0);
  }
  const double ymax = std::max(10.0, std::ceil(peak / 10.0) * 10.0);
  const double bar_w = (kGroupW - 10.0) / static_cast<double>(series.size());

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed2(width) + "\" height=\"" +
         fixed2(height) + "\" viewBox=\"0 0 " + fixed2(width) + " " + fixed2(height) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + fixed2(width) + "\" height=\"" + fixed2(height) +
         "\" fill=\"#ffffff\"/>\n";
  const double axis_y = kTop + kPlotH;
  out += "<line x1=\"" + fixed2(kLeft) + "\" y1=\"" + fixed2(axis_y) + "\" x2=\"" +
         fixed2(kLeft + plot_w) + "\" y2=\"" + fixed2(axis_y) + "\" stroke=\"#000000\"/>\n";
  out += "<line x1=\"" + fixed2(kLeft) + "\" y1=\"" + fixed2(kTop) + "\" x2=\"" + fixed2(kLeft) +
         "\" y2=\"" + fixed2(axis_y) + "\" stroke=\"#000000\"/>\n";
  for (int tick = 0; tick <= 5; ++tick) {
    const double v = ymax * tick / 5.0;
    const double y = axis_y - kPlotH * tick / 5.0;
    out += "<text x=\"" + fixed2(kLeft - 6.0) + "\" y=\"" + fixed2(y + 4.0) +
           "\" font-size=\"10\" text-anchor=\"end\">" + fixed2(v) + "</text>\n";
  }
  out += "<text x=\"12\" y=\"" + fixed2(kTop + kPlotH / 2.0) +
         "\" font-size=\"11\" transform=\"rotate(-90 12 " + fixed2(kTop + kPlotH / 2.0) +
         ")\" text-anchor=\"middle\">AP[%]</text>\n";
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    const int c = classes[ci];
    const double gx = kLeft + kGroupW * static_cast<double>(ci) + 5.0;
    for (std::size_t si = 0; si < series.size(); ++si) {
      const auto it = series[si]->per_class_ap.find(c);
      if (it == series[si]->per_class_ap.end()) continue;
      const double v = it->second * 100.0;
      const double h = kPlotH * std::clamp(v / ymax, 0.0, 1.0);
      out += "<rect class=\"bar\" data-class=\"" + short_name(c) + "\" data-series=\"" +
             xml_escape(series[si]->label) + "\" x=\"" + fixed2(gx + bar_w * si) + "\" y=\"" +
             fixed2(axis_y - h) + "\" width=\"" + fixed2(bar_w) + "\" height=\"" + fixed2(h) +
             "\" fill=\"" + std::string(kPalette[si % kPalette.size()]) + "\"><title>" +
             xml_escape(series[si]->label) + " " + short_name(c) + " " + pct(it->second) +
             "</title></rect>\n";
    }
    out += "<text x=\"" + fixed2(gx + (kGroupW - 10.0) / 2.0) + "\" y=\"" + fixed2(axis_y + 16.0) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + short_name(c) + "</text>\n";
  }
  const double ly = axis_y + 34.0;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const double lx = kLeft + 120.0 * static_cast<double>(si);
    out += "<rect x=\"" + fixed2(lx) + "\" y=\"" + fixed2(ly) +
           "\" width=\"10\" height=\"10\" fill=\"" + std::string(kPalette[si % kPalette.size()]) +
           "\"/>\n";
    out += "<text x=\"" + fixed2(lx + 14.0) + "\" y=\"" + fixed2(ly + 9.0) + "\" font-size=\"11\">" +
           xml_escape(series[si]->label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace detail

inline std::string render_report(std::span<const SweepRow> rows, ReportFormat format) {
  if (rows.empty()) throw Error(ErrorKind::EmptyReport, "no rows to render");
  switch (format) {
    case ReportFormat::Csv: return detail::csv(rows);
    case ReportFormat::Markdown: return detail::markdown(rows);
    case ReportFormat::Svg: return detail::svg(rows);
  }
  throw Error(ErrorKind::UnknownFormat, "unhandled report format");
}

// Row files store percentages, the way result tables are usually quoted:
//   {"rows": [{"label": "...", "ap": 27.83, "ap50": ..., "ap75": ...,
//              "ar": {"1": 0, "10": 0.18, ...},
//              "per_class_ap": {"ped": 31.05, ...}}]}

inline nlohmann::json rows_to_json(std::span<const SweepRow> rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const SweepRow& r : rows) {
    nlohmann::json j;
    j["label"] = r.label;
    if (r.metrics) {
      j["ap"] = r.metrics->ap * 100.0;
      j["ap50"] = r.metrics->ap50 * 100.0;
      j["ap75"] = r.metrics->ap75 * 100.0;
      nlohmann::json ar = nlohmann::json::object();
      for (const auto& [k, v] : r.metrics->ar) ar[std::to_string(k)] = v * 100.0;
      j["ar"] = ar;
    }
    if (!r.per_class_ap.empty()) {
      nlohmann::json pc = nlohmann::json::object();
      for (const auto& [c, v] : r.per_class_ap) pc[detail::short_name(c)] = v * 100.0;
      j["per_class_ap"] = pc;
    }
    arr.push_back(j);
  }
  return nlohmann::json{{"rows", arr}};
}

inline std::vector<SweepRow> rows_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("rows") || !doc["rows"].is_array()) {
    throw Error(ErrorKind::InvalidConfig, "report file needs a \"rows\" array");
  }
  std::vector<SweepRow> rows;
  try {
    for (const nlohmann::json& j : doc["rows"]) {
      SweepRow r;
      r.label = j.at("label").get<std::string>();
      if (j.contains("ap")) {
        EvalResult m;
        m.ap = j.at("ap").get<double>() / 100.0;
        m.ap50 = j.at("ap50").get<double>() / 100.0;
        m.ap75 = j.at("ap75").get<double>() / 100.0;
        if (j.contains("ar")) {
          for (const auto& [k, v] : j.at("ar").items()) m.ar[std::stoi(k)] = v.get<double>() / 100.0;
        }
        r.metrics = m;
      }
      if (j.contains("per_class_ap")) {
        for (const auto& [name, v] : j.at("per_class_ap").items()) {
          const auto id = category_from_short_name(name);
          if (!id) throw Error(ErrorKind::InvalidCategory, "unknown class '" + name + "'");
          r.per_class_ap[*id] = v.get<double>() / 100.0;
        }
        if (r.metrics) r.metrics->per_class_ap = r.per_class_ap;
      }
      rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("bad report row: ") + e.what());
  }
  return rows;
}

}  // namespace centerdet
