// Copyright 2026 The Parlin Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "parlin/bench.hpp"
#include "parlin/error.hpp"

namespace parlin {

namespace {

constexpr std::string_view kTimingWindow =
    "wall_seconds spans worker admission to result (load + train + evaluate); "
    "standalone spans load + train + evaluate";

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string xml_escape(std::string_view s) {
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

std::string summary_csv(const SummaryTable& table) {
  std::size_t max_runs = 0;
  for (const auto& row : table.rows) max_runs = std::max(max_runs, row.runs.size());
  std::string out = "environment";
  for (std::size_t i = 1; i <= max_runs; ++i) out += ",run_" + std::to_string(i);
  out += ",average\n";
  for (const auto& row : table.rows) {
    out += row.environment;
    for (std::size_t i = 0; i < max_runs; ++i) {
      out += ',';
      if (i < row.runs.size()) out += format_real(row.runs[i]);
    }
    out += ',' + format_real(row.average) + '\n';
  }
  return out;
}

// Average seconds against environment, in table order.
std::string scaling_svg(const SummaryTable& table) {
  constexpr double kWidth = 760, kHeight = 440;
  constexpr double kLeft = 80, kRight = 30, kTop = 50, kBottom = 70;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double y_max = 0.0;
  for (const auto& row : table.rows) y_max = std::max(y_max, row.average);
  y_max = y_max > 0.0 ? y_max * 1.15 : 1.0;

  const std::size_t n = table.rows.size();
  auto x_at = [&](std::size_t i) {
    return n == 1 ? kLeft + plot_w / 2 : kLeft + plot_w * static_cast<double>(i) / (n - 1);
  };
  auto y_at = [&](double v) { return kTop + plot_h * (1.0 - v / y_max); };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">"
      "Average computing time per environment</text>\n",
      kWidth, kHeight, kWidth / 2);

  // Axes and horizontal grid.
  svg += fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n"
      "<line x1=\"{0}\" y1=\"{2}\" x2=\"{3}\" y2=\"{2}\" stroke=\"black\"/>\n",
      kLeft, kTop, kTop + plot_h, kLeft + plot_w);
  for (int t = 0; t <= 5; ++t) {
    const double v = y_max * t / 5.0;
    const double y = y_at(v);
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#dddddd\"/>\n"
        "<text x=\"{3}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:.1f}</text>\n",
        kLeft, y, kLeft + plot_w, kLeft - 8, y + 4, v);
  }
  svg += fmt::format(
      "<text x=\"{0}\" y=\"{1}\" text-anchor=\"middle\">Environment</text>\n"
      "<text x=\"20\" y=\"{2}\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 20 {2})\">Average wall time (seconds)</text>\n",
      kLeft + plot_w / 2, kHeight - 18, kTop + plot_h / 2);

  std::string points;
  for (std::size_t i = 0; i < n; ++i) {
    points += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", x_at(i), y_at(table.rows[i].average));
  }
  if (n > 1) {
    svg += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"" +
           points + "\"/>\n";
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[i];
    const double x = x_at(i), y = y_at(row.average);
    svg += fmt::format(
        "<circle cx=\"{0:.2f}\" cy=\"{1:.2f}\" r=\"4\" fill=\"#1f77b4\"/>\n"
        "<text x=\"{0:.2f}\" y=\"{2:.2f}\" text-anchor=\"middle\">{3:.2f}</text>\n"
        "<text x=\"{0:.2f}\" y=\"{4:.2f}\" text-anchor=\"middle\">{5}</text>\n",
        x, y, y - 10, row.average, kTop + plot_h + 20, xml_escape(row.environment));
  }
  svg += "</svg>\n";
  return svg;
}

std::string report_json(const SummaryTable& table) {
  const SummaryRow& baseline = table.rows.front();
  const SummaryRow& best = *std::min_element(
      table.rows.begin(), table.rows.end(),
      [](const auto& a, const auto& b) { return a.average < b.average; });
  const double pct = percent_reduction(baseline.average, best.average);

  nlohmann::json averages = nlohmann::json::array();
  for (const auto& row : table.rows) {
    averages.push_back({{"environment", row.environment},
                        {"average", row.average},
                        {"runs", row.runs},
                        {"percent_reduction", percent_reduction(baseline.average, row.average)}});
  }
  nlohmann::json j = {
      {"baseline", {{"environment", baseline.environment}, {"average", baseline.average}}},
      {"best", {{"environment", best.environment}, {"average", best.average}}},
      {"percent_reduction", pct},
      {"percent_reduction_display", format_percent(pct)},
      {"environments", averages},
      {"timing_window", kTimingWindow},
  };
  return j.dump(2) + "\n";
}

}  // namespace

ReportPaths emit_report(const SummaryTable& table, const std::filesystem::path& output_dir) {
  if (table.rows.empty()) throw Error(ErrorCode::kInvalidArgument, "empty summary table");
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (!std::filesystem::is_directory(output_dir)) {
    throw Error(ErrorCode::kIo, "cannot create output directory " + output_dir.string());
  }
  ReportPaths paths{output_dir / "summary.csv", output_dir / "scaling.svg",
                    output_dir / "report.json"};
  write_file(paths.summary_csv, summary_csv(table));
  write_file(paths.scaling_svg, scaling_svg(table));
  write_file(paths.report_json, report_json(table));
  return paths;
}

std::vector<TimingRecord> parse_summary_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("environment,") ||
      !line.ends_with(",average")) {
    throw Error(ErrorCode::kIo, path.string() + ": not a summary table header");
  }
  const auto n_cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;

  std::vector<TimingRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() != n_cols) {
      throw Error(ErrorCode::kIo, path.string() + ":" + std::to_string(line_no) +
                                      ": expected " + std::to_string(n_cols) + " cells");
    }
    for (std::size_t c = 1; c + 1 < cells.size(); ++c) {
      if (cells[c].empty()) continue;
      double v = 0.0;
      auto [ptr, err] = std::from_chars(cells[c].data(), cells[c].data() + cells[c].size(), v);
      if (err != std::errc() || ptr != cells[c].data() + cells[c].size()) {
        throw Error(ErrorCode::kIo, path.string() + ":" + std::to_string(line_no) +
                                        ": bad number '" + cells[c] + "'");
      }
      records.push_back({cells[0], static_cast<std::uint32_t>(c), v});
    }
  }
  return records;
}

void write_records(std::span<const PlanRun> runs, const std::filesystem::path& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : runs) {
    arr.push_back({{"environment", r.timing.environment_label},
                   {"run_index", r.timing.run_index},
                   {"wall_seconds", r.timing.wall_seconds},
                   {"result", to_json(r.result)}});
  }
  write_file(path, nlohmann::json{{"records", arr}}.dump(2) + "\n");
}

std::vector<PlanRun> read_records(const std::filesystem::path& path) {
  try {
    const auto j = nlohmann::json::parse(read_file(path));
    std::vector<PlanRun> runs;
    for (const auto& r : j.at("records")) {
      PlanRun run;
      run.timing = {r.at("environment").get<std::string>(),
                    r.at("run_index").get<std::uint32_t>(),
                    r.at("wall_seconds").get<double>()};
      if (r.contains("result")) run.result = job_result_from_json(r.at("result"));
      runs.push_back(std::move(run));
    }
    return runs;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, path.string() + ": malformed records file: " + e.what());
  }
}

}  // namespace parlin
