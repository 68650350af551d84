#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "copyguard/common.hpp"
#include "copyguard/evaluation.hpp"

namespace copyguard {

// One (character × repetition) evaluation cell. Refusals and per-cell errors
// contribute 0 to both metrics and stay visible in the report.
struct CellResult {
  std::string character_id;
  std::size_t repetition = 0;
  std::string prompt;
  std::string negative_prompt;
  int detect_score = 0;
  double cons_value = 0.0;
  bool refused = false;
  std::optional<std::string> error;
  std::string artifact_id;
  std::optional<std::size_t> anchor_leak_count;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["character_id"] = character_id;
    j["repetition"] = repetition;
    j["prompt"] = prompt;
    j["negative_prompt"] = negative_prompt;
    j["detect_score"] = detect_score;
    j["cons_value"] = cons_value;
    j["refused"] = refused;
    if (error) j["error"] = *error;
    j["artifact_id"] = artifact_id;
    if (anchor_leak_count) j["anchor_leak_count"] = *anchor_leak_count;
    return j;
  }

  static CellResult from_json(const nlohmann::ordered_json& j) {
    CellResult c;
    c.character_id = j.at("character_id").get<std::string>();
    c.repetition = j.at("repetition").get<std::size_t>();
    c.prompt = j.value("prompt", std::string());
    c.negative_prompt = j.value("negative_prompt", std::string());
    c.detect_score = j.value("detect_score", 0);
    c.cons_value = j.value("cons_value", 0.0);
    c.refused = j.value("refused", false);
    if (j.contains("error")) c.error = j.at("error").get<std::string>();
    c.artifact_id = j.value("artifact_id", std::string());
    if (j.contains("anchor_leak_count")) {
      c.anchor_leak_count = j.at("anchor_leak_count").get<std::size_t>();
    }
    return c;
  }
};

struct RunReport {
  std::string fingerprint;
  nlohmann::ordered_json config;
  std::string backend_tag;
  std::string prompt_label;
  std::string negative_label;
  std::size_t repetitions = 0;
  std::vector<CellResult> cells;
  std::vector<std::pair<double, double>> per_repetition;  // (DETECT, CONS)
  RunAggregate aggregate;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["fingerprint"] = fingerprint;
    j["config"] = config;
    j["backend_tag"] = backend_tag;
    j["prompt_label"] = prompt_label;
    j["negative_label"] = negative_label;
    j["repetitions"] = repetitions;
    nlohmann::ordered_json reps = nlohmann::ordered_json::array();
    for (const auto& [d, c] : per_repetition) {
      reps.push_back({{"detect", d}, {"cons", c}});
    }
    j["per_repetition"] = reps;
    nlohmann::ordered_json agg;
    agg["detect_mean"] = aggregate.detect_mean;
    if (aggregate.detect_std) agg["detect_std"] = *aggregate.detect_std;
    agg["cons_mean"] = aggregate.cons_mean;
    if (aggregate.cons_std) agg["cons_std"] = *aggregate.cons_std;
    j["aggregate"] = agg;
    nlohmann::ordered_json cells_json = nlohmann::ordered_json::array();
    for (const auto& cell : cells) cells_json.push_back(cell.to_json());
    j["cells"] = cells_json;
    return j;
  }

  static RunReport from_json(const nlohmann::ordered_json& j) {
    RunReport r;
    r.fingerprint = j.at("fingerprint").get<std::string>();
    r.config = j.value("config", nlohmann::ordered_json::object());
    r.backend_tag = j.value("backend_tag", std::string());
    r.prompt_label = j.value("prompt_label", std::string());
    r.negative_label = j.value("negative_label", std::string());
    r.repetitions = j.at("repetitions").get<std::size_t>();
    for (const auto& rep : j.at("per_repetition")) {
      r.per_repetition.emplace_back(rep.at("detect").get<double>(),
                                    rep.at("cons").get<double>());
    }
    const auto& agg = j.at("aggregate");
    r.aggregate.detect_mean = agg.at("detect_mean").get<double>();
    if (agg.contains("detect_std")) {
      r.aggregate.detect_std = agg.at("detect_std").get<double>();
    }
    r.aggregate.cons_mean = agg.at("cons_mean").get<double>();
    if (agg.contains("cons_std")) {
      r.aggregate.cons_std = agg.at("cons_std").get<double>();
    }
    r.aggregate.repetitions = r.repetitions;
    if (j.contains("cells")) {
      for (const auto& cell : j.at("cells")) {
        r.cells.push_back(CellResult::from_json(cell));
      }
    }
    return r;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write report: " + path);
    out << to_json().dump(2) << '\n';
  }

  static RunReport load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open report: " + path);
    nlohmann::ordered_json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("report " + path + ": " + e.what());
    }
    return from_json(j);
  }
};

inline std::string format_mean_std(double mean, std::optional<double> std_dev) {
  char buf[64];
  if (std_dev) {
    std::snprintf(buf, sizeof(buf), "%.2f ± %.2f", mean, *std_dev);
  } else {
    std::snprintf(buf, sizeof(buf), "%.2f", mean);
  }
  return buf;
}

// Display width in code points (the ± sign is two bytes, one column).
inline std::size_t display_width(const std::string& s) {
  std::size_t width = 0;
  for (unsigned char c : s) {
    if ((c & 0xc0) != 0x80) ++width;
  }
  return width;
}

// Table layout mirroring the results tables: rows are negative-prompt
// configurations, columns are prompt modes, cells are mean ± std.
inline std::string render_table(const std::vector<RunReport>& reports) {
  std::vector<std::string> columns;  // prompt labels, first-appearance order
  std::vector<std::string> rows;     // negative labels
  for (const auto& r : reports) {
    if (std::find(columns.begin(), columns.end(), r.prompt_label) == columns.end()) {
      columns.push_back(r.prompt_label);
    }
    if (std::find(rows.begin(), rows.end(), r.negative_label) == rows.end()) {
      rows.push_back(r.negative_label);
    }
  }

  auto cell_text = [&](const std::string& row,
                       const std::string& col) -> std::string {
    for (const auto& r : reports) {
      if (r.negative_label == row && r.prompt_label == col) {
        return "DETECT " +
               format_mean_std(r.aggregate.detect_mean, r.aggregate.detect_std) +
               " | CONS " +
               format_mean_std(r.aggregate.cons_mean, r.aggregate.cons_std);
      }
    }
    return "-";
  };

  std::size_t row_width = display_width("Negative Prompt");
  for (const auto& row : rows) row_width = std::max(row_width, display_width(row));
  std::vector<std::size_t> col_widths;
  for (const auto& col : columns) {
    std::size_t w = display_width("Prompt: ") + display_width(col);
    for (const auto& row : rows) {
      w = std::max(w, display_width(cell_text(row, col)));
    }
    col_widths.push_back(w);
  }

  std::ostringstream out;
  auto pad = [](const std::string& s, std::size_t width) {
    std::string padded = s;
    const std::size_t current = display_width(s);
    if (width > current) padded.append(width - current, ' ');
    return padded;
  };
  out << pad("Negative Prompt", row_width);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out << "  | " << pad("Prompt: " + columns[c], col_widths[c]);
  }
  out << '\n';
  out << std::string(row_width, '-');
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out << "--+-" << std::string(col_widths[c], '-');
  }
  out << '\n';
  for (const auto& row : rows) {
    out << pad(row, row_width);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out << "  | " << pad(cell_text(row, columns[c]), col_widths[c]);
    }
    out << '\n';
  }
  return out.str();
}

// Renders a report as JSON or as the table layout.
inline std::string emit_report(const RunReport& report, const std::string& format) {
  if (format == "json") return report.to_json().dump(2) + "\n";
  if (format == "table") return render_table({report});
  throw ConfigError("unknown report format '" + format + "'");
}

}  // namespace copyguard
