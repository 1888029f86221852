#include "csbss/tables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace csbss {

namespace {

std::string format(const char* fmt, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, fmt, value);
  return buffer;
}

std::string millions(std::size_t count) {
  return format("%.2g mil", static_cast<double>(count) / 1e6);
}

}  // namespace

std::size_t reference_budget(DatasetKind kind) {
  return kind == DatasetKind::mnist ? 1'000'000 : 2'000'000;
}

std::vector<TableRowSpec> table_rows(DatasetKind kind, double budget_scale) {
  const auto base =
      static_cast<std::size_t>(std::llround(static_cast<double>(reference_budget(kind)) * budget_scale));
  return {
      {"No Compression", 1.0, base},
      {"25% Compression", 0.25, base},
      {"25% Compression", 0.25, 2 * base},
      {"50% Compression", 0.5, base},
      {"50% Compression", 0.5, 2 * base},
  };
}

std::string run_directory_name(DatasetKind kind, const TableRowSpec& row) {
  return to_string(kind) + format("_r%.2f", row.sensing_rate) + "_p" +
         std::to_string(row.parameter_budget);
}

std::size_t ResultTable::present() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const TableEntry& e) { return e.report.has_value(); }));
}

std::vector<std::string> ResultTable::missing() const {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    if (!e.report) out.push_back(run_directory_name(dataset, e.row));
  }
  return out;
}

std::string ResultTable::text() const {
  std::vector<std::array<std::string, 4>> cells;
  cells.push_back({"Model", "Sensing rate", "Parameters", "Top-1 accuracy"});
  for (const auto& e : entries) {
    cells.push_back({e.row.label, format("%.2f", e.row.sensing_rate),
                     millions(e.report ? e.report->parameter_count : e.row.parameter_budget),
                     e.report ? format("%.2f%%", 100.0 * e.report->top1_accuracy) : "missing"});
  }
  std::array<std::size_t, 4> width{};
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < 4; ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  out << "Dataset: " << to_string(dataset) << '\n';
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      out << cells[r][c];
      if (c + 1 < 4) out << std::string(width[c] - cells[r][c].size() + 2, ' ');
    }
    out << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out << std::string(total + 6, '-') << '\n';
    }
  }
  out << present() << " of " << entries.size() << " runs present\n";
  return out.str();
}

std::string ResultTable::csv() const {
  std::ostringstream out;
  out << "dataset,model,sensing_rate,parameter_budget,parameter_count,top1_accuracy\n";
  for (const auto& e : entries) {
    out << to_string(dataset) << ',' << e.row.label << ',' << e.row.sensing_rate << ','
        << e.row.parameter_budget << ',';
    if (e.report) {
      out << e.report->parameter_count << ',' << e.report->top1_accuracy;
    } else {
      out << ',';
    }
    out << '\n';
  }
  return out.str();
}

ResultTable collect_table(const std::filesystem::path& results, DatasetKind kind,
                          double budget_scale) {
  ResultTable table;
  table.dataset = kind;
  for (const auto& row : table_rows(kind, budget_scale)) {
    table.entries.push_back({row, read_latest_report(results / run_directory_name(kind, row))});
  }
  return table;
}

}  // namespace csbss
