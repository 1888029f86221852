#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "csbss/dataset.hpp"
#include "csbss/experiment.hpp"

namespace csbss {

/// Published separator budget of the uncompressed model (1M for MNIST, 2M for
/// E-MNIST).
std::size_t reference_budget(DatasetKind kind);

struct TableRowSpec {
  std::string label;   // "No Compression", "25% Compression", ...
  double sensing_rate = 1.0;
  std::size_t parameter_budget = 0;
};

/// The five result rows of a dataset with budgets scaled by `budget_scale`.
std::vector<TableRowSpec> table_rows(DatasetKind kind, double budget_scale = 1.0);

/// Run directory name for a row, e.g. "mnist_r0.50_p400000".
std::string run_directory_name(DatasetKind kind, const TableRowSpec& row);

struct TableEntry {
  TableRowSpec row;
  std::optional<RunReport> report;
};

struct ResultTable {
  DatasetKind dataset = DatasetKind::mnist;
  std::vector<TableEntry> entries;

  std::size_t present() const;
  std::vector<std::string> missing() const;
  /// Column-aligned text with a trailing "k of 5 runs present" line.
  std::string text() const;
  std::string csv() const;
};

/// Reads `<results>/<run_directory_name>/report.jsonl` for every row.
ResultTable collect_table(const std::filesystem::path& results, DatasetKind kind,
                          double budget_scale = 1.0);

}  // namespace csbss
