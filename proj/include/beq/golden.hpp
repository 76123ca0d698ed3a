#pragma once

// Expected-value tables (one row per iteration index, named scalar columns)
// and the cell-by-cell comparison against a trace.

#include "beq/iterate.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace beq {

struct GoldenRow {
  int n = 0;
  std::map<std::string, double> values;
};

struct GoldenTable {
  std::string name;
  std::vector<GoldenRow> rows;
  double tolerance = 0.01;
  // Cells whose expected magnitude is at most tail_threshold use tail_tolerance.
  double tail_threshold = 1e-4;
  double tail_tolerance = 1e-3;
  std::map<std::string, double> column_tolerance;

  double tolerance_for(const std::string& column, double expected) const;
};

// Row indices must be strictly increasing. Columns are x, y, z, t and, for
// linesearch traces, w; each names the first coordinate of that iterate.
GoldenTable load_golden(const std::string& path);
GoldenTable parse_golden(const std::string& json_text);

struct CellDiff {
  int n = 0;
  std::string column;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  bool pass() const;
};

struct GoldenReport {
  std::vector<CellDiff> cells;
  bool pass() const;
  std::vector<CellDiff> mismatches() const;
  std::string describe() const;
};

// Compares every cell (or only the listed rows). Throws MissingRows when the
// trace does not reach a requested row.
GoldenReport compare_golden(const Trace& trace, const GoldenTable& table,
                            const std::optional<std::vector<int>>& rows = std::nullopt);

double record_column(const IterateRecord& r, const std::string& column);

}  // namespace beq
