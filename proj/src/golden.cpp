#include "beq/golden.hpp"

#include "beq/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace beq {

double GoldenTable::tolerance_for(const std::string& column, double expected) const {
  if (auto it = column_tolerance.find(column); it != column_tolerance.end()) return it->second;
  return std::abs(expected) <= tail_threshold ? tail_tolerance : tolerance;
}

GoldenTable parse_golden(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("golden table: ") + e.what());
  }
  GoldenTable t;
  try {
    t.name = j.value("name", std::string());
    t.tolerance = j.value("tolerance", t.tolerance);
    t.tail_threshold = j.value("tail_threshold", t.tail_threshold);
    t.tail_tolerance = j.value("tail_tolerance", t.tail_tolerance);
    if (j.contains("column_tolerance")) {
      for (auto& [k, v] : j.at("column_tolerance").items()) t.column_tolerance[k] = v.get<double>();
    }
    for (const auto& row : j.at("rows")) {
      GoldenRow r;
      for (auto& [k, v] : row.items()) {
        if (k == "n") {
          r.n = v.get<int>();
        } else {
          r.values[k] = v.get<double>();
        }
      }
      if (!row.contains("n")) throw Error(ErrorCode::ConfigError, "golden row without n");
      if (!t.rows.empty() && r.n <= t.rows.back().n) {
        throw Error(ErrorCode::ConfigError, "golden row indices must be strictly increasing");
      }
      t.rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("golden table: ") + e.what());
  }
  return t;
}

GoldenTable load_golden(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::ConfigError, "cannot open golden table " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  GoldenTable t = parse_golden(ss.str());
  if (t.name.empty()) t.name = path;
  return t;
}

bool CellDiff::pass() const { return std::abs(actual - expected) <= tolerance; }

bool GoldenReport::pass() const {
  return std::all_of(cells.begin(), cells.end(), [](const CellDiff& c) { return c.pass(); });
}

std::vector<CellDiff> GoldenReport::mismatches() const {
  std::vector<CellDiff> out;
  std::copy_if(cells.begin(), cells.end(), std::back_inserter(out), [](const CellDiff& c) { return !c.pass(); });
  return out;
}

std::string GoldenReport::describe() const {
  std::ostringstream os;
  const auto bad = mismatches();
  os << cells.size() - bad.size() << "/" << cells.size() << " cells within tolerance";
  for (const CellDiff& c : bad) {
    os << "\n  n=" << c.n << " " << c.column << ": expected " << c.expected << ", got " << c.actual << " (|diff| "
       << std::abs(c.actual - c.expected) << " > " << c.tolerance << ")";
  }
  return os.str();
}

double record_column(const IterateRecord& r, const std::string& column) {
  if (column == "x") return r.x[0];
  if (column == "y") return r.y[0];
  if (column == "z") return r.z[0];
  if (column == "t") return r.t[0];
  if (column == "w") {
    if (!r.ls) throw Error(ErrorCode::InvalidArgument, "column w needs a linesearch trace");
    return r.ls->w[0];
  }
  throw Error(ErrorCode::InvalidArgument, "unknown golden column '" + column + "'");
}

GoldenReport compare_golden(const Trace& trace, const GoldenTable& table, const std::optional<std::vector<int>>& rows) {
  GoldenReport rep;
  for (const GoldenRow& row : table.rows) {
    if (rows && std::find(rows->begin(), rows->end(), row.n) == rows->end()) continue;
    auto it = std::find_if(trace.records.begin(), trace.records.end(),
                           [&](const IterateRecord& r) { return r.n == row.n; });
    if (it == trace.records.end()) {
      throw Error(ErrorCode::MissingRows, "trace has no row n=" + std::to_string(row.n) + " (" +
                                              std::to_string(trace.records.size()) + " records)");
    }
    for (const auto& [col, expected] : row.values) {
      rep.cells.push_back({row.n, col, expected, record_column(*it, col), table.tolerance_for(col, expected)});
    }
  }
  if (rows) {
    for (int n : *rows) {
      const bool listed = std::any_of(table.rows.begin(), table.rows.end(), [&](const GoldenRow& r) { return r.n == n; });
      if (!listed) throw Error(ErrorCode::MissingRows, "golden table has no row n=" + std::to_string(n));
    }
  }
  return rep;
}

}  // namespace beq
