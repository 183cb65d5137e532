#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace canonlink {

// One stratum-by-arm cell of an aggregated two-arm trial. x is the covariate
// level, z the arm (1 = experimental).
struct Cell {
  int x = 0;
  int z = 0;
  long events = 0;
  long trials = 1;

  friend bool operator==(const Cell&, const Cell&) = default;
};

// One individual after expansion of a cell.
struct Row {
  int x = 0;
  int z = 0;
  int y = 0;

  friend bool operator==(const Row&, const Row&) = default;
};

class DataError : public std::runtime_error {
 public:
  enum class Kind {
    malformed_header,
    bad_field,
    level_out_of_range,
    nonpositive_trials,
    events_exceed_trials,
    negative_events,
    duplicate_cell,
    no_cells,
    missing_arm,
  };

  // row is the 1-based data row (header excluded); 0 when not row-specific.
  DataError(Kind kind, std::size_t row, const std::string& message);

  Kind kind() const noexcept { return kind_; }
  std::size_t row() const noexcept { return row_; }

 private:
  Kind kind_;
  std::size_t row_;
};

// Immutable, validated collection of cells, unique on (x, z), in input order.
class CellTable {
 public:
  explicit CellTable(std::vector<Cell> cells);

  std::span<const Cell> cells() const noexcept { return cells_; }
  std::size_t size() const noexcept { return cells_.size(); }

  long total_trials() const noexcept;
  long total_events() const noexcept;
  long arm_trials(int z) const noexcept;
  long arm_events(int z) const noexcept;

  // Multiplies every count by factor (> 0).
  CellTable scaled(long factor) const;

  friend bool operator==(const CellTable&, const CellTable&) = default;

 private:
  std::vector<Cell> cells_;
};

struct BalanceReport {
  bool balanced = false;
  // counts[x] = {trials in arm 0, trials in arm 1}
  std::map<int, std::array<long, 2>> counts;
};

CellTable parse_cell_csv(std::istream& in);
CellTable parse_cell_csv(std::string_view text);
std::string render_cell_csv(const CellTable& table);

std::vector<Row> expand_to_rows(const CellTable& table);

// Groups rows by (x, z) in order of first appearance.
CellTable aggregate_rows(std::span<const Row> rows);

// Throws DataError(missing_arm) if either arm has no cells.
BalanceReport check_balance(const CellTable& table);

// The four-cell hypothetical trial used throughout the tests and README.
CellTable example_trial();

}  // namespace canonlink
