#include "canonlink/cells.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <utility>

namespace canonlink {

DataError::DataError(Kind kind, std::size_t row, const std::string& message)
    : std::runtime_error(row > 0 ? message + " at row " + std::to_string(row) : message),
      kind_(kind),
      row_(row) {}

namespace {

void validate_cell(const Cell& c, std::size_t row) {
  using K = DataError::Kind;
  if ((c.x != 0 && c.x != 1) || (c.z != 0 && c.z != 1)) {
    throw DataError(K::level_out_of_range, row, "x and z must be 0 or 1");
  }
  if (c.trials < 1) throw DataError(K::nonpositive_trials, row, "trials must be positive");
  if (c.events < 0) throw DataError(K::negative_events, row, "events must be nonnegative");
  if (c.events > c.trials) throw DataError(K::events_exceed_trials, row, "events exceed trials");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

long parse_integer(std::string_view field, std::size_t row) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw DataError(DataError::Kind::bad_field, row,
                    "non-integer field '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

CellTable::CellTable(std::vector<Cell> cells) : cells_(std::move(cells)) {
  using K = DataError::Kind;
  if (cells_.empty()) throw DataError(K::no_cells, 0, "no cells");
  std::set<std::pair<int, int>> seen;
  bool arm[2] = {false, false};
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const Cell& c = cells_[i];
    validate_cell(c, i + 1);
    if (!seen.emplace(c.x, c.z).second) {
      throw DataError(K::duplicate_cell, i + 1, "duplicate cell (x, z)");
    }
    arm[c.z] = true;
  }
  if (!arm[0] || !arm[1]) throw DataError(K::missing_arm, 0, "missing arm");
}

long CellTable::total_trials() const noexcept {
  long s = 0;
  for (const auto& c : cells_) s += c.trials;
  return s;
}

long CellTable::total_events() const noexcept {
  long s = 0;
  for (const auto& c : cells_) s += c.events;
  return s;
}

long CellTable::arm_trials(int z) const noexcept {
  long s = 0;
  for (const auto& c : cells_)
    if (c.z == z) s += c.trials;
  return s;
}

long CellTable::arm_events(int z) const noexcept {
  long s = 0;
  for (const auto& c : cells_)
    if (c.z == z) s += c.events;
  return s;
}

CellTable CellTable::scaled(long factor) const {
  if (factor < 1) throw std::invalid_argument("scale factor must be positive");
  std::vector<Cell> out = cells_;
  for (auto& c : out) {
    c.events *= factor;
    c.trials *= factor;
  }
  return CellTable(std::move(out));
}

CellTable parse_cell_csv(std::istream& in) {
  using K = DataError::Kind;
  std::string line;
  if (!std::getline(in, line) || trim(line) != "x,z,events,trials") {
    throw DataError(K::malformed_header, 0, "header must be exactly 'x,z,events,trials'");
  }
  std::vector<Cell> cells;
  std::set<std::pair<int, int>> seen;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    auto fields = split_commas(line);
    if (fields.size() != 4) throw DataError(K::bad_field, row, "expected 4 fields");
    long v[4];
    for (int i = 0; i < 4; ++i) v[i] = parse_integer(fields[i], row);
    if (v[0] < 0 || v[0] > 1 || v[1] < 0 || v[1] > 1) {
      throw DataError(K::level_out_of_range, row, "x and z must be 0 or 1");
    }
    Cell c{static_cast<int>(v[0]), static_cast<int>(v[1]), v[2], v[3]};
    validate_cell(c, row);
    if (!seen.emplace(c.x, c.z).second) {
      throw DataError(K::duplicate_cell, row, "duplicate cell (x, z)");
    }
    cells.push_back(c);
  }
  return CellTable(std::move(cells));
}

CellTable parse_cell_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_cell_csv(in);
}

std::string render_cell_csv(const CellTable& table) {
  std::string out = "x,z,events,trials\n";
  for (const auto& c : table.cells()) {
    out += std::to_string(c.x) + ',' + std::to_string(c.z) + ',' + std::to_string(c.events) +
           ',' + std::to_string(c.trials) + '\n';
  }
  return out;
}

std::vector<Row> expand_to_rows(const CellTable& table) {
  std::vector<Row> rows;
  rows.reserve(static_cast<std::size_t>(table.total_trials()));
  for (const auto& c : table.cells()) {
    for (long i = 0; i < c.events; ++i) rows.push_back({c.x, c.z, 1});
    for (long i = c.events; i < c.trials; ++i) rows.push_back({c.x, c.z, 0});
  }
  return rows;
}

CellTable aggregate_rows(std::span<const Row> rows) {
  std::vector<Cell> cells;
  for (const auto& r : rows) {
    auto it = std::find_if(cells.begin(), cells.end(),
                           [&](const Cell& c) { return c.x == r.x && c.z == r.z; });
    if (it == cells.end()) {
      cells.push_back({r.x, r.z, 0, 0});
      it = cells.end() - 1;
    }
    it->trials += 1;
    it->events += r.y;
  }
  return CellTable(std::move(cells));
}

BalanceReport check_balance(const CellTable& table) {
  if (table.arm_trials(0) == 0 || table.arm_trials(1) == 0) {
    throw DataError(DataError::Kind::missing_arm, 0, "missing arm");
  }
  BalanceReport report;
  for (const auto& c : table.cells()) {
    report.counts[c.x][c.z] += c.trials;
  }
  report.balanced = std::all_of(report.counts.begin(), report.counts.end(),
                                [](const auto& kv) { return kv.second[0] == kv.second[1]; });
  return report;
}

CellTable example_trial() {
  return CellTable({{0, 1, 10, 200}, {0, 0, 20, 200}, {1, 1, 90, 200}, {1, 0, 80, 200}});
}

}  // namespace canonlink
