#include <doctest.h>

#include <algorithm>
#include <random>

#include "canonlink/cells.hpp"
#include "oracles.hpp"

using namespace canonlink;

namespace {

DataError::Kind parse_error_kind(std::string_view text, std::size_t* row = nullptr) {
  try {
    parse_cell_csv(text);
  } catch (const DataError& e) {
    if (row) *row = e.row();
    return e.kind();
  }
  FAIL("expected a DataError");
  return DataError::Kind::no_cells;
}

}  // namespace

TEST_CASE("parse the four-cell example trial") {
  const auto table = parse_cell_csv("x,z,events,trials\n0,1,10,200\n0,0,20,200\n1,1,90,200\n1,0,80,200\n");
  REQUIRE(table.size() == 4);
  CHECK(table.arm_events(1) == 100);
  CHECK(table.arm_trials(1) == 400);
  CHECK(table.arm_events(0) == 100);
  CHECK(table.arm_trials(0) == 400);
  CHECK(table.cells()[0] == Cell{0, 1, 10, 200});
  CHECK(table.cells()[3] == Cell{1, 0, 80, 200});
  CHECK(table == example_trial());
}

TEST_CASE("CRLF input and missing trailing newline") {
  const auto table = parse_cell_csv("x,z,events,trials\r\n0,1,1,2\r\n0,0,0,3");
  CHECK(table.size() == 2);
  CHECK(table.cells()[1] == Cell{0, 0, 0, 3});
}

TEST_CASE("parse errors are distinct and name the row") {
  std::size_t row = 0;
  CHECK(parse_error_kind("x,z,events,trials\n") == DataError::Kind::no_cells);
  CHECK(parse_error_kind("x,z,y,n\n0,1,1,2\n") == DataError::Kind::malformed_header);
  CHECK(parse_error_kind("") == DataError::Kind::malformed_header);

  CHECK(parse_error_kind("x,z,events,trials\n0,1,300,200\n", &row) ==
        DataError::Kind::events_exceed_trials);
  CHECK(row == 1);

  CHECK(parse_error_kind("x,z,events,trials\n0,1,3,20\n0,0,1.5,20\n", &row) ==
        DataError::Kind::bad_field);
  CHECK(row == 2);

  CHECK(parse_error_kind("x,z,events,trials\n0,1,3,20\n0,0,1,20\n0,1,4,20\n", &row) ==
        DataError::Kind::duplicate_cell);
  CHECK(row == 3);

  CHECK(parse_error_kind("x,z,events,trials\n0,1,0,0\n") == DataError::Kind::nonpositive_trials);
  CHECK(parse_error_kind("x,z,events,trials\n2,1,0,4\n") == DataError::Kind::level_out_of_range);
  CHECK(parse_error_kind("x,z,events,trials\n0,1,1,4,9\n") == DataError::Kind::bad_field);
  CHECK(parse_error_kind("x,z,events,trials\n0,1,1,4\n1,1,2,4\n") == DataError::Kind::missing_arm);

  try {
    parse_cell_csv("x,z,events,trials\n0,1,300,200\n");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("events exceed trials at row 1") != std::string::npos);
  }
}

TEST_CASE("expand_to_rows") {
  const auto rows = expand_to_rows(example_trial());
  CHECK(rows.size() == 800);
  CHECK(std::count_if(rows.begin(), rows.end(), [](const Row& r) { return r.y == 1; }) == 200);

  // A lone cell cannot form a table, so pair each with a minimal other arm.
  const auto zeros = expand_to_rows(CellTable({{0, 0, 0, 3}, {0, 1, 1, 1}}));
  CHECK(std::count(zeros.begin(), zeros.end(), Row{0, 0, 0}) == 3);
  const auto ones = expand_to_rows(CellTable({{1, 1, 2, 2}, {1, 0, 0, 1}}));
  CHECK(std::count(ones.begin(), ones.end(), Row{1, 1, 1}) == 2);
}

TEST_CASE("check_balance") {
  const auto report = check_balance(example_trial());
  CHECK(report.balanced);
  CHECK(report.counts.at(0) == std::array<long, 2>{200, 200});

  CHECK_FALSE(check_balance(CellTable({{0, 1, 5, 100}, {0, 0, 5, 200}})).balanced);
  CHECK_THROWS_AS(CellTable({{0, 1, 5, 100}, {1, 1, 5, 100}}), DataError);
}

TEST_CASE("property: expansion, CSV round trip and ordering invariance") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    CellTable table = (i % 2) ? oracle::random_table(rng) : oracle::random_balanced_table(rng);
    CHECK(aggregate_rows(expand_to_rows(table)) == table);
    CHECK(parse_cell_csv(render_cell_csv(table)) == table);

    std::vector<Cell> shuffled(table.cells().begin(), table.cells().end());
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const CellTable permuted(shuffled);
    CHECK(check_balance(permuted).balanced == check_balance(table).balanced);
    CHECK(check_balance(permuted).counts == check_balance(table).counts);
  }
}

TEST_CASE("scaled multiplies counts") {
  const auto t = example_trial().scaled(10);
  CHECK(t.cells()[2] == Cell{1, 1, 900, 2000});
  CHECK_THROWS(example_trial().scaled(0));
}
