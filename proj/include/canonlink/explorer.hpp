#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "canonlink/cells.hpp"
#include "canonlink/glm.hpp"

namespace canonlink {

// Grid of balanced four-cell trials: every cell has `trials` individuals and
// an event count drawn from low, low+step, ..., high.
struct GridSpec {
  long low = 10;
  long high = 20;
  long step = 2;
  long trials = 200;
  std::vector<LinkKind> links{LinkKind::identity, LinkKind::log, LinkKind::logit};

  // Throws std::invalid_argument if the range is empty, step does not divide
  // (high - low), or counts fall outside [0, trials].
  void validate() const;
  std::size_t levels() const;
  std::size_t dataset_count() const;
};

// Event counts indexed by (x, z) as e00, e01, e10, e11.
using GridEvents = std::array<long, 4>;

inline constexpr std::size_t event_index(int x, int z) { return std::size_t(2 * x + z); }

struct LinkEstimates {
  LinkKind link = LinkKind::logit;
  FitStatus unadjusted_status = FitStatus::max_iterations;
  FitStatus adjusted_status = FitStatus::max_iterations;
  std::optional<double> unadjusted;
  std::optional<double> adjusted;

  bool converged() const noexcept { return unadjusted.has_value() && adjusted.has_value(); }
};

struct GridRecord {
  GridEvents events{};
  long trials = 200;
  std::vector<LinkEstimates> estimates;

  const LinkEstimates* find(LinkKind link) const;
};

struct BAPoint {
  double mean = 0.0;
  double diff = 0.0;
};

struct LinkPattern {
  LinkKind link = LinkKind::logit;
  std::size_t records = 0;
  std::size_t converged = 0;
  std::size_t nonconverged = 0;
  // Records where the adjusted estimate is less extreme than, or of opposite
  // sign to, the unadjusted one.
  std::size_t extremeness_violations = 0;
  // Records where both estimates exceed the null floor and signs differ.
  std::size_t sign_flips = 0;
};

struct PatternReport {
  std::vector<LinkPattern> links;

  const LinkPattern* find(LinkKind link) const;
  // True when the logit panel has no extremeness violations.
  bool canonical_pattern_holds() const;
};

inline constexpr double kExtremenessTolerance = 1e-9;
inline constexpr double kSignFloor = 1e-6;

// Lexicographic over (e(x0,z1), e(x0,z0), e(x1,z1), e(x1,z0)).
std::vector<CellTable> generate_grid(const GridSpec& spec);

GridEvents events_of(const CellTable& table);

// threads == 0 uses CANONLINK_THREADS or the hardware concurrency. Output
// order follows generate_grid regardless of scheduling.
std::vector<GridRecord> run_grid(const GridSpec& spec, unsigned threads = 0);

GridRecord analyse_table(const CellTable& table, std::span<const LinkKind> links);

BAPoint bland_altman_point(double unadjusted, double adjusted);
std::vector<BAPoint> bland_altman(std::span<const GridRecord> records, LinkKind link);

PatternReport pattern_checks(std::span<const GridRecord> records);

// Reads CANONLINK_THREADS; falls back to hardware concurrency.
unsigned default_thread_count();

}  // namespace canonlink
