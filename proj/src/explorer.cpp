#include "canonlink/explorer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

namespace canonlink {

void GridSpec::validate() const {
  if (step <= 0) throw std::invalid_argument("grid step must be positive");
  if (high < low) throw std::invalid_argument("grid range is empty");
  if ((high - low) % step != 0) throw std::invalid_argument("grid step must divide the range");
  if (low < 0 || high > trials || trials < 1) {
    throw std::invalid_argument("grid event counts must lie in [0, trials]");
  }
  if (links.empty()) throw std::invalid_argument("grid needs at least one link");
}

std::size_t GridSpec::levels() const {
  validate();
  return std::size_t((high - low) / step + 1);
}

std::size_t GridSpec::dataset_count() const {
  std::size_t k = levels();
  return k * k * k * k;
}

const LinkEstimates* GridRecord::find(LinkKind link) const {
  for (const auto& e : estimates)
    if (e.link == link) return &e;
  return nullptr;
}

const LinkPattern* PatternReport::find(LinkKind link) const {
  for (const auto& p : links)
    if (p.link == link) return &p;
  return nullptr;
}

bool PatternReport::canonical_pattern_holds() const {
  const LinkPattern* logit = find(LinkKind::logit);
  return logit != nullptr && logit->extremeness_violations == 0;
}

std::vector<CellTable> generate_grid(const GridSpec& spec) {
  const std::size_t k = spec.levels();
  std::vector<CellTable> out;
  out.reserve(spec.dataset_count());
  auto level = [&](std::size_t i) { return spec.low + long(i) * spec.step; };
  const long n = spec.trials;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t c = 0; c < k; ++c)
        for (std::size_t d = 0; d < k; ++d) {
          out.emplace_back(std::vector<Cell>{{0, 1, level(a), n},
                                             {0, 0, level(b), n},
                                             {1, 1, level(c), n},
                                             {1, 0, level(d), n}});
        }
  return out;
}

GridEvents events_of(const CellTable& table) {
  GridEvents e{};
  for (const auto& c : table.cells()) e[event_index(c.x, c.z)] = c.events;
  return e;
}

GridRecord analyse_table(const CellTable& table, std::span<const LinkKind> links) {
  GridRecord record;
  record.events = events_of(table);
  record.trials = table.cells().front().trials;
  for (LinkKind link : links) {
    LinkEstimates est;
    est.link = link;
    FitResult unadjusted = fit_glm({LinkFunction(link), false}, table);
    FitResult adjusted = fit_glm({LinkFunction(link), true}, table);
    est.unadjusted_status = unadjusted.status;
    est.adjusted_status = adjusted.status;
    if (unadjusted.converged()) est.unadjusted = unadjusted.treatment();
    if (adjusted.converged()) est.adjusted = adjusted.treatment();
    record.estimates.push_back(est);
  }
  return record;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("CANONLINK_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return unsigned(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<GridRecord> run_grid(const GridSpec& spec, unsigned threads) {
  const std::vector<CellTable> tables = generate_grid(spec);
  std::vector<GridRecord> records(tables.size());
  if (threads == 0) threads = default_thread_count();
  threads = std::min<unsigned>(threads, unsigned(std::max<std::size_t>(tables.size(), 1)));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tables.size(); i = next++) {
      records[i] = analyse_table(tables[i], spec.links);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return records;
}

BAPoint bland_altman_point(double unadjusted, double adjusted) {
  return {(unadjusted + adjusted) / 2.0, adjusted - unadjusted};
}

std::vector<BAPoint> bland_altman(std::span<const GridRecord> records, LinkKind link) {
  std::vector<BAPoint> out;
  for (const auto& r : records) {
    const LinkEstimates* e = r.find(link);
    if (e != nullptr && e->converged()) out.push_back(bland_altman_point(*e->unadjusted, *e->adjusted));
  }
  return out;
}

namespace {

int sign_of(double v, double floor) { return v > floor ? 1 : (v < -floor ? -1 : 0); }

}  // namespace

PatternReport pattern_checks(std::span<const GridRecord> records) {
  PatternReport report;
  for (const auto& r : records) {
    for (const auto& e : r.estimates) {
      auto it = std::find_if(report.links.begin(), report.links.end(),
                             [&](const LinkPattern& p) { return p.link == e.link; });
      if (it == report.links.end()) {
        report.links.push_back({e.link});
        it = report.links.end() - 1;
      }
      ++it->records;
      if (!e.converged()) {
        ++it->nonconverged;
        continue;
      }
      ++it->converged;
      const double u = *e.unadjusted, a = *e.adjusted;
      const int su = sign_of(u, kExtremenessTolerance), sa = sign_of(a, kExtremenessTolerance);
      if (std::abs(a) < std::abs(u) - kExtremenessTolerance || (su != 0 && sa != 0 && su != sa)) {
        ++it->extremeness_violations;
      }
      if (std::abs(u) > kSignFloor && std::abs(a) > kSignFloor && (u > 0) != (a > 0)) {
        ++it->sign_flips;
      }
    }
  }
  return report;
}

}  // namespace canonlink
