#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "canonlink/explorer.hpp"

namespace canonlink {

struct PlotPanel {
  LinkKind link = LinkKind::logit;
  std::vector<BAPoint> points;
  std::size_t omitted = 0;  // non-converged pairs left out of the panel
};

class PlotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kPanelWidth = 600;
inline constexpr int kPanelHeight = 300;

// Panels in display order logit, identity, log, built from grid records.
std::vector<PlotPanel> bland_altman_panels(std::span<const GridRecord> records);

// Vertically stacked Bland-Altman panels. Throws PlotError("no points") when
// every panel is empty.
std::string render_bland_altman_svg(std::span<const PlotPanel> panels);

}  // namespace canonlink
