#include "canonlink/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace canonlink {

namespace {

constexpr double kLeft = 72, kRight = 20, kTop = 34, kBottom = 46;

struct Range {
  double lo, hi;
  double span() const { return hi - lo; }
};

// Data extent including zero, padded 5% on each side.
Range axis_range(const std::vector<double>& values) {
  double lo = 0.0, hi = 0.0;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo <= 0.0) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-15 ? 0.0 : v);
  return buf;
}

std::string panel_title(LinkKind link) {
  std::string name(link_name(link));
  return name + " link" + (LinkFunction(link).canonical() ? " (canonical)" : " (non-canonical)");
}

void draw_panel(std::ostringstream& os, const PlotPanel& panel, int index) {
  const double y0 = double(index) * kPanelHeight;
  const double px0 = kLeft, px1 = kPanelWidth - kRight;
  const double py0 = y0 + kTop, py1 = y0 + kPanelHeight - kBottom;

  std::vector<double> xs, ys;
  for (const auto& p : panel.points) {
    xs.push_back(p.mean);
    ys.push_back(p.diff);
  }
  const Range rx = axis_range(xs), ry = axis_range(ys);
  auto sx = [&](double v) { return px0 + (v - rx.lo) / rx.span() * (px1 - px0); };
  auto sy = [&](double v) { return py1 - (v - ry.lo) / ry.span() * (py1 - py0); };

  os << "<g id=\"panel-" << link_name(panel.link) << "\">\n";
  os << "<text x=\"" << fmt((px0 + px1) / 2) << "\" y=\"" << fmt(y0 + 20)
     << "\" text-anchor=\"middle\" font-size=\"14\">" << panel_title(panel.link) << "</text>\n";
  os << "<rect x=\"" << fmt(px0) << "\" y=\"" << fmt(py0) << "\" width=\"" << fmt(px1 - px0)
     << "\" height=\"" << fmt(py1 - py0) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double vx = rx.lo + rx.span() * i / 4.0;
    const double vy = ry.lo + ry.span() * i / 4.0;
    os << "<line x1=\"" << fmt(sx(vx)) << "\" y1=\"" << fmt(py1) << "\" x2=\"" << fmt(sx(vx))
       << "\" y2=\"" << fmt(py1 + 4) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt(sx(vx)) << "\" y=\"" << fmt(py1 + 16)
       << "\" text-anchor=\"middle\" font-size=\"10\">" << tick_label(vx) << "</text>\n";
    os << "<line x1=\"" << fmt(px0 - 4) << "\" y1=\"" << fmt(sy(vy)) << "\" x2=\"" << fmt(px0)
       << "\" y2=\"" << fmt(sy(vy)) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt(px0 - 6) << "\" y=\"" << fmt(sy(vy) + 3)
       << "\" text-anchor=\"end\" font-size=\"10\">" << tick_label(vy) << "</text>\n";
  }

  // zero reference lines
  os << "<line class=\"zero\" x1=\"" << fmt(px0) << "\" y1=\"" << fmt(sy(0)) << "\" x2=\""
     << fmt(px1) << "\" y2=\"" << fmt(sy(0)) << "\" stroke=\"gray\" stroke-dasharray=\"4,3\"/>\n";
  os << "<line class=\"zero\" x1=\"" << fmt(sx(0)) << "\" y1=\"" << fmt(py0) << "\" x2=\""
     << fmt(sx(0)) << "\" y2=\"" << fmt(py1) << "\" stroke=\"gray\" stroke-dasharray=\"4,3\"/>\n";

  for (const auto& p : panel.points) {
    os << "<circle cx=\"" << fmt(sx(p.mean)) << "\" cy=\"" << fmt(sy(p.diff))
       << "\" r=\"2\" fill=\"steelblue\" fill-opacity=\"0.6\"/>\n";
  }
  if (panel.points.empty()) {
    os << "<text x=\"" << fmt((px0 + px1) / 2) << "\" y=\"" << fmt((py0 + py1) / 2)
       << "\" text-anchor=\"middle\" font-size=\"12\">no converged fits</text>\n";
  }

  os << "<text x=\"" << fmt((px0 + px1) / 2) << "\" y=\"" << fmt(y0 + kPanelHeight - 8)
     << "\" text-anchor=\"middle\" font-size=\"12\">mean of estimates</text>\n";
  const double cy = (py0 + py1) / 2;
  os << "<text x=\"16\" y=\"" << fmt(cy) << "\" text-anchor=\"middle\" font-size=\"12\""
     << " transform=\"rotate(-90 16 " << fmt(cy) << ")\">adjusted \xE2\x88\x92 unadjusted</text>\n";
  if (panel.omitted > 0) {
    os << "<text x=\"" << fmt(px1 - 4) << "\" y=\"" << fmt(py0 + 14)
       << "\" text-anchor=\"end\" font-size=\"10\">" << panel.omitted
       << " non-converged omitted</text>\n";
  }
  os << "</g>\n";
}

}  // namespace

std::vector<PlotPanel> bland_altman_panels(std::span<const GridRecord> records) {
  std::vector<PlotPanel> panels;
  for (LinkKind link : {LinkKind::logit, LinkKind::identity, LinkKind::log}) {
    PlotPanel panel;
    panel.link = link;
    panel.points = bland_altman(records, link);
    for (const auto& r : records) {
      const LinkEstimates* e = r.find(link);
      if (e != nullptr && !e->converged()) ++panel.omitted;
    }
    panels.push_back(std::move(panel));
  }
  return panels;
}

std::string render_bland_altman_svg(std::span<const PlotPanel> panels) {
  const bool any = std::any_of(panels.begin(), panels.end(),
                               [](const PlotPanel& p) { return !p.points.empty(); });
  if (!any) throw PlotError("no points");

  std::ostringstream os;
  const int height = kPanelHeight * int(panels.size());
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPanelWidth << "\" height=\""
     << height << "\" viewBox=\"0 0 " << kPanelWidth << ' ' << height
     << "\" font-family=\"sans-serif\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) draw_panel(os, panels[i], int(i));
  os << "</svg>\n";
  return os.str();
}

}  // namespace canonlink
