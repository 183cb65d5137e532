#include "canonlink/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "canonlink/cells.hpp"
#include "canonlink/effects.hpp"
#include "canonlink/explorer.hpp"
#include "canonlink/glm.hpp"
#include "canonlink/plot.hpp"
#include "canonlink/serialize.hpp"

namespace canonlink::cli {

namespace {

namespace fs = std::filesystem;

// Signals an input problem already worded for the user.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

CellTable read_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  try {
    return parse_cell_csv(in);
  } catch (const DataError& e) {
    throw InputError(path + ": " + e.what());
  }
}

LinkFunction parse_link(const std::string& name) {
  auto link = LinkFunction::from_name(name);
  if (!link) throw InputError("unknown link '" + name + "'");
  return *link;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw InputError("cannot write '" + path.string() + "'");
}

struct ModelFlags {
  std::string data;
  std::string link;
  bool adjusted = false;
  bool unadjusted = false;

  void attach(CLI::App* sub) {
    sub->add_option("--data", data, "cell CSV with header x,z,events,trials")->required();
    sub->add_option("--link", link, "logit|probit|identity|log|cloglog")->required();
    auto* a = sub->add_flag("--adjusted", adjusted, "adjust for the covariate x");
    auto* u = sub->add_flag("--unadjusted", unadjusted, "treatment only");
    a->excludes(u);
  }

  ModelSpec spec() const {
    const LinkFunction parsed = parse_link(link);
    if (!adjusted && !unadjusted) throw InputError("one of --adjusted or --unadjusted is required");
    return {parsed, adjusted};
  }
};

FitResult fit_or_throw(const ModelSpec& spec, const CellTable& table) {
  try {
    return fit_glm(spec, table);
  } catch (const RankDeficientError& e) {
    throw InputError(e.what());
  }
}

std::string summary_line(const MarginalEffect& e, const std::string& model) {
  return std::string(method_name(e.method)) + (model.empty() ? "" : " " + model) +
         ": risk difference " + format_rounded(e.estimate) + " (SE " +
         format_rounded(e.std_error) + ")";
}

int cmd_fit(const ModelFlags& flags, std::ostream& out, std::ostream& err) {
  const ModelSpec spec = flags.spec();
  const CellTable table = read_table(flags.data);
  const FitResult fit = fit_or_throw(spec, table);
  out << render_json(make_document(&fit, {}));
  if (!fit.converged()) {
    err << "fit did not converge: " << status_name(fit.status) << '\n';
    return kNotConverged;
  }
  return kSuccess;
}

int cmd_margins(const ModelFlags& flags, const std::string& method, std::ostream& out,
                std::ostream& err) {
  if (method != "standardization" && method != "coefficient") {
    throw InputError("unknown method '" + method + "'");
  }
  const ModelSpec spec = flags.spec();
  if (method == "coefficient" && spec.link.kind() != LinkKind::identity) {
    throw InputError("link mismatch: --method coefficient requires --link identity");
  }
  const CellTable table = read_table(flags.data);
  const FitResult fit = fit_or_throw(spec, table);
  if (!fit.converged()) {
    out << render_json(make_document(&fit, {}));
    err << "fit did not converge: " << status_name(fit.status) << '\n';
    return kNotConverged;
  }
  const MarginalEffect effect = method == "coefficient"
                                    ? coefficient_risk_difference(fit)
                                    : standardized_risk_difference(fit, table);
  out << render_json(make_document(&fit, std::span(&effect, 1)));
  err << summary_line(effect, std::string(spec.link.name()) +
                                  (spec.adjusted ? " adjusted" : " unadjusted"))
      << '\n';
  return kSuccess;
}

int cmd_iptw(const std::string& data, std::ostream& out, std::ostream& err) {
  const CellTable table = read_table(data);
  MarginalEffect effect;
  try {
    effect = iptw_risk_difference(table);
  } catch (const EffectError& e) {
    throw InputError(e.what());
  }
  out << render_json(make_document(nullptr, std::span(&effect, 1)));
  err << summary_line(effect, "") << '\n';
  return kSuccess;
}

int cmd_grid(const std::string& dir, std::ostream& err) {
  const fs::path out_dir(dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw InputError("cannot create directory '" + dir + "'");

  const GridSpec spec;
  const std::vector<GridRecord> records = run_grid(spec);
  write_file(out_dir / "records.csv", render_records_csv(records));
  for (LinkKind link : spec.links) {
    write_file(out_dir / ("ba_" + std::string(link_name(link)) + ".csv"),
               render_ba_csv(bland_altman(records, link)));
  }
  const PatternReport report = pattern_checks(records);
  write_file(out_dir / "pattern_report.json", render_pattern_report_json(report));

  for (const auto& p : report.links) {
    err << link_name(p.link) << ": " << p.converged << "/" << p.records << " converged, "
        << p.extremeness_violations << " extremeness violations, " << p.sign_flips
        << " sign flips\n";
  }
  if (!report.canonical_pattern_holds()) {
    err << "logit records violate the extremeness pattern\n";
    return kInputError;
  }
  return kSuccess;
}

int cmd_plot(const std::string& records_path, const std::string& svg_path) {
  std::ifstream in(records_path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + records_path + "'");
  std::vector<GridRecord> records;
  try {
    records = parse_records_csv(in);
  } catch (const FormatError& e) {
    throw InputError(records_path + ": " + e.what());
  }
  const auto panels = bland_altman_panels(records);
  std::string svg;
  try {
    svg = render_bland_altman_svg(panels);
  } catch (const PlotError& e) {
    throw InputError(e.what());
  }
  write_file(svg_path, svg);
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Binomial GLM covariate adjustment for two-arm randomized trials", "canonlink"};
  app.require_subcommand(1);

  ModelFlags fit_flags;
  auto* fit = app.add_subcommand("fit", "fit a binomial GLM and print it as JSON");
  fit_flags.attach(fit);

  ModelFlags margin_flags;
  std::string method = "standardization";
  auto* margins = app.add_subcommand("margins", "marginal risk difference from a fitted model");
  margin_flags.attach(margins);
  margins->add_option("--method", method, "standardization|coefficient");

  std::string iptw_data;
  auto* iptw = app.add_subcommand("iptw", "inverse probability of treatment weighted risk difference");
  iptw->add_option("--data", iptw_data, "cell CSV")->required();

  std::string grid_dir;
  auto* grid = app.add_subcommand("grid", "run the balanced-trial grid experiment");
  grid->add_option("--out", grid_dir, "output directory")->required();

  std::string plot_records, plot_out;
  auto* plot = app.add_subcommand("plot", "Bland-Altman SVG from grid records");
  plot->add_option("--records", plot_records, "records.csv from grid")->required();
  plot->add_option("--out", plot_out, "SVG output path")->required();

  std::vector<std::string> argv_storage{"canonlink"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kInputError;
  }

  try {
    if (*fit) return cmd_fit(fit_flags, out, err);
    if (*margins) return cmd_margins(margin_flags, method, out, err);
    if (*iptw) return cmd_iptw(iptw_data, out, err);
    if (*grid) return cmd_grid(grid_dir, err);
    if (*plot) return cmd_plot(plot_records, plot_out);
  } catch (const InputError& e) {
    err << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace canonlink::cli
