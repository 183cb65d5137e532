#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "canonlink/cells.hpp"
#include "canonlink/cli.hpp"
#include "canonlink/effects.hpp"
#include "canonlink/explorer.hpp"
#include "canonlink/glm.hpp"
#include "canonlink/serialize.hpp"

namespace py = pybind11;
using namespace canonlink;

namespace {

LinkFunction to_link(const py::object& link) {
  if (py::isinstance<py::str>(link)) {
    const auto name = link.cast<std::string>();
    auto parsed = LinkFunction::from_name(name);
    if (!parsed) throw py::value_error("unknown link '" + name + "'");
    return *parsed;
  }
  return LinkFunction(link.cast<LinkKind>());
}

CellTable table_from(const py::iterable& cells) {
  std::vector<Cell> out;
  for (const auto& item : cells) {
    if (py::isinstance<Cell>(item)) {
      out.push_back(item.cast<Cell>());
    } else {
      const auto t = item.cast<std::tuple<int, int, long, long>>();
      out.push_back({std::get<0>(t), std::get<1>(t), std::get<2>(t), std::get<3>(t)});
    }
  }
  return CellTable(std::move(out));
}

}  // namespace

PYBIND11_MODULE(_canonlink, m) {
  m.doc() = "Binomial GLM covariate adjustment for two-arm randomized trials";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<EffectError>(m, "EffectError", PyExc_ValueError);
  py::register_exception<RankDeficientError>(m, "RankDeficientError", PyExc_ValueError);

  py::enum_<LinkKind>(m, "LinkKind")
      .value("logit", LinkKind::logit)
      .value("probit", LinkKind::probit)
      .value("identity", LinkKind::identity)
      .value("log", LinkKind::log)
      .value("cloglog", LinkKind::cloglog);

  py::enum_<FitStatus>(m, "FitStatus")
      .value("converged", FitStatus::converged)
      .value("max_iterations", FitStatus::max_iterations)
      .value("separation", FitStatus::separation)
      .value("constrained_boundary", FitStatus::constrained_boundary);

  py::enum_<EffectMethod>(m, "EffectMethod")
      .value("coefficient", EffectMethod::coefficient)
      .value("standardization", EffectMethod::standardization)
      .value("iptw", EffectMethod::iptw);

  py::enum_<NullPreservation>(m, "NullPreservation")
      .value("holds", NullPreservation::holds)
      .value("fails", NullPreservation::fails)
      .value("not_applicable", NullPreservation::not_applicable);

  py::class_<Cell>(m, "Cell")
      .def(py::init([](int x, int z, long events, long trials) { return Cell{x, z, events, trials}; }),
           py::arg("x"), py::arg("z"), py::arg("events"), py::arg("trials"))
      .def_readonly("x", &Cell::x)
      .def_readonly("z", &Cell::z)
      .def_readonly("events", &Cell::events)
      .def_readonly("trials", &Cell::trials)
      .def(py::self == py::self)
      .def("__repr__", [](const Cell& c) {
        std::ostringstream os;
        os << "Cell(x=" << c.x << ", z=" << c.z << ", events=" << c.events
           << ", trials=" << c.trials << ")";
        return os.str();
      });

  py::class_<CellTable>(m, "CellTable")
      .def(py::init(&table_from), py::arg("cells"),
           "Cells as Cell objects or (x, z, events, trials) tuples.")
      .def_property_readonly("cells",
                             [](const CellTable& t) {
                               return std::vector<Cell>(t.cells().begin(), t.cells().end());
                             })
      .def("__len__", &CellTable::size)
      .def_property_readonly("total_trials", &CellTable::total_trials)
      .def_property_readonly("total_events", &CellTable::total_events)
      .def("arm_trials", &CellTable::arm_trials, py::arg("z"))
      .def("arm_events", &CellTable::arm_events, py::arg("z"))
      .def("scaled", &CellTable::scaled, py::arg("factor"))
      .def("is_balanced", [](const CellTable& t) { return check_balance(t).balanced; })
      .def(py::self == py::self);

  m.def("parse_cell_csv", py::overload_cast<std::string_view>(&parse_cell_csv), py::arg("text"));
  m.def("render_cell_csv", &render_cell_csv, py::arg("table"));
  m.def("example_trial", &example_trial);

  py::class_<FitResult>(m, "FitResult")
      .def_property_readonly("link", [](const FitResult& f) { return f.spec.link.kind(); })
      .def_property_readonly("adjusted", [](const FitResult& f) { return f.spec.adjusted; })
      .def_readonly("coefficients", &FitResult::coefficients)
      .def_readonly("covariance", &FitResult::covariance)
      .def_readonly("status", &FitResult::status)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("final_score_norm", &FitResult::final_score_norm)
      .def_readonly("log_likelihood", &FitResult::log_likelihood)
      .def_property_readonly("converged", &FitResult::converged)
      .def_property_readonly("treatment", &FitResult::treatment)
      .def_property_readonly("standard_errors", &FitResult::standard_errors)
      .def("to_json", [](const FitResult& f) { return render_json(make_document(&f, {})); });

  m.def(
      "fit_glm",
      [](const CellTable& table, const py::object& link, bool adjusted, int max_iterations) {
        FitOptions opts;
        opts.max_iterations = max_iterations;
        return fit_glm({to_link(link), adjusted}, table, opts);
      },
      py::arg("table"), py::arg("link"), py::arg("adjusted"), py::arg("max_iterations") = 100);

  py::class_<MarginalEffect>(m, "MarginalEffect")
      .def_readonly("estimate", &MarginalEffect::estimate)
      .def_readonly("std_error", &MarginalEffect::std_error)
      .def_readonly("method", &MarginalEffect::method)
      .def_readonly("link", &MarginalEffect::link);

  m.def("standardized_risk_difference", &standardized_risk_difference, py::arg("fit"),
        py::arg("table"));
  m.def("iptw_risk_difference", &iptw_risk_difference, py::arg("table"));
  m.def("coefficient_risk_difference", &coefficient_risk_difference, py::arg("fit"));
  m.def(
      "null_preservation_check",
      [](const py::object& link, const CellTable& table) {
        return null_preservation_check(to_link(link), table);
      },
      py::arg("link"), py::arg("table"));

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_readwrite("low", &GridSpec::low)
      .def_readwrite("high", &GridSpec::high)
      .def_readwrite("step", &GridSpec::step)
      .def_readwrite("trials", &GridSpec::trials)
      .def_readwrite("links", &GridSpec::links)
      .def("dataset_count", &GridSpec::dataset_count);

  py::class_<LinkEstimates>(m, "LinkEstimates")
      .def_readonly("link", &LinkEstimates::link)
      .def_readonly("unadjusted_status", &LinkEstimates::unadjusted_status)
      .def_readonly("adjusted_status", &LinkEstimates::adjusted_status)
      .def_readonly("unadjusted", &LinkEstimates::unadjusted)
      .def_readonly("adjusted", &LinkEstimates::adjusted)
      .def_property_readonly("converged", &LinkEstimates::converged);

  py::class_<GridRecord>(m, "GridRecord")
      .def_readonly("events", &GridRecord::events)
      .def_readonly("trials", &GridRecord::trials)
      .def_readonly("estimates", &GridRecord::estimates);

  py::class_<LinkPattern>(m, "LinkPattern")
      .def_readonly("link", &LinkPattern::link)
      .def_readonly("records", &LinkPattern::records)
      .def_readonly("converged", &LinkPattern::converged)
      .def_readonly("nonconverged", &LinkPattern::nonconverged)
      .def_readonly("extremeness_violations", &LinkPattern::extremeness_violations)
      .def_readonly("sign_flips", &LinkPattern::sign_flips);

  py::class_<PatternReport>(m, "PatternReport")
      .def_readonly("links", &PatternReport::links)
      .def_property_readonly("canonical_pattern_holds", &PatternReport::canonical_pattern_holds)
      .def("find", [](const PatternReport& r, LinkKind k) -> py::object {
        const LinkPattern* p = r.find(k);
        return p ? py::cast(*p) : py::none();
      });

  m.def(
      "run_grid", [](const GridSpec& spec, unsigned threads) { return run_grid(spec, threads); },
      py::arg("spec") = GridSpec{}, py::arg("threads") = 0u,
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "pattern_checks",
      [](const std::vector<GridRecord>& records) { return pattern_checks(records); },
      py::arg("records"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
