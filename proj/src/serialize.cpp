#include "canonlink/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace canonlink {

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_rounded(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // nearbyint honours the default round-to-nearest-even mode.
  double scaled = std::nearbyint(value * scale);
  if (scaled == 0.0) scaled = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, scaled / scale);
  return buf;
}

namespace {

std::string json_number(double v) { return std::isfinite(v) ? format_number(v) : "null"; }

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_array(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += json_number(values[i]);
  }
  return out + "]";
}

double number_or_nan(const nlohmann::json& j) {
  return j.is_null() ? std::nan("") : j.get<double>();
}

std::vector<double> number_array(const nlohmann::json& j) {
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number_or_nan(v));
  return out;
}

}  // namespace

ResultDocument make_document(const FitResult* fit, std::span<const MarginalEffect> effects) {
  ResultDocument doc;
  if (fit != nullptr) {
    ResultDocument::Fit f;
    f.link = std::string(fit->spec.link.name());
    f.adjusted = fit->spec.adjusted;
    f.converged = fit->converged();
    f.status = std::string(status_name(fit->status));
    f.iterations = fit->iterations;
    const Eigen::VectorXd se = fit->standard_errors();
    f.coefficients.assign(fit->coefficients.begin(), fit->coefficients.end());
    f.standard_errors.assign(se.begin(), se.end());
    for (Eigen::Index i = 0; i < fit->covariance.rows(); ++i)
      for (Eigen::Index j = 0; j < fit->covariance.cols(); ++j)
        f.covariance.push_back(fit->covariance(i, j));
    f.final_score_norm = fit->final_score_norm;
    f.log_likelihood = fit->log_likelihood;
    doc.fit = std::move(f);
  }
  for (const auto& e : effects) {
    ResultDocument::Effect out;
    out.method = std::string(method_name(e.method));
    if (e.link) out.link = std::string(link_name(*e.link));
    out.estimate = e.estimate;
    out.std_error = e.std_error;
    doc.effects.push_back(std::move(out));
  }
  return doc;
}

std::string render_json(const ResultDocument& doc) {
  std::ostringstream os;
  os << "{\n";
  if (doc.fit) {
    const auto& f = *doc.fit;
    os << "  \"link\": " << json_string(f.link) << ",\n"
       << "  \"adjusted\": " << (f.adjusted ? "true" : "false") << ",\n"
       << "  \"converged\": " << (f.converged ? "true" : "false") << ",\n"
       << "  \"status\": " << json_string(f.status) << ",\n"
       << "  \"iterations\": " << f.iterations << ",\n"
       << "  \"coefficients\": " << json_array(f.coefficients) << ",\n"
       << "  \"standard_errors\": " << json_array(f.standard_errors) << ",\n"
       << "  \"covariance\": " << json_array(f.covariance) << ",\n"
       << "  \"final_score_norm\": " << json_number(f.final_score_norm) << ",\n"
       << "  \"log_likelihood\": " << json_number(f.log_likelihood) << ",\n";
  }
  os << "  \"effects\": [";
  for (std::size_t i = 0; i < doc.effects.size(); ++i) {
    const auto& e = doc.effects[i];
    os << (i ? ",\n" : "\n") << "    {\"method\": " << json_string(e.method)
       << ", \"link\": " << (e.link ? json_string(*e.link) : "null")
       << ", \"estimate\": " << json_number(e.estimate)
       << ", \"std_error\": " << json_number(e.std_error) << "}";
  }
  os << (doc.effects.empty() ? "]\n" : "\n  ]\n") << "}\n";
  return os.str();
}

ResultDocument parse_result_json(const std::string& text) {
  ResultDocument doc;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("link")) {
      ResultDocument::Fit f;
      f.link = j.at("link").get<std::string>();
      f.adjusted = j.at("adjusted").get<bool>();
      f.converged = j.at("converged").get<bool>();
      f.status = j.at("status").get<std::string>();
      f.iterations = j.at("iterations").get<int>();
      f.coefficients = number_array(j.at("coefficients"));
      f.standard_errors = number_array(j.at("standard_errors"));
      f.covariance = number_array(j.at("covariance"));
      f.final_score_norm = number_or_nan(j.at("final_score_norm"));
      f.log_likelihood = number_or_nan(j.at("log_likelihood"));
      doc.fit = std::move(f);
    }
    for (const auto& e : j.at("effects")) {
      ResultDocument::Effect out;
      out.method = e.at("method").get<std::string>();
      if (!e.at("link").is_null()) out.link = e.at("link").get<std::string>();
      out.estimate = number_or_nan(e.at("estimate"));
      out.std_error = number_or_nan(e.at("std_error"));
      doc.effects.push_back(std::move(out));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("malformed result document: ") + ex.what());
  }
  return doc;
}

namespace {

std::string csv_number(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? format_number(*v) : std::string();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string render_records_csv(std::span<const GridRecord> records) {
  std::string out = "e00,e01,e10,e11,link,unadjusted,adjusted,converged\n";
  for (const auto& r : records) {
    for (const auto& e : r.estimates) {
      for (long v : r.events) out += std::to_string(v) + ',';
      out += std::string(link_name(e.link)) + ',' + csv_number(e.unadjusted) + ',' +
             csv_number(e.adjusted) + ',' + (e.converged() ? "1" : "0") + '\n';
    }
  }
  return out;
}

std::vector<GridRecord> parse_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("records file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "e00,e01,e10,e11,link,unadjusted,adjusted,converged") {
    throw FormatError("records file has an unexpected header");
  }
  std::vector<GridRecord> records;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto fields = split_csv(line);
    const std::string where = " at row " + std::to_string(row);
    if (fields.size() != 8) throw FormatError("expected 8 fields" + where);
    try {
      GridEvents events{};
      for (int i = 0; i < 4; ++i) {
        std::size_t used = 0;
        events[i] = std::stol(fields[i], &used);
        if (used != fields[i].size()) throw std::invalid_argument(fields[i]);
      }
      auto link = LinkFunction::from_name(fields[4]);
      if (!link) throw FormatError("unknown link '" + fields[4] + "'" + where);
      LinkEstimates est;
      est.link = link->kind();
      auto parse_opt = [](const std::string& s) -> std::optional<double> {
        if (s.empty()) return std::nullopt;
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      };
      est.unadjusted = parse_opt(fields[5]);
      est.adjusted = parse_opt(fields[6]);
      if (fields[7] != "0" && fields[7] != "1") throw std::invalid_argument(fields[7]);
      if ((fields[7] == "1") != est.converged()) {
        throw FormatError("converged flag disagrees with estimates" + where);
      }
      est.unadjusted_status = est.unadjusted ? FitStatus::converged : FitStatus::max_iterations;
      est.adjusted_status = est.adjusted ? FitStatus::converged : FitStatus::max_iterations;
      if (records.empty() || records.back().events != events) {
        records.push_back({events, 0, {}});
      }
      records.back().estimates.push_back(est);
    } catch (const std::logic_error&) {
      throw FormatError("malformed field" + where);
    }
  }
  return records;
}

std::string render_ba_csv(std::span<const BAPoint> points) {
  std::string out = "mean,diff\n";
  for (const auto& p : points) out += format_number(p.mean) + ',' + format_number(p.diff) + '\n';
  return out;
}

std::string render_pattern_report_json(const PatternReport& report) {
  std::ostringstream os;
  os << "{\n  \"canonical_pattern_holds\": "
     << (report.canonical_pattern_holds() ? "true" : "false") << ",\n  \"links\": [";
  for (std::size_t i = 0; i < report.links.size(); ++i) {
    const auto& p = report.links[i];
    os << (i ? ",\n" : "\n") << "    {\"link\": \"" << link_name(p.link) << "\""
       << ", \"records\": " << p.records << ", \"converged\": " << p.converged
       << ", \"nonconverged\": " << p.nonconverged
       << ", \"extremeness_violations\": " << p.extremeness_violations
       << ", \"sign_flips\": " << p.sign_flips << "}";
  }
  os << "\n  ]\n}\n";
  return os.str();
}

}  // namespace canonlink
