#pragma once

#include <istream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "canonlink/effects.hpp"
#include "canonlink/explorer.hpp"
#include "canonlink/glm.hpp"

namespace canonlink {

// printf "%.17g". Callers map non-finite values to JSON null or an empty CSV
// field.
std::string format_number(double value);

// Rounds half-to-even at `decimals` places for human-facing output. Negative
// zero prints without a sign.
std::string format_rounded(double value, int decimals = 3);

// Flat mirror of the JSON document written by `canonlink fit` / `margins` /
// `iptw`. Fit fields are absent for an IPTW-only document.
struct ResultDocument {
  struct Fit {
    std::string link;
    bool adjusted = false;
    bool converged = false;
    std::string status;
    int iterations = 0;
    std::vector<double> coefficients;
    std::vector<double> standard_errors;
    std::vector<double> covariance;  // row-major
    double final_score_norm = 0.0;
    double log_likelihood = 0.0;

    friend bool operator==(const Fit&, const Fit&) = default;
  };
  struct Effect {
    std::string method;
    std::optional<std::string> link;
    double estimate = 0.0;
    double std_error = 0.0;

    friend bool operator==(const Effect&, const Effect&) = default;
  };

  std::optional<Fit> fit;
  std::vector<Effect> effects;

  friend bool operator==(const ResultDocument&, const ResultDocument&) = default;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ResultDocument make_document(const FitResult* fit, std::span<const MarginalEffect> effects);
std::string render_json(const ResultDocument& doc);
ResultDocument parse_result_json(const std::string& text);

// `e00,e01,e10,e11,link,unadjusted,adjusted,converged`, one row per record and
// link. Estimates are empty when the corresponding fit did not converge.
std::string render_records_csv(std::span<const GridRecord> records);
std::vector<GridRecord> parse_records_csv(std::istream& in);

std::string render_ba_csv(std::span<const BAPoint> points);
std::string render_pattern_report_json(const PatternReport& report);

}  // namespace canonlink
