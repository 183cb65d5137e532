#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "canonlink/cells.hpp"
#include "canonlink/link.hpp"

namespace canonlink {

// Binomial GLM for a two-arm trial. Unadjusted predictors are {1, z};
// adjusted predictors are {1, z, x}. Coefficient slot 1 is always treatment.
struct ModelSpec {
  LinkFunction link;
  bool adjusted = false;

  std::size_t predictor_count() const noexcept { return adjusted ? 3 : 2; }
  Eigen::VectorXd design_row(double x, double z) const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

inline constexpr std::size_t kInterceptIndex = 0;
inline constexpr std::size_t kTreatmentIndex = 1;
inline constexpr std::size_t kCovariateIndex = 2;

struct ScoreVector {
  Eigen::VectorXd components;
  // Set when some fitted probability fell outside the clamped working range.
  bool out_of_range = false;

  double max_abs() const { return components.size() ? components.cwiseAbs().maxCoeff() : 0.0; }
};

enum class FitStatus {
  converged,
  max_iterations,
  // Maximum likelihood lies at the edge of the parameter space (separation).
  separation,
  // Step halving could not keep identity/log fitted values inside the range.
  constrained_boundary,
};

std::string_view status_name(FitStatus status) noexcept;

struct FitResult {
  ModelSpec spec;
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;
  FitStatus status = FitStatus::max_iterations;
  int iterations = 0;
  double final_score_norm = 0.0;
  double log_likelihood = 0.0;

  bool converged() const noexcept { return status == FitStatus::converged; }
  double treatment() const { return coefficients[kTreatmentIndex]; }
  Eigen::VectorXd standard_errors() const;
};

struct FitOptions {
  int max_iterations = 100;
  int max_halvings = 20;
  double coefficient_tolerance = 1e-10;
  double score_tolerance = 1e-8;
};

// Thrown when the design matrix is not of full column rank.
class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Score over aggregated cells. Each cell contributes
//   d * (events - trials * mu) * h'(eta) / (mu (1 - mu))
// which for logit reduces to d * (events - trials * mu).
ScoreVector score(const ModelSpec& spec, const CellTable& table,
                  const Eigen::VectorXd& coefficients);

// Same score with the canonical simplification applied unconditionally;
// only meaningful for logit.
ScoreVector canonical_score(const ModelSpec& spec, const CellTable& table,
                            const Eigen::VectorXd& coefficients);

Eigen::MatrixXd expected_information(const ModelSpec& spec, const CellTable& table,
                                     const Eigen::VectorXd& coefficients);

// Binomial log-likelihood without the combinatorial constant. Returns
// -infinity when some fitted probability leaves [0, 1] or sits on a boundary
// that carries a nonzero count.
double log_likelihood(const ModelSpec& spec, const CellTable& table,
                      const Eigen::VectorXd& coefficients);

FitResult fit_glm(const ModelSpec& spec, const CellTable& table, const FitOptions& options = {});

// Individual-level fit, used to check that aggregation does not change the
// estimates.
FitResult fit_glm(const ModelSpec& spec, std::span<const Row> rows,
                  const FitOptions& options = {});

enum class NullPreservation { holds, fails, not_applicable };

// For a perfectly balanced table whose unadjusted treatment estimate is null
// (|b| <= 1e-8), reports whether the adjusted estimate is also null
// (|b| <= 1e-6). Anything else is not_applicable.
NullPreservation null_preservation_check(LinkFunction link, const CellTable& table);

}  // namespace canonlink
