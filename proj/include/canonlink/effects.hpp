#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "canonlink/cells.hpp"
#include "canonlink/glm.hpp"

namespace canonlink {

enum class EffectMethod { coefficient, standardization, iptw };

std::string_view method_name(EffectMethod method) noexcept;

// Marginal risk difference, experimental minus control, in probability units.
struct MarginalEffect {
  double estimate = 0.0;
  double std_error = 0.0;
  EffectMethod method = EffectMethod::standardization;
  // Outcome-model link; empty for IPTW, which fits no outcome model.
  std::optional<LinkKind> link;
};

class EffectError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Saturated model for P(Z = 1 | X = x) from cell totals.
struct PropensityModel {
  std::map<int, double> treated_probability;

  // Throws EffectError when some (x, z) combination is empty.
  static PropensityModel fit(const CellTable& table);
};

// g-computation: average over all individuals of h(eta | z=1) - h(eta | z=0),
// with a delta-method standard error that treats the covariate distribution
// as fixed.
MarginalEffect standardized_risk_difference(const FitResult& fit, const CellTable& table);

// Hajek (normalized-weight) IPTW difference of arm means.
MarginalEffect iptw_risk_difference(const CellTable& table);

// Treatment coefficient of an identity-link fit, with its model-based SE.
MarginalEffect coefficient_risk_difference(const FitResult& fit);

}  // namespace canonlink
