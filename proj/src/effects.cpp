#include "canonlink/effects.hpp"

#include <algorithm>
#include <cmath>

namespace canonlink {

std::string_view method_name(EffectMethod method) noexcept {
  switch (method) {
    case EffectMethod::coefficient: return "coefficient";
    case EffectMethod::standardization: return "standardization";
    case EffectMethod::iptw: return "iptw";
  }
  return "?";
}

PropensityModel PropensityModel::fit(const CellTable& table) {
  std::map<int, std::array<long, 2>> counts;
  for (const auto& c : table.cells()) counts[c.x][c.z] += c.trials;
  PropensityModel model;
  for (const auto& [x, n] : counts) {
    if (n[0] == 0 || n[1] == 0) {
      throw EffectError("positivity violation: covariate level " + std::to_string(x) +
                        " is missing an arm");
    }
    model.treated_probability[x] = double(n[1]) / double(n[0] + n[1]);
  }
  return model;
}

MarginalEffect standardized_risk_difference(const FitResult& fit, const CellTable& table) {
  if (!fit.converged()) throw EffectError("standardization requires a converged fit");
  const ModelSpec& spec = fit.spec;
  const Eigen::VectorXd& b = fit.coefficients;
  const double n = double(table.total_trials());

  double estimate = 0.0;
  Eigen::VectorXd gradient = Eigen::VectorXd::Zero(b.size());
  for (const auto& c : table.cells()) {
    Eigen::VectorXd treated = spec.design_row(c.x, 1);
    Eigen::VectorXd control = spec.design_row(c.x, 0);
    double eta1 = treated.dot(b);
    double eta0 = control.dot(b);
    double w = double(c.trials) / n;
    estimate += w * (spec.link.inverse(eta1) - spec.link.inverse(eta0));
    gradient += w * (spec.link.inverse_derivative(eta1) * treated -
                     spec.link.inverse_derivative(eta0) * control);
  }
  double variance = gradient.dot(fit.covariance * gradient);
  return {estimate, std::sqrt(std::max(variance, 0.0)), EffectMethod::standardization,
          spec.link.kind()};
}

MarginalEffect iptw_risk_difference(const CellTable& table) {
  const PropensityModel ps = PropensityModel::fit(table);

  // Per arm: normalized weights w_i / sum(w); mean = sum(w~ y);
  // var(mean) = sum(w~^2 (y - mean)^2).
  double sum_w[2] = {0, 0}, sum_wy[2] = {0, 0};
  for (const auto& c : table.cells()) {
    double e = ps.treated_probability.at(c.x);
    double w = c.z == 1 ? 1.0 / e : 1.0 / (1.0 - e);
    sum_w[c.z] += w * double(c.trials);
    sum_wy[c.z] += w * double(c.events);
  }
  double mean[2] = {sum_wy[0] / sum_w[0], sum_wy[1] / sum_w[1]};
  double var[2] = {0, 0};
  for (const auto& c : table.cells()) {
    double e = ps.treated_probability.at(c.x);
    double w = (c.z == 1 ? 1.0 / e : 1.0 / (1.0 - e)) / sum_w[c.z];
    double m = mean[c.z];
    var[c.z] += w * w *
                (double(c.events) * (1 - m) * (1 - m) + double(c.trials - c.events) * m * m);
  }
  return {mean[1] - mean[0], std::sqrt(var[0] + var[1]), EffectMethod::iptw, std::nullopt};
}

MarginalEffect coefficient_risk_difference(const FitResult& fit) {
  if (fit.spec.link.kind() != LinkKind::identity) {
    throw EffectError("link mismatch: coefficient method requires the identity link");
  }
  if (!fit.converged()) throw EffectError("coefficient method requires a converged fit");
  return {fit.treatment(), std::sqrt(fit.covariance(kTreatmentIndex, kTreatmentIndex)),
          EffectMethod::coefficient, LinkKind::identity};
}

}  // namespace canonlink
