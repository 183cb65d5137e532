#include "canonlink/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace canonlink {

namespace {

struct Observation {
  double x;
  double z;
  double events;
  double trials;
};

std::vector<Observation> observations(const CellTable& table) {
  std::vector<Observation> out;
  out.reserve(table.size());
  for (const auto& c : table.cells()) {
    out.push_back({double(c.x), double(c.z), double(c.events), double(c.trials)});
  }
  return out;
}

std::vector<Observation> observations(std::span<const Row> rows) {
  std::vector<Observation> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({double(r.x), double(r.z), double(r.y), 1.0});
  return out;
}

double linear_predictor(const ModelSpec& spec, const Observation& o, const Eigen::VectorXd& b) {
  double eta = b[kInterceptIndex] + b[kTreatmentIndex] * o.z;
  if (spec.adjusted) eta += b[kCovariateIndex] * o.x;
  return eta;
}

void check_length(const ModelSpec& spec, const Eigen::VectorXd& b) {
  if (static_cast<std::size_t>(b.size()) != spec.predictor_count()) {
    throw std::invalid_argument("coefficient length does not match the model");
  }
}

ScoreVector score_impl(const ModelSpec& spec, std::span<const Observation> obs,
                       const Eigen::VectorXd& b, bool canonical_form) {
  check_length(spec, b);
  ScoreVector s{Eigen::VectorXd::Zero(b.size()), false};
  for (const auto& o : obs) {
    double eta = linear_predictor(spec, o, b);
    double raw = spec.link.inverse_unclamped(eta);
    if (!(raw > kProbabilityFloor && raw < 1 - kProbabilityFloor)) s.out_of_range = true;
    double mu = spec.link.inverse(eta);
    double resid = o.events - o.trials * mu;
    double factor = canonical_form ? 1.0 : spec.link.inverse_derivative(eta) / spec.link.variance(eta);
    s.components += spec.design_row(o.x, o.z) * (resid * factor);
  }
  return s;
}

Eigen::MatrixXd information_impl(const ModelSpec& spec, std::span<const Observation> obs,
                                 const Eigen::VectorXd& b) {
  check_length(spec, b);
  const auto p = static_cast<Eigen::Index>(spec.predictor_count());
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(p, p);
  for (const auto& o : obs) {
    double eta = linear_predictor(spec, o, b);
    double dmu = spec.link.inverse_derivative(eta);
    Eigen::VectorXd d = spec.design_row(o.x, o.z);
    info.noalias() += (o.trials * dmu * dmu / spec.link.variance(eta)) * d * d.transpose();
  }
  return info;
}

double loglik_impl(const ModelSpec& spec, std::span<const Observation> obs,
                   const Eigen::VectorXd& b) {
  check_length(spec, b);
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  double ll = 0.0;
  for (const auto& o : obs) {
    double mu = spec.link.inverse_unclamped(linear_predictor(spec, o, b));
    double failures = o.trials - o.events;
    if (!(mu >= 0.0 && mu <= 1.0)) return neg_inf;
    if (o.events > 0) {
      if (mu == 0.0) return neg_inf;
      ll += o.events * std::log(mu);
    }
    if (failures > 0) {
      if (mu == 1.0) return neg_inf;
      ll += failures * std::log1p(-mu);
    }
  }
  return ll;
}

bool within_working_range(const ModelSpec& spec, std::span<const Observation> obs,
                          const Eigen::VectorXd& b) {
  for (const auto& o : obs) {
    double eta = linear_predictor(spec, o, b);
    if (!std::isfinite(eta)) return false;
    double mu = spec.link.inverse_unclamped(eta);
    if (!(mu >= kProbabilityFloor && mu <= 1 - kProbabilityFloor)) return false;
  }
  return true;
}

constexpr double kPivotTolerance = 1e-12;

// Pivoted LDLT of a symmetric positive-semidefinite matrix; rank counts pivots
// above kPivotTolerance relative to the largest.
bool full_rank(const Eigen::LDLT<Eigen::MatrixXd>& ldlt) {
  const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
  const double largest = d.maxCoeff();
  if (!(largest > 0.0)) return false;
  return (d.array() > kPivotTolerance * largest).all();
}

bool is_bounded_link(LinkFunction link) {
  return link.kind() == LinkKind::identity || link.kind() == LinkKind::log;
}

bool near_boundary(const ModelSpec& spec, std::span<const Observation> obs,
                   const Eigen::VectorXd& b) {
  for (const auto& o : obs) {
    double mu = spec.link.inverse_unclamped(linear_predictor(spec, o, b));
    if (!(mu > 1e-6 && mu < 1 - 1e-6)) return true;
  }
  return false;
}

Eigen::VectorXd starting_values(const ModelSpec& spec, std::span<const Observation> obs) {
  const auto p = static_cast<Eigen::Index>(spec.predictor_count());
  Eigen::MatrixXd xtwx = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd xtwz = Eigen::VectorXd::Zero(p);
  double events = 0.0, trials = 0.0;
  for (const auto& o : obs) {
    double mu = (o.events + 0.5) / (o.trials + 1.0);
    double eta = spec.link.link(mu);
    double dmu = spec.link.inverse_derivative(eta);
    double w = o.trials * dmu * dmu / (mu * (1 - mu));
    double working = eta + (o.events / o.trials - mu) / dmu;
    Eigen::VectorXd d = spec.design_row(o.x, o.z);
    xtwx.noalias() += w * d * d.transpose();
    xtwz += (w * working) * d;
    events += o.events;
    trials += o.trials;
  }
  Eigen::VectorXd b = xtwx.ldlt().solve(xtwz);
  if (b.allFinite() && within_working_range(spec, obs, b)) return b;
  // Fall back to the null model, which is always inside the range.
  b = Eigen::VectorXd::Zero(p);
  b[kInterceptIndex] = spec.link.link((events + 0.5) / (trials + 1.0));
  return b;
}

FitResult fit_impl(const ModelSpec& spec, std::span<const Observation> obs,
                   const FitOptions& options) {
  const auto p = static_cast<Eigen::Index>(spec.predictor_count());
  {
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(p, p);
    for (const auto& o : obs) {
      Eigen::VectorXd d = spec.design_row(o.x, o.z);
      normal.noalias() += o.trials * d * d.transpose();
    }
    if (!full_rank(normal.ldlt())) throw RankDeficientError("design matrix is rank deficient");
  }

  FitResult fit;
  fit.spec = spec;
  Eigen::VectorXd b = starting_values(spec, obs);
  double ll = loglik_impl(spec, obs, b);
  double last_step = std::numeric_limits<double>::infinity();
  fit.status = FitStatus::max_iterations;

  for (int iter = 0;; ++iter) {
    ScoreVector u = score_impl(spec, obs, b, false);
    if (last_step <= options.coefficient_tolerance && u.max_abs() <= options.score_tolerance) {
      fit.status = FitStatus::converged;
      break;
    }
    if (iter == options.max_iterations) break;

    Eigen::MatrixXd info = information_impl(spec, obs, b);
    auto ldlt = info.ldlt();
    if (!full_rank(ldlt)) {
      fit.status = FitStatus::separation;
      break;
    }
    Eigen::VectorXd step = ldlt.solve(u.components);

    // Halve while the candidate leaves the working range or lowers the
    // likelihood beyond rounding noise.
    const double slack = 1e-12 * (1.0 + std::abs(ll));
    double t = 1.0;
    bool in_range = false;
    Eigen::VectorXd candidate = b;
    Eigen::VectorXd fallback;
    double candidate_ll = ll;
    for (int h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
      candidate = b + t * step;
      if (!within_working_range(spec, obs, candidate)) continue;
      candidate_ll = loglik_impl(spec, obs, candidate);
      if (!in_range) fallback = candidate;
      in_range = true;
      if (candidate_ll >= ll - slack) break;
    }
    if (!in_range) {
      fit.status = is_bounded_link(spec.link) ? FitStatus::constrained_boundary
                                              : FitStatus::separation;
      break;
    }
    if (candidate_ll < ll - slack) {
      candidate = fallback;
      candidate_ll = loglik_impl(spec, obs, candidate);
    }
    last_step = (candidate - b).cwiseAbs().maxCoeff();
    b = candidate;
    ll = candidate_ll;
    fit.iterations = iter + 1;
  }

  if (fit.status == FitStatus::max_iterations && near_boundary(spec, obs, b)) {
    fit.status = is_bounded_link(spec.link) ? FitStatus::constrained_boundary
                                            : FitStatus::separation;
  }

  fit.coefficients = b;
  fit.final_score_norm = score_impl(spec, obs, b, false).max_abs();
  fit.log_likelihood = loglik_impl(spec, obs, b);
  Eigen::MatrixXd info = information_impl(spec, obs, b);
  auto ldlt = info.ldlt();
  if (full_rank(ldlt)) {
    fit.covariance = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
    fit.covariance = 0.5 * (fit.covariance + fit.covariance.transpose()).eval();
  } else {
    fit.covariance = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
  }
  return fit;
}

}  // namespace

Eigen::VectorXd ModelSpec::design_row(double x, double z) const {
  Eigen::VectorXd d(predictor_count());
  d[kInterceptIndex] = 1.0;
  d[kTreatmentIndex] = z;
  if (adjusted) d[kCovariateIndex] = x;
  return d;
}

std::string_view status_name(FitStatus status) noexcept {
  switch (status) {
    case FitStatus::converged: return "converged";
    case FitStatus::max_iterations: return "max_iterations";
    case FitStatus::separation: return "separation";
    case FitStatus::constrained_boundary: return "constrained_boundary";
  }
  return "?";
}

Eigen::VectorXd FitResult::standard_errors() const {
  return covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
}

ScoreVector score(const ModelSpec& spec, const CellTable& table,
                  const Eigen::VectorXd& coefficients) {
  return score_impl(spec, observations(table), coefficients, false);
}

ScoreVector canonical_score(const ModelSpec& spec, const CellTable& table,
                            const Eigen::VectorXd& coefficients) {
  return score_impl(spec, observations(table), coefficients, true);
}

Eigen::MatrixXd expected_information(const ModelSpec& spec, const CellTable& table,
                                     const Eigen::VectorXd& coefficients) {
  return information_impl(spec, observations(table), coefficients);
}

double log_likelihood(const ModelSpec& spec, const CellTable& table,
                      const Eigen::VectorXd& coefficients) {
  return loglik_impl(spec, observations(table), coefficients);
}

FitResult fit_glm(const ModelSpec& spec, const CellTable& table, const FitOptions& options) {
  return fit_impl(spec, observations(table), options);
}

FitResult fit_glm(const ModelSpec& spec, std::span<const Row> rows, const FitOptions& options) {
  return fit_impl(spec, observations(rows), options);
}

NullPreservation null_preservation_check(LinkFunction link, const CellTable& table) {
  if (!check_balance(table).balanced) return NullPreservation::not_applicable;
  FitResult unadjusted = fit_glm({link, false}, table);
  if (!unadjusted.converged() || std::abs(unadjusted.treatment()) > 1e-8) {
    return NullPreservation::not_applicable;
  }
  FitResult adjusted = fit_glm({link, true}, table);
  if (adjusted.converged() && std::abs(adjusted.treatment()) <= 1e-6) {
    return NullPreservation::holds;
  }
  return NullPreservation::fails;
}

}  // namespace canonlink
