#include "canonlink/link.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace canonlink {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) {
  constexpr double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

namespace {

// Acklam's rational approximation refined by Halley steps on normal_cdf.
double normal_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    double q = std::sqrt(-2 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  for (int i = 0; i < 2; ++i) {
    double e = normal_cdf(x) - p;
    double u = e / normal_pdf(x);
    x -= u / (1 + x * u / 2);
  }
  return x;
}

}  // namespace

std::optional<LinkFunction> LinkFunction::from_name(std::string_view name) {
  for (auto k : {LinkKind::logit, LinkKind::probit, LinkKind::identity, LinkKind::log,
                 LinkKind::cloglog}) {
    if (link_name(k) == name) return LinkFunction(k);
  }
  return std::nullopt;
}

std::string_view link_name(LinkKind kind) noexcept {
  switch (kind) {
    case LinkKind::logit: return "logit";
    case LinkKind::probit: return "probit";
    case LinkKind::identity: return "identity";
    case LinkKind::log: return "log";
    case LinkKind::cloglog: return "cloglog";
  }
  return "?";
}

std::string_view LinkFunction::name() const noexcept { return link_name(kind_); }

double LinkFunction::inverse_unclamped(double eta) const {
  if (!std::isfinite(eta)) throw std::domain_error("non-finite linear predictor");
  switch (kind_) {
    case LinkKind::logit:
      return eta >= 0 ? 1 / (1 + std::exp(-eta)) : std::exp(eta) / (1 + std::exp(eta));
    case LinkKind::probit: return normal_cdf(eta);
    case LinkKind::identity: return eta;
    case LinkKind::log: return std::exp(eta);
    case LinkKind::cloglog: return -std::expm1(-std::exp(eta));
  }
  return eta;
}

double LinkFunction::inverse(double eta) const {
  return std::clamp(inverse_unclamped(eta), kProbabilityFloor, 1 - kProbabilityFloor);
}

double LinkFunction::inverse_complement(double eta) const {
  if (!std::isfinite(eta)) throw std::domain_error("non-finite linear predictor");
  double c = 0.0;
  switch (kind_) {
    case LinkKind::logit:
      c = eta <= 0 ? 1 / (1 + std::exp(eta)) : std::exp(-eta) / (1 + std::exp(-eta));
      break;
    case LinkKind::probit: c = normal_cdf(-eta); break;
    case LinkKind::identity: c = 1 - eta; break;
    case LinkKind::log: c = -std::expm1(eta); break;
    case LinkKind::cloglog: c = std::exp(-std::exp(eta)); break;
  }
  return std::clamp(c, kProbabilityFloor, 1 - kProbabilityFloor);
}

double LinkFunction::inverse_derivative(double eta) const {
  if (!std::isfinite(eta)) throw std::domain_error("non-finite linear predictor");
  switch (kind_) {
    case LinkKind::logit: {
      double e = std::exp(-std::abs(eta));
      return e / ((1 + e) * (1 + e));
    }
    case LinkKind::probit: return normal_pdf(eta);
    case LinkKind::identity: return 1.0;
    case LinkKind::log: return std::exp(eta);
    case LinkKind::cloglog: return std::exp(eta - std::exp(eta));
  }
  return 1.0;
}

double LinkFunction::link(double mu) const {
  switch (kind_) {
    case LinkKind::logit: return std::log(mu) - std::log1p(-mu);
    case LinkKind::probit: return normal_quantile(mu);
    case LinkKind::identity: return mu;
    case LinkKind::log: return std::log(mu);
    case LinkKind::cloglog: return std::log(-std::log1p(-mu));
  }
  return mu;
}

}  // namespace canonlink
