#pragma once

#include <optional>
#include <string_view>

namespace canonlink {

// Fitted probabilities are kept in [kProbabilityFloor, 1 - kProbabilityFloor].
inline constexpr double kProbabilityFloor = 1e-10;

enum class LinkKind { logit, probit, identity, log, cloglog };

double normal_cdf(double x);
double normal_pdf(double x);

// Binomial-family link g with inverse h. Only logit is canonical.
class LinkFunction {
 public:
  constexpr LinkFunction() = default;
  constexpr explicit LinkFunction(LinkKind kind) : kind_(kind) {}

  static std::optional<LinkFunction> from_name(std::string_view name);

  constexpr LinkKind kind() const noexcept { return kind_; }
  constexpr bool canonical() const noexcept { return kind_ == LinkKind::logit; }
  std::string_view name() const noexcept;

  // h(eta) clamped to [kProbabilityFloor, 1 - kProbabilityFloor].
  // Throws std::domain_error for non-finite eta.
  double inverse(double eta) const;

  // h(eta) without clamping; identity and log can leave [0, 1].
  double inverse_unclamped(double eta) const;

  // 1 - h(eta) without cancellation, clamped like inverse().
  double inverse_complement(double eta) const;

  // h(eta) (1 - h(eta)), the binomial variance at the clamped mean.
  double variance(double eta) const { return inverse(eta) * inverse_complement(eta); }

  // dh/deta
  double inverse_derivative(double eta) const;

  // g(mu)
  double link(double mu) const;

  friend constexpr bool operator==(LinkFunction, LinkFunction) = default;

 private:
  LinkKind kind_ = LinkKind::logit;
};

std::string_view link_name(LinkKind kind) noexcept;

}  // namespace canonlink
