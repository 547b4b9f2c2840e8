#ifndef SABRGHQ_SABR_PARAMS_HPP
#define SABRGHQ_SABR_PARAMS_HPP

#include <cmath>

#include "sabrghq/cev.hpp"
#include "sabrghq/errors.hpp"

namespace sabrghq {

/// Uncorrelated SABR parameters.
class SabrParams {
 public:
  SabrParams(double x0, double y0, double nu, double beta) : x0_(x0), y0_(y0), nu_(nu), beta_(beta) {
    detail::require(std::isfinite(x0) && x0 > 0.0, "sabr: x0 must be positive");
    detail::require(std::isfinite(y0) && y0 > 0.0, "sabr: y0 must be positive");
    detail::require(std::isfinite(nu) && nu >= 0.0, "sabr: nu must be non-negative");
    detail::require(beta >= 0.0 && beta <= 1.0, "sabr: beta must lie in [0, 1]");
  }

  double x0() const { return x0_; }
  double y0() const { return y0_; }
  double nu() const { return nu_; }
  double beta() const { return beta_; }

  /// CEV model obtained by freezing the volatility at `sigma`.
  CevParams cev(double sigma) const { return {x0_, sigma, beta_}; }

 private:
  double x0_;
  double y0_;
  double nu_;
  double beta_;
};

}  // namespace sabrghq

#endif  // SABRGHQ_SABR_PARAMS_HPP
