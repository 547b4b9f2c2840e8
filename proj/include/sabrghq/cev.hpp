#ifndef SABRGHQ_CEV_HPP
#define SABRGHQ_CEV_HPP

/**
 * @file cev.hpp
 * @brief Constant elasticity of variance model with absorption at zero.
 *
 *   dX_t = sigma X_t^beta dW_t,   X_0 = x0,   0 <= beta <= 1
 *
 * Closed-form call/put prices via the noncentral chi-squared distribution,
 * the probability of absorption at the origin, and the two limiting kernels:
 * Black-Scholes (beta = 1) and Bachelier (beta = 0). Everything lives on the
 * forward measure: no drift, no discounting.
 */

#include <algorithm>
#include <cmath>

#include "sabrghq/errors.hpp"
#include "sabrghq/specfun.hpp"

namespace sabrghq {

enum class OptionKind { call, put };

struct OptionSpec {
  double strike = 0.0;    ///< K >= 0
  double maturity = 1.0;  ///< T > 0, years
  OptionKind kind = OptionKind::call;

  void validate() const {
    detail::require(std::isfinite(strike) && strike >= 0.0, "option: strike must be non-negative");
    detail::require(std::isfinite(maturity) && maturity > 0.0, "option: maturity must be positive");
  }
};

class CevParams {
 public:
  CevParams(double x0, double sigma, double beta) : x0_(x0), sigma_(sigma), beta_(beta), beta_star_(1.0 - beta) {
    detail::require(std::isfinite(x0) && x0 > 0.0, "cev: x0 must be positive");
    detail::require(std::isfinite(sigma) && sigma >= 0.0, "cev: sigma must be non-negative");
    detail::require(beta >= 0.0 && beta <= 1.0, "cev: beta must lie in [0, 1]");
  }

  double x0() const { return x0_; }
  double sigma() const { return sigma_; }
  double beta() const { return beta_; }
  double beta_star() const { return beta_star_; }

  CevParams with_sigma(double sigma) const { return {x0_, sigma, beta_}; }

 private:
  double x0_;
  double sigma_;
  double beta_;
  double beta_star_;
};

namespace detail {

/// Chi-squared arguments shared by the call, put and mass formulas:
///   spot   = x0^{2b*} / (b*^2 sigma^2 T)
///   strike = K^{2b*}  / (b*^2 sigma^2 T)
/// with degrees of freedom 2 + 1/b* and 1/b*.
struct CevChi2 {
  double spot;
  double strike;
  double dof_hi;
  double dof_lo;
};

inline CevChi2 cev_chi2(const CevParams& p, double strike, double maturity) {
  const double bs = p.beta_star();
  const double scale = bs * bs * p.sigma() * p.sigma() * maturity;
  return {std::pow(p.x0(), 2.0 * bs) / scale, std::pow(strike, 2.0 * bs) / scale, 2.0 + 1.0 / bs, 1.0 / bs};
}

inline void require_interior_beta(const CevParams& p) {
  require(p.beta() > 0.0 && p.beta() < 1.0,
          "cev: closed form needs 0 < beta < 1; use the Black-Scholes or Bachelier kernel");
}

}  // namespace detail

inline double cev_call(const CevParams& p, const OptionSpec& o) {
  o.validate();
  detail::require_interior_beta(p);
  if (o.strike == 0.0) return p.x0();
  if (p.sigma() == 0.0) return std::max(p.x0() - o.strike, 0.0);
  const auto c = detail::cev_chi2(p, o.strike, o.maturity);
  const double price = p.x0() * ncx2_sf({c.strike, c.dof_hi, c.spot}) - o.strike * ncx2_cdf({c.spot, c.dof_lo, c.strike});
  return std::clamp(price, std::max(p.x0() - o.strike, 0.0), p.x0());
}

inline double cev_put(const CevParams& p, const OptionSpec& o) {
  o.validate();
  detail::require_interior_beta(p);
  if (o.strike == 0.0) return 0.0;
  if (p.sigma() == 0.0) return std::max(o.strike - p.x0(), 0.0);
  const auto c = detail::cev_chi2(p, o.strike, o.maturity);
  const double price = o.strike * ncx2_sf({c.spot, c.dof_lo, c.strike}) - p.x0() * ncx2_cdf({c.strike, c.dof_hi, c.spot});
  return std::clamp(price, std::max(o.strike - p.x0(), 0.0), o.strike);
}

inline double cev_price(const CevParams& p, const OptionSpec& o) {
  return o.kind == OptionKind::call ? cev_call(p, o) : cev_put(p, o);
}

/// Probability that the CEV process has been absorbed at zero by `maturity`:
///   Q(1/(2b*), x0^{2b*} / (2 b*^2 sigma^2 T)).
/// beta = 1 never reaches the origin and is rejected.
inline double cev_mass_zero(const CevParams& p, double maturity) {
  detail::require(std::isfinite(maturity) && maturity > 0.0, "cev: maturity must be positive");
  detail::require(p.beta() < 1.0, "cev: mass at zero is undefined for beta = 1");
  if (p.sigma() == 0.0) return 0.0;
  const auto c = detail::cev_chi2(p, 0.0, maturity);
  return gamma_upper_reg({0.5 * c.spot, 0.5 * c.dof_lo});
}

// Black-Scholes on the forward.

namespace detail {
inline void check_kernel_inputs(double x0, double vol, double strike, double maturity) {
  require(std::isfinite(x0) && x0 > 0.0, "kernel: x0 must be positive");
  require(vol >= 0.0, "kernel: vol must be non-negative");
  require(std::isfinite(maturity) && maturity > 0.0, "kernel: maturity must be positive");
  require(!std::isnan(strike), "kernel: strike must be a number");
}
}  // namespace detail

inline double bs_call(double x0, double vol, double strike, double maturity) {
  detail::check_kernel_inputs(x0, vol, strike, maturity);
  detail::require(strike >= 0.0, "bs: strike must be non-negative");
  if (strike == 0.0) return x0;
  const double s = vol * std::sqrt(maturity);
  if (s == 0.0) return std::max(x0 - strike, 0.0);
  if (std::isinf(s)) return x0;
  const double d1 = std::log(x0 / strike) / s + 0.5 * s;
  return x0 * norm_cdf(d1) - strike * norm_cdf(d1 - s);
}

inline double bs_put(double x0, double vol, double strike, double maturity) {
  detail::check_kernel_inputs(x0, vol, strike, maturity);
  detail::require(strike >= 0.0, "bs: strike must be non-negative");
  if (strike == 0.0) return 0.0;
  const double s = vol * std::sqrt(maturity);
  if (s == 0.0) return std::max(strike - x0, 0.0);
  if (std::isinf(s)) return strike;
  const double d1 = std::log(x0 / strike) / s + 0.5 * s;
  return strike * norm_cdf(s - d1) - x0 * norm_cdf(-d1);
}

inline double bs_price(double x0, double vol, const OptionSpec& o) {
  return o.kind == OptionKind::call ? bs_call(x0, vol, o.strike, o.maturity) : bs_put(x0, vol, o.strike, o.maturity);
}

// Bachelier (normal) model. The strike may be negative.

inline double bachelier_call(double x0, double vol, double strike, double maturity) {
  detail::check_kernel_inputs(x0, vol, strike, maturity);
  const double s = vol * std::sqrt(maturity);
  if (s == 0.0) return std::max(x0 - strike, 0.0);
  const double d = (x0 - strike) / s;
  return (x0 - strike) * norm_cdf(d) + s * norm_pdf(d);
}

inline double bachelier_put(double x0, double vol, double strike, double maturity) {
  detail::check_kernel_inputs(x0, vol, strike, maturity);
  const double s = vol * std::sqrt(maturity);
  if (s == 0.0) return std::max(strike - x0, 0.0);
  const double d = (x0 - strike) / s;
  return (strike - x0) * norm_cdf(-d) + s * norm_pdf(d);
}

inline double bachelier_price(double x0, double vol, const OptionSpec& o) {
  return o.kind == OptionKind::call ? bachelier_call(x0, vol, o.strike, o.maturity)
                                    : bachelier_put(x0, vol, o.strike, o.maturity);
}

}  // namespace sabrghq

#endif  // SABRGHQ_CEV_HPP
