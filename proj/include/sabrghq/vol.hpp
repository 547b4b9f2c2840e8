#ifndef SABRGHQ_VOL_HPP
#define SABRGHQ_VOL_HPP

/**
 * @file vol.hpp
 * @brief Black-Scholes implied volatility and two smile approximations.
 *
 * - implied_vol_bs: inverts the forward Black-Scholes call price.
 * - dmhj_vol: small-strike expansion driven by the mass at zero m,
 *     sigma sqrt(T) = L (1 + q/L + (q^2 + 2)/(2L^2) + q/(2L^3)),
 *     L = sqrt(2 |log(K/x0)|), q = N^{-1}(m),
 *   truncated after the fourth term.
 * - hklw_vol: Hagan-Kumar-Lesniewski-Woodward lognormal-vol expansion for
 *   SABR, specialized to zero correlation. With c = 1 - beta,
 *   l = log(x0/K), u = (x0 K)^(c/2) and z = (nu / y0) u l:
 *     sigma = y0 / (u (1 + c^2 l^2 / 24 + c^4 l^4 / 1920)) * z / asinh(z)
 *             * (1 + (c^2 y0^2 / (24 u^2) + nu^2 / 12) T).
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sabrghq/cev.hpp"
#include "sabrghq/errors.hpp"
#include "sabrghq/sabr_params.hpp"
#include "sabrghq/specfun.hpp"

namespace sabrghq {

/// A point on a volatility smile.
struct SmilePoint {
  double log_moneyness;  ///< log(K / x0)
  double implied_vol;
};

inline constexpr double kMaxImpliedVol = 10.0;

/// Black-Scholes implied volatility of a forward call price.
///
/// The search runs on the out-of-the-money side (the put when K < x0, by
/// parity) so deep in-the-money calls keep their time value to full
/// precision. Bisection narrows the bracket [0, 10] to width 1e-2, then Newton
/// steps with vega take over; a step that leaves the bracket or fails to
/// shrink the residual is replaced by bisection.
///
/// Returns 0 when the price equals intrinsic value. Throws BandError when the
/// price is below intrinsic, at or above x0, or implies a vol above 10.
inline double implied_vol_bs(double price, double x0, double strike, double maturity) {
  detail::require(std::isfinite(x0) && x0 > 0.0, "implied vol: x0 must be positive");
  detail::require(std::isfinite(strike) && strike > 0.0, "implied vol: strike must be positive");
  detail::require(std::isfinite(maturity) && maturity > 0.0, "implied vol: maturity must be positive");
  const double intrinsic = std::max(x0 - strike, 0.0);
  if (!(price >= intrinsic) || !(price < x0)) {
    throw BandError("implied vol: call price " + std::to_string(price) + " outside (" + std::to_string(intrinsic) +
                    ", " + std::to_string(x0) + ")");
  }
  const bool use_put = strike < x0;
  const double target = use_put ? price - (x0 - strike) : price;
  if (target <= 0.0) return 0.0;

  auto otm_price = [&](double vol) {
    return use_put ? bs_put(x0, vol, strike, maturity) : bs_call(x0, vol, strike, maturity);
  };
  const double sqrt_t = std::sqrt(maturity);
  auto vega = [&](double vol) {
    const double s = vol * sqrt_t;
    const double d1 = std::log(x0 / strike) / s + 0.5 * s;
    return x0 * norm_pdf(d1) * sqrt_t;
  };

  double lo = 0.0;
  double hi = kMaxImpliedVol;
  if (otm_price(hi) < target) throw BandError("implied vol: price implies a volatility above 10");

  while (hi - lo > 1e-2) {
    const double mid = 0.5 * (lo + hi);
    (otm_price(mid) < target ? lo : hi) = mid;
  }
  const double tol = 1e-14 * x0;
  double vol = 0.5 * (lo + hi);
  double residual = otm_price(vol) - target;
  for (int iter = 0; iter < 200 && std::fabs(residual) > tol; ++iter) {
    (residual < 0.0 ? lo : hi) = vol;
    const double v = vega(vol);
    double next = v > 0.0 ? vol - residual / v : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    double next_residual = otm_price(next) - target;
    if (std::fabs(next_residual) >= std::fabs(residual)) {
      next = 0.5 * (lo + hi);
      next_residual = otm_price(next) - target;
    }
    if (next == vol) break;
    vol = next;
    residual = next_residual;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  return vol;
}

/// Small-strike implied volatility from the mass at zero, four-term
/// truncation, floored at zero. Diverges as K -> x0, where it is rejected.
inline double dmhj_vol(double mass, double x0, double strike, double maturity) {
  detail::require(mass > 0.0 && mass < 1.0, "dmhj: mass must lie in (0, 1)");
  detail::require(std::isfinite(x0) && x0 > 0.0, "dmhj: x0 must be positive");
  detail::require(std::isfinite(strike) && strike > 0.0, "dmhj: strike must be positive");
  detail::require(std::isfinite(maturity) && maturity > 0.0, "dmhj: maturity must be positive");
  const double k = std::log(strike / x0);
  detail::require(k != 0.0, "dmhj: undefined at the money");
  const double L = std::sqrt(2.0 * std::fabs(k));
  const double q = norm_quantile(mass);
  const double series = 1.0 + q / L + (q * q + 2.0) / (2.0 * L * L) + q / (2.0 * L * L * L);
  return std::max(L / std::sqrt(maturity) * series, 0.0);
}

/// HKLW equivalent Black-Scholes volatility with zero correlation.
inline double hklw_vol(const SabrParams& p, double strike, double maturity) {
  detail::require(p.beta() > 0.0, "hklw: beta must be positive");
  detail::require(std::isfinite(strike) && strike > 0.0, "hklw: strike must be positive");
  detail::require(std::isfinite(maturity) && maturity > 0.0, "hklw: maturity must be positive");
  const double bs = 1.0 - p.beta();
  const double l = std::log(p.x0() / strike);
  const double l2 = l * l;
  const double bs2 = bs * bs;
  const double xk_half = std::pow(p.x0() * strike, 0.5 * bs);  // (x0 K)^{b*/2}
  const double leading = p.y0() / (xk_half * (1.0 + bs2 / 24.0 * l2 + bs2 * bs2 / 1920.0 * l2 * l2));
  const double z = p.nu() / p.y0() * xk_half * l;
  // z / asinh(z) = 1 + z^2/6 - 17 z^4/360 + ...
  const double z_ratio = std::fabs(z) < 1e-4 ? 1.0 + z * z / 6.0 : z / std::asinh(z);
  const double time_term =
      1.0 + (bs2 * p.y0() * p.y0() / (24.0 * xk_half * xk_half) + p.nu() * p.nu() / 12.0) * maturity;
  return leading * z_ratio * time_term;
}

}  // namespace sabrghq

#endif  // SABRGHQ_VOL_HPP
