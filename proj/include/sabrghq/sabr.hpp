#ifndef SABRGHQ_SABR_HPP
#define SABRGHQ_SABR_HPP

/**
 * @file sabr.hpp
 * @brief Uncorrelated SABR pricing by quadrature over the integrated variance.
 *
 *   dX_t = Y_t X_t^beta dW_t,   dY_t = nu Y_t dZ_t,   <W, Z> = 0
 *
 * Conditional on the volatility path, X is a CEV process with volatility
 * y0 sqrt(V), where V = (1/T) int_0^T exp(2 nu Z_t - nu^2 t) dt. Any CEV
 * quantity f(sigma) therefore lifts to SABR as E f(y0 sqrt(V)). V is replaced
 * by a lognormal variable with the same first two moments, and the
 * expectation is taken with an n-point Gauss-Hermite rule:
 *
 *   E f(y0 sqrt(V)) ~ sum_k w_k f(y0 sqrt(v_k)),  v_k = mu1 exp(lambda z_k - lambda^2/2).
 *
 * The conditional kernel is the CEV closed form for 0 < beta < 1, Black-Scholes
 * for beta = 1 and Bachelier for beta = 0.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

#include "sabrghq/cev.hpp"
#include "sabrghq/errors.hpp"
#include "sabrghq/quadrature.hpp"
#include "sabrghq/sabr_params.hpp"
#include "sabrghq/vol.hpp"

namespace sabrghq {

/// Lognormal stand-in for the normalized integrated variance V.
struct LognormalProxy {
  double mu1 = 1.0;     ///< E V
  double mu2 = 1.0;     ///< E V^2
  double lambda = 0.0;  ///< log-volatility, lambda^2 = log(mu2 / mu1^2)
};

inline constexpr int kDefaultQuadratureOrder = 10;

/// Below this value of nu^2 T the variance is treated as constant.
inline constexpr double kDegenerateVariance = 1e-12;

/// First two moments of V and the matching lognormal log-volatility.
///
/// With s = nu^2 T and w = e^s:
///   mu1 = (w - 1) / s
///   mu2 = (w^6 - 6w + 5) / (15 s^2) = mu1^2 (w^4 + 2w^3 + 3w^2 + 4w + 5) / 15
///   lambda^2 = log((w^4 + 2w^3 + 3w^2 + 4w + 5) / 15)
///            = log1p(expm1(s) (w^3 + 3w^2 + 6w + 10) / 15)
/// The factored forms have no cancellation as s -> 0.
inline LognormalProxy moment_match(double nu, double maturity) {
  detail::require(std::isfinite(nu) && nu >= 0.0, "moment_match: nu must be non-negative");
  detail::require(std::isfinite(maturity) && maturity > 0.0, "moment_match: maturity must be positive");
  const double s = nu * nu * maturity;
  if (s < kDegenerateVariance) return {};
  const double em1 = std::expm1(s);
  const double w = em1 + 1.0;
  const double mu1 = em1 / s;
  const double excess = em1 * (((w + 3.0) * w + 6.0) * w + 10.0) / 15.0;  // ratio - 1
  const double mu2 = mu1 * mu1 * (1.0 + excess);
  return {mu1, mu2, std::sqrt(std::log1p(excess))};
}

/// Variance draws v_k = mu1 exp(lambda z_k - lambda^2 / 2) at the rule's nodes.
inline std::vector<double> proxy_nodes(const LognormalProxy& proxy, const Quadrature& rule) {
  std::vector<double> v(rule.order());
  const double shift = 0.5 * proxy.lambda * proxy.lambda;
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = proxy.mu1 * std::exp(proxy.lambda * rule.nodes[k] - shift);
  return v;
}

/// CEV, Black-Scholes or Bachelier price with the volatility frozen at `sigma`.
inline double conditional_price(const SabrParams& p, double sigma, const OptionSpec& o) {
  if (p.beta() == 1.0) return bs_price(p.x0(), sigma, o);
  if (p.beta() == 0.0) return bachelier_price(p.x0(), sigma, o);
  return cev_price(p.cev(sigma), o);
}

/// CEV mass at zero with the volatility frozen at `sigma`.
inline double conditional_mass(const SabrParams& p, double sigma, double maturity) {
  detail::require(p.beta() < 1.0, "sabr: mass at zero is not available for beta = 1");
  return cev_mass_zero(p.cev(sigma), maturity);
}

namespace detail {

/// sum_k w_k f(y0 sqrt(v_k)), or f(y0) exactly when the proxy is degenerate.
template <class F>
double integrate_over_variance(const SabrParams& p, double maturity, const Quadrature& rule, F&& f) {
  const LognormalProxy proxy = moment_match(p.nu(), maturity);
  if (proxy.lambda == 0.0) return f(p.y0() * std::sqrt(proxy.mu1));
  const std::vector<double> v = proxy_nodes(proxy, rule);
  double sum = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) sum += rule.weights[k] * f(p.y0() * std::sqrt(v[k]));
  return sum;
}

}  // namespace detail

/// Probability of absorption at zero by `maturity`, beta < 1.
inline double mass_zero_ghq(const SabrParams& p, double maturity, const Quadrature& rule) {
  detail::require(p.beta() < 1.0, "sabr: mass at zero is not available for beta = 1");
  detail::require(std::isfinite(maturity) && maturity > 0.0, "sabr: maturity must be positive");
  const double m = detail::integrate_over_variance(
      p, maturity, rule, [&](double sigma) { return conditional_mass(p, sigma, maturity); });
  return std::clamp(m, 0.0, 1.0);
}

inline double mass_zero_ghq(const SabrParams& p, double maturity, int n = kDefaultQuadratureOrder) {
  return mass_zero_ghq(p, maturity, ghq(n));
}

/// Call or put price as a weighted sum of conditional kernel prices.
inline double price_ghq(const SabrParams& p, const OptionSpec& o, const Quadrature& rule) {
  o.validate();
  return detail::integrate_over_variance(p, o.maturity, rule,
                                         [&](double sigma) { return conditional_price(p, sigma, o); });
}

inline double price_ghq(const SabrParams& p, const OptionSpec& o, int n = kDefaultQuadratureOrder) {
  return price_ghq(p, o, ghq(n));
}

struct SmileRow {
  double strike;
  double call_price;
  double implied_vol;
};

/// Call prices and Black-Scholes implied volatilities over a strike grid.
///
/// Strikes must be positive and strictly increasing. Prices are computed on
/// up to `threads` worker threads (0 = hardware concurrency); each strike is
/// written to its own slot, so the output order and values do not depend on
/// the thread count. Throws BandError if a price has no implied volatility.
inline std::vector<SmileRow> smile_ghq(const SabrParams& p, std::span<const double> strikes, double maturity,
                                       int n = kDefaultQuadratureOrder, unsigned threads = 1) {
  detail::require(!strikes.empty(), "smile: strike grid is empty");
  for (std::size_t i = 0; i < strikes.size(); ++i) {
    detail::require(std::isfinite(strikes[i]) && strikes[i] > 0.0, "smile: strikes must be positive");
    if (i > 0) detail::require(strikes[i] > strikes[i - 1], "smile: strikes must be strictly increasing");
  }
  const Quadrature rule = ghq(n);
  std::vector<SmileRow> rows(strikes.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const OptionSpec o{strikes[i], maturity, OptionKind::call};
      const double price = price_ghq(p, o, rule);
      rows[i] = {strikes[i], price, implied_vol_bs(price, p.x0(), strikes[i], maturity)};
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, strikes.size()));
  if (threads <= 1) {
    work(0, strikes.size());
    return rows;
  }
  // Exceptions from workers are captured and rethrown on the calling thread.
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  const std::size_t chunk = (strikes.size() + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(strikes.size(), begin + chunk);
    pool.emplace_back([&, t, begin, end] {
      try {
        work(begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

}  // namespace sabrghq

#endif  // SABRGHQ_SABR_HPP
