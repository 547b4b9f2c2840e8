#ifndef SABRGHQ_MONTE_CARLO_HPP
#define SABRGHQ_MONTE_CARLO_HPP

/**
 * @file monte_carlo.hpp
 * @brief Conditional Monte Carlo for the uncorrelated SABR model.
 *
 * Draws the normalized integrated variance
 *   V = (1/T) int_0^T exp(2 nu Z_t - nu^2 t) dt
 * by simulating Z_t exactly on a uniform grid and integrating with composite
 * Simpson weights, then averages a closed-form conditional quantity
 * (CEV mass at zero or option price at sigma = y0 sqrt(V)) over the draws.
 *
 * Random stream contract (reproducible in any language):
 *   - Generator: SplitMix64 (Steele, Lea, Flood 2014). The k-th output for
 *     seed s (k = 0, 1, ...) is mix64(s + (k + 1) * 0x9E3779B97F4A7C15), with
 *       mix64(z): z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
 *                 z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
 *                 return z ^ (z >> 31).
 *   - Layout: path-major. Path i uses outputs k = i * steps + j for
 *     j = 0, ..., steps - 1, one per Brownian increment.
 *   - Uniform: u = ((out >> 12) + 0.5) * 2^-52, which lies in (0, 1) with
 *     both endpoints excluded in double precision.
 *   - Normal: Wichura AS241 inverse CDF of u.
 * Because every path owns a fixed window of the stream, any partition of the
 * paths into blocks produces the same draws. Per-path values are reduced by
 * pairwise summation over the full path array, so the estimate does not
 * depend on the block partition either.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <thread>
#include <vector>

#include "sabrghq/cev.hpp"
#include "sabrghq/errors.hpp"
#include "sabrghq/sabr.hpp"
#include "sabrghq/sabr_params.hpp"
#include "sabrghq/specfun.hpp"

namespace sabrghq {

struct McConfig {
  std::size_t paths = 100000;
  std::size_t steps = 256;  ///< Simpson intervals per maturity, even
  std::uint64_t seed = 20190917;
  unsigned threads = 0;     ///< 0 = hardware concurrency

  void validate() const {
    detail::require(paths >= 100, "mc: at least 100 paths are required");
    detail::require(steps >= 2 && steps % 2 == 0, "mc: steps must be a positive even number");
  }
};

struct McResult {
  double estimate = 0.0;
  double std_error = 0.0;  ///< sample standard deviation / sqrt(paths_used)
  std::size_t paths_used = 0;
};

namespace detail {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// k-th SplitMix64 output for `seed`.
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t k) { return mix64(seed + (k + 1) * kGoldenGamma); }

inline double uniform_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Pairwise summation; the recursion depends only on the array length.
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 16) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

/// Runs body(begin, end) over [0, count) split into contiguous blocks.
template <class Body>
void parallel_blocks(std::size_t count, unsigned threads, Body&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    body(std::size_t{0}, count);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = std::min(count, t * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, t, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// One draw of V for path `path`. Simpson weights 1, 4, 2, ..., 4, 1 sum to
/// 3N, so V = sum_i c_i f(t_i) / (3N) and a constant integrand gives 1 exactly.
inline double simulate_v(double nu, double maturity, const McConfig& cfg, std::size_t path) {
  const std::size_t n = cfg.steps;
  const double dt = maturity / static_cast<double>(n);
  const double sqrt_dt = std::sqrt(dt);
  const std::uint64_t base = static_cast<std::uint64_t>(path) * static_cast<std::uint64_t>(n);
  double z = 0.0;
  double sum = 1.0;  // f(t_0) = 1
  for (std::size_t i = 1; i <= n; ++i) {
    z += sqrt_dt * quantile_as241(uniform_open(splitmix64_at(cfg.seed, base + (i - 1))));
    const double t = dt * static_cast<double>(i);
    const double f = std::exp(2.0 * nu * z - nu * nu * t);
    const double c = (i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += c * f;
  }
  return sum / (3.0 * static_cast<double>(n));
}

}  // namespace detail

/// Mean and standard error of per-path values. Identical values give a zero
/// standard error and return that value exactly.
inline McResult summarize(std::span<const double> values) {
  detail::require(!values.empty(), "mc: no samples");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) return {*lo, 0.0, values.size()};
  const double n = static_cast<double>(values.size());
  const double mean = detail::pairwise_sum(values) / n;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  const double var = values.size() > 1 ? detail::pairwise_sum(sq) / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n), values.size()};
}

/// Draws of the normalized integrated variance V, one per path.
inline std::vector<double> sample_v(double nu, double maturity, const McConfig& cfg) {
  cfg.validate();
  detail::require(std::isfinite(nu) && nu >= 0.0, "mc: nu must be non-negative");
  detail::require(std::isfinite(maturity) && maturity > 0.0, "mc: maturity must be positive");
  std::vector<double> v(cfg.paths);
  detail::parallel_blocks(cfg.paths, cfg.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) v[i] = detail::simulate_v(nu, maturity, cfg, i);
  });
  return v;
}

/// Mass at zero averaged over given variance draws.
inline McResult mass_zero_mc(const SabrParams& p, double maturity, std::span<const double> v_draws,
                             unsigned threads = 1) {
  detail::require(p.beta() < 1.0, "sabr: mass at zero is not available for beta = 1");
  std::vector<double> values(v_draws.size());
  detail::parallel_blocks(v_draws.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) values[i] = conditional_mass(p, p.y0() * std::sqrt(v_draws[i]), maturity);
  });
  return summarize(values);
}

inline McResult mass_zero_mc(const SabrParams& p, double maturity, const McConfig& cfg) {
  detail::require(p.beta() < 1.0, "sabr: mass at zero is not available for beta = 1");
  return mass_zero_mc(p, maturity, sample_v(p.nu(), maturity, cfg), cfg.threads);
}

/// Option price averaged over given variance draws.
inline McResult price_mc(const SabrParams& p, const OptionSpec& o, std::span<const double> v_draws,
                         unsigned threads = 1) {
  o.validate();
  std::vector<double> values(v_draws.size());
  detail::parallel_blocks(v_draws.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) values[i] = conditional_price(p, p.y0() * std::sqrt(v_draws[i]), o);
  });
  return summarize(values);
}

inline McResult price_mc(const SabrParams& p, const OptionSpec& o, const McConfig& cfg) {
  o.validate();
  return price_mc(p, o, sample_v(p.nu(), o.maturity, cfg), cfg.threads);
}

}  // namespace sabrghq

#endif  // SABRGHQ_MONTE_CARLO_HPP
