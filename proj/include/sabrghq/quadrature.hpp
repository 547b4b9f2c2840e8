#ifndef SABRGHQ_QUADRATURE_HPP
#define SABRGHQ_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "sabrghq/errors.hpp"

namespace sabrghq {

/// Gauss-Hermite rule normalized for expectations under the standard normal
/// law: E f(Z) ~ sum_k weights[k] * f(nodes[k]).
struct Quadrature {
  std::vector<double> nodes;    ///< strictly increasing, symmetric about 0
  std::vector<double> weights;  ///< positive, sum to 1

  std::size_t order() const { return nodes.size(); }

  template <class F>
  double expectation(F&& f) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) sum += weights[k] * f(nodes[k]);
    return sum;
  }
};

inline constexpr int kMaxQuadratureOrder = 200;

namespace detail {

struct HermiteEval {
  double value;     ///< orthonormal He_n(z)
  double previous;  ///< orthonormal He_{n-1}(z)
};

/// Orthonormal probabilists' Hermite polynomials under the N(0,1) weight:
/// p_j = (z p_{j-1} - sqrt(j-1) p_{j-2}) / sqrt(j), p_0 = 1.
inline HermiteEval hermite_orthonormal(int n, double z) {
  double p_prev = 0.0;
  double p = 1.0;
  for (int j = 1; j <= n; ++j) {
    const double next = (z * p - std::sqrt(static_cast<double>(j - 1)) * p_prev) /
                        std::sqrt(static_cast<double>(j));
    p_prev = p;
    p = next;
  }
  return {p, p_prev};
}

/// Root i (counting down from the largest) of p_n, starting from `guess`.
/// p_n has sign (-1)^i just above root i and below root i-1 (`ceiling`), so a
/// sign-change bracket is located first and Newton steps are kept inside it.
/// Unguarded Newton from the asymptotic guesses can fall back onto an
/// already-found root at high orders.
inline double bracketed_root(int n, int i, double guess, double ceiling) {
  const double sign = (i % 2 == 0) ? 1.0 : -1.0;
  const double dn = static_cast<double>(n);
  auto f = [&](double z) { return sign * hermite_orthonormal(n, z).value; };
  // Local zero spacing on the probabilists' scale.
  auto spacing = [&](double z) {
    return std::numbers::sqrt2 * std::numbers::pi / std::sqrt(std::max(2.0 * dn + 1.0 - 0.5 * z * z, 1.0));
  };

  if (std::isfinite(ceiling) && guess >= ceiling) guess = ceiling - 0.25 * spacing(ceiling);
  double lo;
  double hi;
  if (f(guess) > 0.0) {
    hi = guess;
    lo = hi - 0.25 * spacing(hi);
    while (f(lo) > 0.0) {
      hi = lo;
      lo -= 0.25 * spacing(lo);
    }
  } else {
    lo = guess;
    double top = std::isfinite(ceiling) ? ceiling : guess + 2.0 * spacing(guess);
    while (!std::isfinite(ceiling) && f(top) <= 0.0) top += 2.0 * spacing(top);
    hi = 0.5 * (lo + top);
    for (int k = 0; k < 200 && f(hi) <= 0.0; ++k) {
      lo = hi;
      hi = 0.5 * (hi + top);
    }
    if (f(hi) <= 0.0) throw NumericalError("ghq: failed to bracket a root");
  }

  double z = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const auto ev = hermite_orthonormal(n, z);
    if (sign * ev.value > 0.0) hi = z; else lo = z;
    const double deriv = std::sqrt(dn) * ev.previous;
    double next = deriv != 0.0 ? z - ev.value / deriv : NAN;
    const bool newton = next >= lo && next <= hi;
    if (!newton) next = 0.5 * (lo + hi);
    const double step = std::fabs(next - z);
    z = next;
    if (newton && step <= 1e-14 * std::max(1.0, std::fabs(z))) return z;
    if (hi - lo <= 4e-16 * std::max(1.0, std::fabs(z))) return z;
  }
  throw NumericalError("ghq: Newton iteration did not converge");
}

}  // namespace detail

/// n-point Gauss-Hermite rule, 1 <= n <= 200.
///
/// Roots of He_n are found by bracketed Newton iteration from the largest
/// root down,
/// seeded with the asymptotic guesses of Numerical Recipes' gauher (mapped
/// from the physicists' to the probabilists' scale). Weights are
/// 1 / (n p_{n-1}(z)^2) in the orthonormal basis. Only the non-negative half
/// is computed; the negative half is its mirror image, and the weights are
/// renormalized to sum to one.
inline Quadrature ghq(int n) {
  detail::require(n >= 1 && n <= kMaxQuadratureOrder, "ghq: order must lie in [1, 200]");
  const int half = (n + 1) / 2;
  const double dn = static_cast<double>(n);
  std::vector<double> roots(static_cast<std::size_t>(half));  // descending, positive side
  std::vector<double> raw_weights(static_cast<std::size_t>(half));

  for (int i = 0; i < half; ++i) {
    double x;  // physicists' scale guess
    if (i == 0) {
      x = std::sqrt(2.0 * dn + 1.0) - 1.85575 * std::pow(2.0 * dn + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      const double x1 = roots[0] / std::numbers::sqrt2;
      x = x1 - 1.14 * std::pow(dn, 0.426) / x1;
    } else if (i == 2) {
      x = (1.86 * roots[1] - 0.86 * roots[0]) / std::numbers::sqrt2;
    } else if (i == 3) {
      x = (1.91 * roots[2] - 0.91 * roots[1]) / std::numbers::sqrt2;
    } else {
      x = (2.0 * roots[static_cast<std::size_t>(i - 1)] - roots[static_cast<std::size_t>(i - 2)]) /
          std::numbers::sqrt2;
    }
    double z = std::numbers::sqrt2 * x;
    if (n % 2 == 1 && i == half - 1) {
      z = 0.0;
    } else {
      z = detail::bracketed_root(n, i, z, i == 0 ? INFINITY : roots[static_cast<std::size_t>(i - 1)]);
    }
    const auto ev = detail::hermite_orthonormal(n, z);
    roots[static_cast<std::size_t>(i)] = z;
    raw_weights[static_cast<std::size_t>(i)] = 1.0 / (dn * ev.previous * ev.previous);
  }

  Quadrature rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int i = 0; i < half; ++i) {
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = -roots[lo];
    rule.nodes[hi] = roots[lo];
    rule.weights[lo] = raw_weights[lo];
    rule.weights[hi] = raw_weights[lo];
    total += (lo == hi) ? raw_weights[lo] : 2.0 * raw_weights[lo];
  }
  for (double& w : rule.weights) w /= total;
  return rule;
}

}  // namespace sabrghq

#endif  // SABRGHQ_QUADRATURE_HPP
