#ifndef SABRGHQ_SPECFUN_HPP
#define SABRGHQ_SPECFUN_HPP

/**
 * @file specfun.hpp
 * @brief Special functions used by the pricing formulas.
 *
 * Standard normal CDF and quantile, the regularized incomplete gamma
 * functions P(a, x) and Q(a, x), and the noncentral chi-squared CDF and
 * survival function with real degrees of freedom.
 *
 * Gamma prefactors x^a e^{-x} / Gamma(a+1) are evaluated with Loader's
 * saddle-point decomposition (Stirling error + deviance term), so they stay
 * accurate when a and x are both large and close to each other.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>

#include "sabrghq/errors.hpp"

namespace sabrghq {

/// Arguments of the regularized incomplete gamma functions.
struct GammaArgs {
  double x;  ///< integration bound, x >= 0
  double a;  ///< shape, a > 0
};

/// Arguments of the noncentral chi-squared distribution functions.
struct Ncx2Args {
  double x;             ///< evaluation point, x >= 0
  double dof;           ///< degrees of freedom r > 0, need not be an integer
  double noncentrality; ///< x' >= 0
};

/// Standard normal CDF.
inline double norm_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

inline double norm_pdf(double z) {
  return std::exp(-0.5 * z * z) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

namespace detail {

/// Wichura's AS241 (PPND16) rational approximation, about 1e-16 relative.
inline double quantile_as241(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        ((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
             6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
           1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
         1.3314166789178437745e+2) * r + 3.3871328727963666080e+0;
    const double den =
        ((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
             3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
           5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
         4.2313330701600911252e+1) * r + 1.0;
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        ((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
             2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
           3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
         4.63033784615654529590e+0) * r + 1.42343711074968357734e+0;
    const double den =
        ((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
             1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
           6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
         2.05319162663775882187e+0) * r + 1.0;
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
             1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
           2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
         5.46378491116411436990e+0) * r + 6.65790464350110377720e+0;
    const double den =
        ((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
             1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
           1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
         5.99832206555887937690e-1) * r + 1.0;
    value = num / den;
  }
  return q < 0.0 ? -value : value;
}

/// log(Gamma(n+1)) - [(n+1/2) log n - n + log sqrt(2 pi)].
inline double stirling_error(double n) {
  constexpr double kLogSqrt2Pi = 0.91893853320467274178;
  if (n <= 15.0) {
    if (n == 0.0) return 1.0 - kLogSqrt2Pi;
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - kLogSqrt2Pi;
  }
  const double nn = n * n;
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

/// Deviance term x log(x/m) + m - x, computed without cancellation near x = m.
inline double deviance(double x, double m) {
  if (std::fabs(x - m) < 0.1 * (x + m)) {
    double v = (x - m) / (x + m);
    double s = (x - m) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / m) + m - x;
}

/// log( x^a e^{-x} / Gamma(a+1) ) for a >= 0, x >= 0.
inline double log_poisson_term(double a, double x) {
  if (x == 0.0) return a == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (a == 0.0) return -x;
  return -stirling_error(a) - deviance(a, x) - 0.5 * std::log(2.0 * std::numbers::pi * a);
}

struct GammaPQ {
  double p;  ///< lower regularized P(a, x)
  double q;  ///< upper regularized Q(a, x)
};

inline std::size_t gamma_iteration_budget(double a, double x) {
  return 1000 + static_cast<std::size_t>(40.0 * std::sqrt(a + x));
}

/// Both regularized incomplete gamma functions. The one evaluated directly
/// (series for P when x < a+1, Lentz continued fraction for Q otherwise) is
/// the smaller of the two up to a bounded factor, so the complement taken as
/// 1 - value does not lose relative accuracy on the small side.
inline GammaPQ gamma_pq(double a, double x) {
  if (x == 0.0) return {0.0, 1.0};
  if (std::isinf(x)) return {1.0, 0.0};
  const double log_prefix = log_poisson_term(a, x);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const std::size_t budget = gamma_iteration_budget(a, x);
  if (x < a + 1.0) {
    if (log_prefix < -745.2) return {0.0, 1.0};
    double term = 1.0;
    double sum = 1.0;
    std::size_t n = 1;
    for (; n < budget; ++n) {
      term *= x / (a + static_cast<double>(n));
      sum += term;
      if (term < sum * eps * 0.5) break;
    }
    if (n == budget) throw NumericalError("gamma_pq: series did not converge");
    const double p = std::min(1.0, std::exp(log_prefix) * sum);
    return {p, 1.0 - p};
  }
  // Q(a,x) = x^a e^{-x} / Gamma(a) * 1/(x+1-a- 1(1-a)/(x+3-a- 2(2-a)/(x+5-a- ...)))
  const double log_q_prefix = log_prefix + std::log(a);
  if (log_q_prefix < -745.2) return {1.0, 0.0};
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  std::size_t i = 1;
  for (; i < budget; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < eps) break;
  }
  if (i == budget) throw NumericalError("gamma_pq: continued fraction did not converge");
  const double q = std::min(1.0, std::exp(log_q_prefix) * h);
  return {1.0 - q, q};
}

inline void check_gamma_args(const GammaArgs& args) {
  require(args.x >= 0.0, "incomplete gamma: x must be non-negative");
  require(args.a > 0.0 && std::isfinite(args.a), "incomplete gamma: a must be positive and finite");
}

inline void check_ncx2_args(const Ncx2Args& args) {
  require(args.x >= 0.0, "noncentral chi-squared: x must be non-negative");
  require(args.dof > 0.0 && std::isfinite(args.dof), "noncentral chi-squared: dof must be positive");
  require(args.noncentrality >= 0.0 && std::isfinite(args.noncentrality),
          "noncentral chi-squared: non-centrality must be non-negative");
}

struct Ncx2Split {
  double cdf;
  double sf;
};

/// Poisson mixture sum_j Pois(j; x'/2) * {P, Q}(r/2 + j, x/2), expanded from
/// the Poisson mode in both directions. Adjacent gamma values come from
///   P(a+1) = P(a) - d(a),  Q(a+1) = Q(a) + d(a),  d(a) = y^a e^{-y} / Gamma(a+1)
/// so only the mode term needs a full incomplete-gamma evaluation. Each
/// direction stops once the Poisson mass left on that side is below 1e-16.
inline Ncx2Split ncx2_split(const Ncx2Args& args) {
  if (args.x == 0.0) return {0.0, 1.0};
  if (std::isinf(args.x)) return {1.0, 0.0};
  const double y = 0.5 * args.x;
  const double a0 = 0.5 * args.dof;
  const double h = 0.5 * args.noncentrality;
  if (h == 0.0) {
    const GammaPQ pq = gamma_pq(a0, y);
    return {pq.p, pq.q};
  }
  constexpr double tail = 1e-16;

  const double mode = std::floor(h);
  const double a_mode = a0 + mode;
  const double weight_mode = std::exp(log_poisson_term(mode, h));
  const GammaPQ pq_mode = gamma_pq(a_mode, y);
  const double d_mode = std::exp(log_poisson_term(a_mode, y));

  double cdf = weight_mode * pq_mode.p;
  double sf = weight_mode * pq_mode.q;

  // Upward: j = mode+1, mode+2, ...
  {
    double weight = weight_mode;
    double p = pq_mode.p;
    double q = pq_mode.q;
    double d = d_mode;  // d(a_j) for the current j
    double j = mode;
    for (;;) {
      const double a = a0 + j;
      p = std::max(0.0, p - d);
      q = std::min(1.0, q + d);
      d *= y / (a + 1.0);
      weight *= h / (j + 1.0);
      j += 1.0;
      cdf += weight * p;
      sf += weight * q;
      // Remaining mass beyond j is bounded by a geometric series once the
      // ratio h/(j+1) drops below one.
      const double ratio = h / (j + 1.0);
      if (ratio < 1.0 && weight * ratio / (1.0 - ratio) < tail) break;
      if (weight == 0.0 && j > h) break;
    }
  }
  // Downward: j = mode-1, ..., 0
  {
    double weight = weight_mode;
    double p = pq_mode.p;
    double q = pq_mode.q;
    double d = d_mode;
    double j = mode;
    while (j > 0.0) {
      const double a = a0 + j;
      d *= a / y;  // d(a-1)
      p = std::min(1.0, p + d);
      q = std::max(0.0, q - d);
      weight *= j / h;
      j -= 1.0;
      cdf += weight * p;
      sf += weight * q;
      const double ratio = j / h;
      if (ratio < 1.0 && weight * ratio / (1.0 - ratio) < tail) break;
    }
  }
  if (cdf <= sf) {
    cdf = std::clamp(cdf, 0.0, 1.0);
    return {cdf, 1.0 - cdf};
  }
  sf = std::clamp(sf, 0.0, 1.0);
  return {1.0 - sf, sf};
}

}  // namespace detail

/// Inverse of the standard normal CDF. AS241 followed by one Halley step
/// against norm_cdf; the upper half is reflected so the step always works in
/// the lower tail where erfc is relatively accurate.
inline double norm_quantile(double p) {
  detail::require(p > 0.0 && p < 1.0, "norm_quantile: p must lie in (0, 1)");
  if (p > 0.5) return -norm_quantile(1.0 - p);
  double z = detail::quantile_as241(p);
  const double err = norm_cdf(z) - p;
  const double u = err * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * z * z);
  z -= u / (1.0 + 0.5 * z * u);
  return z;
}

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
inline double gamma_upper_reg(const GammaArgs& args) {
  detail::check_gamma_args(args);
  return detail::gamma_pq(args.a, args.x).q;
}

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_lower_reg(const GammaArgs& args) {
  detail::check_gamma_args(args);
  return detail::gamma_pq(args.a, args.x).p;
}

/// Noncentral chi-squared CDF.
inline double ncx2_cdf(const Ncx2Args& args) {
  detail::check_ncx2_args(args);
  return detail::ncx2_split(args).cdf;
}

/// Noncentral chi-squared survival function 1 - CDF, computed without the
/// subtraction when it is the smaller side.
inline double ncx2_sf(const Ncx2Args& args) {
  detail::check_ncx2_args(args);
  return detail::ncx2_split(args).sf;
}

}  // namespace sabrghq

#endif  // SABRGHQ_SPECFUN_HPP
