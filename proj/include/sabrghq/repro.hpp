#ifndef SABRGHQ_REPRO_HPP
#define SABRGHQ_REPRO_HPP

// Row generators behind the command-line tool, kept in the library so that
// the tables can be tested without going through process boundaries.

#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <system_error>
#include <vector>

#include "sabrghq/errors.hpp"
#include "sabrghq/monte_carlo.hpp"
#include "sabrghq/sabr.hpp"
#include "sabrghq/vol.hpp"

namespace sabrghq::repro {

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  if (res.ec != std::errc{}) throw NumericalError("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

inline std::string format_cell(std::optional<double> x) { return x ? format_double(*x) : std::string{}; }

/// `count` evenly spaced points from lo to hi inclusive.
inline std::vector<double> linspace(double lo, double hi, int count) {
  detail::require(std::isfinite(lo) && std::isfinite(hi), "grid: bounds must be finite");
  detail::require(count >= 1, "grid: count must be positive");
  detail::require(count == 1 || hi > lo, "grid: upper bound must exceed lower bound");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + step * i;
  out.back() = hi;
  return out;
}

/// True when prices are non-increasing in strike and lie on or below every
/// chord between neighbours, up to `tol` in price units.
inline bool arbitrage_free(std::span<const double> strikes, std::span<const double> prices, double tol) {
  for (std::size_t i = 1; i < prices.size(); ++i)
    if (prices[i] > prices[i - 1]) return false;
  for (std::size_t i = 1; i + 1 < prices.size(); ++i) {
    const double w = (strikes[i + 1] - strikes[i]) / (strikes[i + 1] - strikes[i - 1]);
    if (prices[i] > w * prices[i - 1] + (1.0 - w) * prices[i + 1] + tol) return false;
  }
  return true;
}

struct MassCurveRow {
  double maturity;
  double mass_ghq;
  std::optional<McResult> mc;
};

/// Mass at zero over a maturity grid; `cfg` absent skips the simulation.
inline std::vector<MassCurveRow> mass_curve_rows(const SabrParams& p, std::span<const double> maturities, int n,
                                                 const std::optional<McConfig>& cfg) {
  const auto rule = ghq(n);
  std::vector<MassCurveRow> rows;
  rows.reserve(maturities.size());
  for (double t : maturities) {
    MassCurveRow row{t, mass_zero_ghq(p, t, rule), std::nullopt};
    if (cfg) row.mc = mass_zero_mc(p, t, *cfg);
    rows.push_back(row);
  }
  return rows;
}

struct SmileCsvRow {
  double strike;
  double log_moneyness;
  double price_ghq;
  double iv_ghq;
  std::optional<double> iv_hklw;
  std::optional<double> iv_dmhj;
  std::optional<McResult> mc;
};

struct SmileTable {
  double mass_ghq;  ///< NaN when beta = 1
  std::vector<SmileCsvRow> rows;
};

/// Smile over log-moneyness points k, with both reference approximations and
/// an optional conditional Monte Carlo price column. The DMHJ column is empty
/// at k = 0 and whenever there is no mass at zero to feed it.
inline SmileTable smile_rows(const SabrParams& p, double maturity, std::span<const double> log_moneyness, int n,
                             const std::optional<McConfig>& cfg, unsigned threads = 1) {
  std::vector<double> strikes;
  strikes.reserve(log_moneyness.size());
  for (double k : log_moneyness) strikes.push_back(p.x0() * std::exp(k));
  const auto smile = smile_ghq(p, strikes, maturity, n, threads);

  SmileTable table{NAN, {}};
  if (p.beta() < 1.0) table.mass_ghq = mass_zero_ghq(p, maturity, n);
  std::vector<double> draws;
  if (cfg) draws = sample_v(p.nu(), maturity, *cfg);

  for (std::size_t i = 0; i < smile.size(); ++i) {
    SmileCsvRow row{strikes[i], log_moneyness[i], smile[i].call_price, smile[i].implied_vol, {}, {}, {}};
    if (p.beta() > 0.0) row.iv_hklw = hklw_vol(p, strikes[i], maturity);
    if (log_moneyness[i] != 0.0 && table.mass_ghq > 0.0 && table.mass_ghq < 1.0)
      row.iv_dmhj = dmhj_vol(table.mass_ghq, p.x0(), strikes[i], maturity);
    if (cfg) row.mc = price_mc(p, {strikes[i], maturity}, draws, cfg->threads);
    table.rows.push_back(row);
  }
  return table;
}

struct ConvergeRow {
  int order;
  double mass;
  double error;  ///< |mass - mass at the reference order|
};

/// Mass at zero for orders 2..20 followed by the reference order itself.
inline std::vector<ConvergeRow> converge_rows(const SabrParams& p, double maturity, int reference = 100) {
  const double ref = mass_zero_ghq(p, maturity, reference);
  std::vector<ConvergeRow> rows;
  for (int n = 2; n <= 20; ++n) {
    const double m = mass_zero_ghq(p, maturity, n);
    rows.push_back({n, m, std::fabs(m - ref)});
  }
  rows.push_back({reference, ref, 0.0});
  return rows;
}

struct McCheckRow {
  std::string quantity;           ///< "mass" or "call"
  std::optional<double> strike;
  double ghq;
  McResult mc;
  double budget;                  ///< 3 standard errors plus the bias allowance
  bool agrees() const { return std::fabs(mc.estimate - ghq) <= budget; }
};

/// GHQ against conditional Monte Carlo on one shared set of variance draws:
/// the mass at zero (beta < 1) with a 2e-3 allowance, then calls at each
/// strike with a 1e-4 x0 allowance.
inline std::vector<McCheckRow> mc_check_rows(const SabrParams& p, double maturity, std::span<const double> strikes, int n,
                                             const McConfig& cfg) {
  const auto rule = ghq(n);
  const auto draws = sample_v(p.nu(), maturity, cfg);
  std::vector<McCheckRow> rows;
  if (p.beta() < 1.0) {
    const McResult r = mass_zero_mc(p, maturity, draws, cfg.threads);
    rows.push_back({"mass", std::nullopt, mass_zero_ghq(p, maturity, rule), r, 3.0 * r.std_error + 2e-3});
  }
  for (double k : strikes) {
    const OptionSpec o{k, maturity};
    const McResult r = price_mc(p, o, draws, cfg.threads);
    rows.push_back({"call", k, price_ghq(p, o, rule), r, 3.0 * r.std_error + 1e-4 * p.x0()});
  }
  return rows;
}

/// CSV writer: '#' comment line, header row, then data rows.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void comment(const std::string& text) { out_ << "# " << text << '\n'; }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

}  // namespace sabrghq::repro

#endif  // SABRGHQ_REPRO_HPP
