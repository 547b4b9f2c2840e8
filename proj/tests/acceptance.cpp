// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Tolerances are fixed here and nowhere else.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sabrghq/sabrghq.hpp"

namespace {

using namespace sabrghq;

struct Case {
  SabrParams p;
  double maturity;
  const char* label;
};

const Case kSmileA{SabrParams(0.5, 0.5, 0.4, 0.5), 2.0, "set A"};
const Case kSmileB{SabrParams(0.05, 0.4, 0.6, 0.3), 1.0, "set B"};

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("[criterion %d] %s %s\n", id, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<double> log_strikes(const SabrParams& p, double lo, double hi, int count) {
  std::vector<double> k;
  for (double x : repro::linspace(lo, hi, count)) k.push_back(p.x0() * std::exp(x));
  return k;
}

void criterion1() {
  const double a = mass_zero_ghq(kSmileA.p, kSmileA.maturity, 10);
  const double b = mass_zero_ghq(kSmileB.p, kSmileB.maturity, 10);
  const bool ok = std::fabs(a - 0.1657) <= 5e-4 && std::fabs(b - 0.7624) <= 5e-4;
  report(1, ok, "mass at zero, n=10: " + fmt("%.6f", a) + " vs 0.1657, " + fmt("%.6f", b) + " vs 0.7624 (tol 5e-4)");
}

void criterion2(const std::vector<double>& draws_a, const std::vector<double>& draws_b) {
  bool ok = true;
  std::string detail;
  for (const auto& [c, draws, published] :
       {std::tuple{kSmileA, &draws_a, 0.1634}, std::tuple{kSmileB, &draws_b, 0.7758}}) {
    const McResult mc = mass_zero_mc(c.p, c.maturity, *draws, 0);
    const double ghq_mass = mass_zero_ghq(c.p, c.maturity, 10);
    const bool brackets = std::fabs(mc.estimate - published) <= 3.0 * mc.std_error;
    const double gap = std::fabs(mc.estimate - ghq_mass);
    const double budget = 3.0 * mc.std_error + 2e-3;
    ok = ok && brackets && gap <= budget;
    detail += std::string(c.label) + ": mc " + fmt("%.5f", mc.estimate) + " se " + fmt("%.1e", mc.std_error) +
              (brackets ? " brackets " : " misses ") + fmt("%.4f", published) + ", |mc-ghq| " + fmt("%.2e", gap) +
              (gap <= budget ? " <= " : " > ") + fmt("%.2e", budget) + "; ";
  }
  report(2, ok, "Monte Carlo cross-check (1e5 paths): " + detail);
}

void criterion3_and_4() {
  const auto grid = repro::linspace(0.25, 10.0, 40);
  bool conv_ok = true;
  bool mono_ok = true;
  std::string conv_detail;
  std::string mono_detail;
  for (const auto& [beta, tol] : {std::pair{0.5, 1e-8}, std::pair{0.3, 1e-6}}) {
    const SabrParams p(0.03, 0.6, 1.0, beta);
    const auto r10 = ghq(10);
    const auto r100 = ghq(100);
    double worst = 0.0;
    double worst_t = 0.0;
    int over = 0;
    double prev = -1.0;
    int drops = 0;
    double first_drop = NAN;
    for (double t : grid) {
      const double m10 = mass_zero_ghq(p, t, r10);
      const double err = std::fabs(m10 - mass_zero_ghq(p, t, r100));
      if (err > worst) {
        worst = err;
        worst_t = t;
      }
      if (err > tol) ++over;
      if (m10 < prev) {
        if (drops++ == 0) first_drop = t;
      }
      prev = m10;
    }
    conv_ok = conv_ok && over == 0;
    mono_ok = mono_ok && drops == 0;
    conv_detail += "beta " + fmt("%.1f", beta) + ": max err " + fmt("%.2e", worst) + " at T=" + fmt("%g", worst_t) +
                   ", " + std::to_string(over) + "/40 above " + fmt("%.0e", tol) + "; ";
    mono_detail += "beta " + fmt("%.1f", beta) + ": " + std::to_string(drops) + " decreases" +
                   (drops ? " from T=" + fmt("%g", first_drop) : std::string{}) + "; ";
  }
  report(3, conv_ok, "GHQ n=10 vs n=100 on T in [0.25, 10] (40 points): " + conv_detail);
  report(4, mono_ok, "mass non-decreasing in T on the same grid: " + mono_detail);
}

void criterion5() {
  bool ok = true;
  double worst = 0.0;
  for (double t : {0.5, 3.0})
    for (double nu_t : {0.0, 1e-8}) {
      const auto mm = moment_match(nu_t, t);
      ok = ok && mm.mu1 == 1.0 && mm.mu2 == 1.0 && mm.lambda == 0.0;
    }
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double beta : {0.0, 0.3, 0.5, 1.0}) {
    for (int i = 0; i < 50; ++i) {
      const double x0 = 0.02 + u(rng);
      const double y0 = (0.05 + 0.7 * u(rng)) * std::pow(x0, 1.0 - beta);
      const double t = 0.1 + 4.0 * u(rng);
      const double strike = x0 * std::exp(2.0 * (u(rng) - 0.6));
      const SabrParams p(x0, y0, 0.0, beta);
      const OptionSpec o{strike, t, u(rng) < 0.5 ? OptionKind::call : OptionKind::put};
      double kernel;
      if (beta == 1.0)
        kernel = bs_price(x0, y0, o);
      else if (beta == 0.0)
        kernel = bachelier_price(x0, y0, o);
      else
        kernel = cev_price(CevParams(x0, y0, beta), o);
      const double rel = std::fabs(price_ghq(p, o) - kernel) / std::max(std::fabs(kernel), 1e-300);
      worst = std::max(worst, kernel == 0.0 ? std::fabs(price_ghq(p, o)) : rel);
    }
  }
  ok = ok && worst <= 1e-14;
  report(5, ok, "nu=0 reduces to the kernel price (200 draws, beta in {0,0.3,0.5,1}): max rel diff " +
                    fmt("%.1e", worst) + " (tol 1e-14); moment_match gives (1,1,0) exactly");
}

void criterion6() {
  bool ok = true;
  std::string detail;
  for (const Case& c : {kSmileA, kSmileB}) {
    const auto strikes = log_strikes(c.p, -4.0, 1.0, 20);
    std::vector<double> calls;
    double parity = 0.0;
    for (double k : strikes) {
      const double call = price_ghq(c.p, {k, c.maturity, OptionKind::call});
      const double put = price_ghq(c.p, {k, c.maturity, OptionKind::put});
      calls.push_back(call);
      parity = std::max(parity, std::fabs(call - put - (c.p.x0() - k)) / std::max(c.p.x0(), k));
    }
    const bool shape = repro::arbitrage_free(strikes, calls, 1e-10 * c.p.x0());
    ok = ok && shape && parity <= 1e-12;
    detail += std::string(c.label) + (shape ? ": monotone and convex" : ": SHAPE VIOLATION") + ", parity " +
              fmt("%.1e", parity) + "; ";
  }
  report(6, ok, "no-arbitrage on 20 log-strikes in [-4, 1]: " + detail);
}

void criterion7() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(0.0, 60.0);
  std::uniform_real_distribution<double> unc(0.0, 80.0);
  const std::vector<double> dofs = {10.0 / 7.0, 24.0 / 7.0, 0.5, 1.0, 3.0, 6.5};
  double worst_ncx2 = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double x = ux(rng);
    const double r = dofs[static_cast<std::size_t>(i) % dofs.size()];
    const double nc = unc(rng);
    worst_ncx2 = std::max(worst_ncx2, std::fabs(ncx2_cdf({x, r, nc}) - oracle::ncx2_cdf_poisson(x, r, nc)));
  }
  double worst_gamma = 0.0;
  for (double a : {0.5, 1.0 / 1.4, 1.0, 1.7, 3.5, 12.0, 40.0}) {
    for (double x : {0.01, 0.3, 1.0, 2.5, 6.0, 15.0, 45.0, 120.0}) {
      const double expected = oracle::gamma_q_quad(x, a);
      if (expected < 1e-300) continue;
      worst_gamma = std::max(worst_gamma, std::fabs(gamma_upper_reg({x, a}) - expected) / expected);
    }
  }
  const bool ok = worst_ncx2 <= 1e-12 && worst_gamma <= 1e-13;
  report(7, ok, "special functions vs oracles: ncx2 max abs " + fmt("%.1e", worst_ncx2) + " (tol 1e-12, 200 pts), " +
                    "gamma Q max rel " + fmt("%.1e", worst_gamma) + " (tol 1e-13)");
}

void criterion8() {
  bool ok = true;
  std::string detail;
  for (const Case& c : {kSmileA, kSmileB}) {
    const double mass = mass_zero_ghq(c.p, c.maturity, 10);
    const auto strikes = log_strikes(c.p, -4.0, 1.0, 41);
    const auto smile = smile_ghq(c.p, strikes, c.maturity);
    double gap[3];
    for (int i = 0; i < 3; ++i) {
      const double iv = smile[static_cast<std::size_t>(i)].implied_vol;
      gap[i] = std::fabs(dmhj_vol(mass, c.p.x0(), strikes[static_cast<std::size_t>(i)], c.maturity) - iv) / iv;
    }
    const bool shrinking = gap[0] < gap[1] && gap[1] < gap[2];
    ok = ok && shrinking && gap[0] < 0.05;
    detail += std::string(c.label) + ": gaps " + fmt("%.4f", gap[2]) + " > " + fmt("%.4f", gap[1]) + " > " +
              fmt("%.4f", gap[0]) + (shrinking ? "" : " (NOT DECREASING)") + "; ";
  }
  report(8, ok, "DMHJ vs GHQ implied vol at k = -3.75, -3.875, -4 (smallest < 5%): " + detail);
}

void criterion9(const std::vector<double>& draws_a, const std::vector<double>& draws_b) {
  // Deviation over the at-the-money region |k| <= 0.5 of the 41-point grid.
  double dev[2];
  int idx = 0;
  for (const Case& c : {kSmileA, kSmileB}) {
    std::vector<double> strikes;
    for (double k : repro::linspace(-4.0, 1.0, 41))
      if (std::fabs(k) <= 0.5 + 1e-12) strikes.push_back(c.p.x0() * std::exp(k));
    double worst = 0.0;
    for (const auto& row : smile_ghq(c.p, strikes, c.maturity))
      worst = std::max(worst, std::fabs(hklw_vol(c.p, row.strike, c.maturity) - row.implied_vol));
    dev[idx++] = worst;
  }
  const bool ordering = dev[1] > dev[0];

  bool prices_ok = true;
  std::string detail;
  for (const auto& [c, draws] : {std::pair{kSmileA, &draws_a}, std::pair{kSmileB, &draws_b}}) {
    int over = 0;
    double worst_ratio = 0.0;
    for (double k : log_strikes(c.p, -1.0, 0.5, 5)) {
      const OptionSpec o{k, c.maturity};
      const McResult mc = price_mc(c.p, o, *draws, 0);
      const double gap = std::fabs(mc.estimate - price_ghq(c.p, o, 10));
      const double budget = 3.0 * mc.std_error + 1e-4 * c.p.x0();
      worst_ratio = std::max(worst_ratio, gap / budget);
      if (gap > budget) ++over;
    }
    prices_ok = prices_ok && over == 0;
    detail += std::string(c.label) + ": " + std::to_string(over) + "/5 outside budget, worst gap/budget " +
              fmt("%.2f", worst_ratio) + "; ";
  }
  report(9, ordering && prices_ok,
         "HKLW ATM deviation A " + fmt("%.4f", dev[0]) + (ordering ? " < " : " >= ") + "B " + fmt("%.4f", dev[1]) +
             "; MC price agreement at k in [-1, 0.5] (3 se + 1e-4 x0): " + detail);
}

}  // namespace

int main() {
  McConfig cfg;  // 1e5 paths, 256 Simpson intervals, default seed
  const auto draws_a = sample_v(kSmileA.p.nu(), kSmileA.maturity, cfg);
  const auto draws_b = sample_v(kSmileB.p.nu(), kSmileB.maturity, cfg);

  criterion1();
  criterion2(draws_a, draws_b);
  criterion3_and_4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9(draws_a, draws_b);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
