// Minimal use of the library: mass at zero, a price, and a short smile.

#include <cstdio>
#include <vector>

#include "sabrghq/sabrghq.hpp"

int main() {
  using namespace sabrghq;

  const SabrParams p(0.5, 0.5, 0.4, 0.5);  // x0, y0, nu, beta
  const double t = 2.0;

  std::printf("mass at zero: %.6f\n", mass_zero_ghq(p, t));
  std::printf("ATM call:     %.6f\n", price_ghq(p, {0.5, t}));

  McConfig cfg;
  cfg.paths = 20000;
  const McResult mc = price_mc(p, {0.5, t}, cfg);
  std::printf("ATM call MC:  %.6f +/- %.6f\n", mc.estimate, mc.std_error);

  const std::vector<double> strikes = {0.05, 0.1, 0.25, 0.5, 1.0};
  for (const auto& row : smile_ghq(p, strikes, t))
    std::printf("K=%-5g price=%.6f iv=%.4f hklw=%.4f\n", row.strike, row.call_price, row.implied_vol,
                hklw_vol(p, row.strike, t));
}
