#include "sabrghq/vol.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace sabrghq {
namespace {

TEST(ImpliedVol, AtTheMoneyKnownPrice) {
  EXPECT_NEAR(implied_vol_bs(0.07965567455405798, 1.0, 1.0, 1.0), 0.2, 1e-12);
}

TEST(ImpliedVol, RoundTripOverGrid) {
  for (double vol : {0.01, 0.1, 0.3, 1.0, 3.0}) {
    for (double k = -3.0; k <= 1.5; k += 0.25) {
      for (double t : {0.1, 1.0, 5.0}) {
        const double strike = std::exp(k);
        const double price = bs_call(1.0, vol, strike, t);
        // Skip prices with no time value left in double precision.
        const double otm = strike < 1.0 ? price - (1.0 - strike) : price;
        if (otm < 1e-200 || otm < 1e-13 * std::max(1.0, strike)) continue;
        const double got = implied_vol_bs(price, 1.0, strike, t);
        EXPECT_NEAR(bs_call(1.0, got, strike, t), price, 1e-13 * std::max(1.0, strike))
            << vol << " " << k << " " << t;
        if (otm > 1e-10) {
          EXPECT_NEAR(got, vol, 1e-7 * vol) << vol << " " << k << " " << t;
        }
      }
    }
  }
}

TEST(ImpliedVol, IntrinsicGivesZero) {
  EXPECT_EQ(implied_vol_bs(0.0, 1.0, 1.2, 1.0), 0.0);
  EXPECT_EQ(implied_vol_bs(0.25, 1.0, 0.75, 1.0), 0.0);
}

TEST(ImpliedVol, OutOfBand) {
  EXPECT_THROW(implied_vol_bs(-1e-3, 1.0, 1.2, 1.0), BandError);
  EXPECT_THROW(implied_vol_bs(0.1, 1.0, 0.8, 1.0), BandError);
  EXPECT_THROW(implied_vol_bs(1.0, 1.0, 1.2, 1.0), BandError);
  EXPECT_THROW(implied_vol_bs(bs_call(1.0, 11.0, 1.0, 1.0), 1.0, 1.0, 1.0), BandError);
  EXPECT_THROW(implied_vol_bs(0.1, 1.0, -1.0, 1.0), DomainError);
}

TEST(ImpliedVol, TinyTimeValue) {
  const double strike = 1.5;
  const double price = 1e-12;
  const double vol = implied_vol_bs(price, 1.0, strike, 1.0);
  EXPECT_GT(vol, 0.0);
  EXPECT_NEAR(bs_call(1.0, vol, strike, 1.0), price, 1e-14);
}

TEST(Dmhj, HalfMassClosedForm) {
  // m = 1/2 gives q = 0, so sigma sqrt(T) = L + 1/L.
  for (double k : {-4.0, -1.0, -0.1, 0.5}) {
    const double L = std::sqrt(2.0 * std::fabs(k));
    EXPECT_NEAR(dmhj_vol(0.5, 1.0, std::exp(k), 4.0), (L + 1.0 / L) / 2.0, 1e-14) << k;
  }
}

TEST(Dmhj, SymmetricInLogMoneynessAndScaleFree) {
  EXPECT_EQ(dmhj_vol(0.2, 1.0, std::exp(-1.3), 1.0), dmhj_vol(0.2, 1.0, std::exp(1.3), 1.0));
  EXPECT_NEAR(dmhj_vol(0.2, 0.03, 0.03 * std::exp(-2.0), 1.0), dmhj_vol(0.2, 1.0, std::exp(-2.0), 1.0), 1e-14);
}

TEST(Dmhj, DivergesTowardTheMoney) {
  double prev = 0.0;
  // With m > 1/2 every correction term is positive.
  for (double k = -0.2; k < -1e-6; k /= 2.0) {
    const double v = dmhj_vol(0.7, 1.0, std::exp(k), 1.0);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Dmhj, FlooredAtZeroAndErrors) {
  EXPECT_GE(dmhj_vol(1e-12, 1.0, std::exp(-0.5), 1.0), 0.0);
  EXPECT_THROW(dmhj_vol(0.3, 1.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(dmhj_vol(0.0, 1.0, 0.5, 1.0), DomainError);
  EXPECT_THROW(dmhj_vol(1.0, 1.0, 0.5, 1.0), DomainError);
}

TEST(Hklw, LognormalWithoutVolOfVolIsFlat) {
  const SabrParams p(1.0, 0.25, 0.0, 1.0);
  for (double strike : {0.2, 1.0, 3.0}) EXPECT_NEAR(hklw_vol(p, strike, 2.0), 0.25, 1e-15);
}

TEST(Hklw, LognormalSmileIsSymmetricInLogStrike) {
  const SabrParams p(1.0, 0.25, 0.8, 1.0);
  for (double k : {0.1, 0.7, 2.0}) EXPECT_NEAR(hklw_vol(p, std::exp(k), 1.0), hklw_vol(p, std::exp(-k), 1.0), 1e-14);
}

TEST(Hklw, ContinuousAcrossSeriesSwitch) {
  const SabrParams p(1.0, 0.25, 0.8, 1.0);
  const double a = hklw_vol(p, std::exp(-0.99e-4 * 0.25 / 0.8), 1.0);
  const double b = hklw_vol(p, std::exp(-1.01e-4 * 0.25 / 0.8), 1.0);
  EXPECT_NEAR(a, b, 1e-10);
}

TEST(Hklw, AtTheMoneyValue) {
  const SabrParams p(0.5, 0.5, 0.4, 0.5);
  const double u = std::sqrt(0.5);  // x0^{(1-beta)}
  const double expected = 0.5 / u * (1.0 + (0.25 * 0.25 / (24.0 * u * u) + 0.16 / 12.0) * 2.0);
  EXPECT_NEAR(hklw_vol(p, 0.5, 2.0), expected, 1e-15);
}

TEST(Hklw, RejectsNormalBackbone) {
  EXPECT_THROW(hklw_vol(SabrParams(1.0, 0.2, 0.3, 0.0), 1.0, 1.0), DomainError);
}

}  // namespace
}  // namespace sabrghq
