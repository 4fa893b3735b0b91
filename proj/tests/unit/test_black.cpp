#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hestonlab/black.hpp"

using namespace hestonlab;
using namespace hestonlab::analytic;

namespace {

// Independent oracle: discounted payoff integrated against the lognormal
// density in the standard-normal variable.
double quadrature_call(double s, double k, double r, double t, double sigma) {
    const double mu = (r - 0.5 * sigma * sigma) * t;
    const double sd = sigma * std::sqrt(t);
    auto f = [&](double z) {
        const double st = s * std::exp(mu + sd * z);
        return std::max(st - k, 0.0) * std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI);
    };
    const double z_star = (std::log(k / s) - mu) / sd;
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    return std::exp(-r * t) * GK::integrate(f, z_star, 12.0, 20, 1e-14);
}

}  // namespace

TEST(Black, NormalCdfReference) {
    EXPECT_DOUBLE_EQ(norm_cdf(0.0), 0.5);
    EXPECT_NEAR(norm_cdf(1.959963984540054), 0.975, 1e-15);
    EXPECT_NEAR(norm_cdf(-8.0), 6.22096057427178e-16, 1e-28);
    EXPECT_NEAR(norm_pdf(1.0), 0.24197072451914337, 1e-16);
}

TEST(Black, CallMatchesQuadratureOracle) {
    for (double s : {80.0, 100.0, 125.0})
        for (double sigma : {0.1, 0.25, 0.6})
            for (double t : {0.25, 1.0, 3.0}) {
                const double bs = black_scholes_call(s, 100, 0.05, t, sigma);
                EXPECT_NEAR(bs, quadrature_call(s, 100, 0.05, t, sigma), 1e-8)
                    << s << ' ' << sigma << ' ' << t;
            }
}

TEST(Black, PutCallParity) {
    for (double k : {50.0, 100.0, 170.0}) {
        const double c = black_scholes_call(100, k, 0.03, 0.7, 0.3);
        const double p = black_scholes_put(100, k, 0.03, 0.7, 0.3);
        EXPECT_NEAR(c - p, 100 - k * std::exp(-0.03 * 0.7), 1e-12);
    }
}

TEST(Black, DegenerateInputs) {
    EXPECT_DOUBLE_EQ(black_scholes_call(100, 90, 0.05, 1, 0.0), 100 - 90 * std::exp(-0.05));
    EXPECT_DOUBLE_EQ(black_scholes_call(100, 110, 0.0, 1, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(black_scholes_call(100, 0, 0.05, 1, 0.2), 100.0);
}

TEST(Black, Black76IsBlackScholesOnTheDiscountedForward) {
    const double f = 100 * std::exp(0.05 * 0.5);
    EXPECT_NEAR(black76(f, 95, 0.05, 0.5, 0.2, OptionStyle::call),
                black_scholes_call(100, 95, 0.05, 0.5, 0.2), 1e-12);
    EXPECT_NEAR(black76(f, 95, 0.05, 0.5, 0.2, OptionStyle::put),
                black_scholes_put(100, 95, 0.05, 0.5, 0.2), 1e-12);
}

TEST(Black, GreeksMatchFiniteDifferenceOracle) {
    for (double f : {80.0, 100.0, 120.0}) {
        const BlackInputs in{f, 100.0, 0.05, 1.0, 0.25};
        const auto g = black76_greeks(in);
        auto price = [](double f_, double k, double r, double t, double s) {
            return black76(f_, k, r, t, s, OptionStyle::call);
        };
        const double hf = 1e-3 * f;
        EXPECT_NEAR(g.delta, (price(f + hf, 100, 0.05, 1, 0.25) - price(f - hf, 100, 0.05, 1, 0.25)) / (2 * hf), 1e-6);
        EXPECT_NEAR(g.gamma,
                    (price(f + hf, 100, 0.05, 1, 0.25) - 2 * price(f, 100, 0.05, 1, 0.25) +
                     price(f - hf, 100, 0.05, 1, 0.25)) / (hf * hf),
                    1e-6);
        const double hs = 1e-5;
        EXPECT_NEAR(g.vega, (price(f, 100, 0.05, 1, 0.25 + hs) - price(f, 100, 0.05, 1, 0.25 - hs)) / (2 * hs), 1e-6);

        // theta and rho hold the spot s = f e^{-rT} fixed.
        const double s = f * std::exp(-0.05);
        auto spot_price = [&](double r, double t) { return black76(s * std::exp(r * t), 100, r, t, 0.25, OptionStyle::call); };
        const double ht = 1e-5;
        EXPECT_NEAR(g.theta, -(spot_price(0.05, 1 + ht) - spot_price(0.05, 1 - ht)) / (2 * ht), 1e-6);
        const double hr = 1e-6;
        EXPECT_NEAR(g.rho, (spot_price(0.05 + hr, 1) - spot_price(0.05 - hr, 1)) / (2 * hr), 1e-5);
    }
}
