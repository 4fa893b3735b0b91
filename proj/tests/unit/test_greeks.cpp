#include <gtest/gtest.h>

#include <cmath>

#include "hestonlab/black.hpp"
#include "hestonlab/greeks.hpp"

using namespace hestonlab;
using namespace hestonlab::greeks;

namespace {

const HestonParams kRef{0.04, 0.04, 1.2, 0.3, -0.5};

void expect_close(const GreekValue& mc, const GreekValue& fd, double se_mult, double rel,
                  const char* what) {
    const double tol = std::max(se_mult * mc.std_error, rel * std::abs(fd.value));
    EXPECT_NEAR(mc.value, fd.value, tol) << what;
}

}  // namespace

TEST(GreekMethod, StringsRoundTrip) {
    for (auto m : {GreekMethod::pathwise_mixing, GreekMethod::finite_difference, GreekMethod::pw,
                   GreekMethod::lr, GreekMethod::lr_pw, GreekMethod::pw_lr})
        EXPECT_EQ(parse_method(to_string(m)), m);
    EXPECT_EQ(parse_method("fd"), GreekMethod::finite_difference);
    EXPECT_THROW(parse_method("adjoint"), std::invalid_argument);
}

TEST(Pathwise, AgreesWithFiniteDifferences) {
    const auto m = MarketSpec::from_forward(100, 100, 0.05, 1);
    const auto pw = pathwise_greeks(m, kRef, SimConfig{100, 20000, 3, Scheme::mixing});
    const auto fd = fd_greeks(m, kRef);
    expect_close(*pw.delta, *fd.delta, 4, 0.02, "delta");
    expect_close(*pw.gamma, *fd.gamma, 4, 0.02, "gamma");
    expect_close(*pw.vega, *fd.vega, 4, 0.02, "vega");
    expect_close(*pw.theta, *fd.theta, 4, 0.02, "theta");
    expect_close(*pw.rho, *fd.rho, 4, 0.02, "rho");
    EXPECT_TRUE(fd.delta->reliable);
}

TEST(Pathwise, DegenerateCaseIsBlackExactly) {
    const HestonParams flat{0.04, 0.04, 1.2, 0.0, 0.0};
    const auto m = MarketSpec::from_forward(105, 100, 0.05, 1);
    const SimConfig cfg{100, 50, 1, Scheme::mixing};
    const auto g = pathwise_greeks(m, flat, cfg);
    const auto b = analytic::black76_greeks({m.forward(), 100, 0.05, 1, 0.2});
    EXPECT_NEAR(g.delta->value, b.delta, 1e-14);
    EXPECT_NEAR(g.gamma->value, b.gamma, 1e-15);
    EXPECT_NEAR(g.theta->value, b.theta, 1e-12);
    EXPECT_NEAR(g.rho->value, b.rho, 1e-11);
    EXPECT_EQ(g.delta->std_error, 0.0);

    // dv/dv0 decays as (1 - lam h)^i along the Euler path, so the discrete
    // vega is the Black vega weighted by the mean of that factor.
    double weight = 0.0;
    const double h = 0.01;
    for (int i = 0; i < 100; ++i) weight += std::pow(1 - 1.2 * h, i);
    weight /= 100;
    EXPECT_NEAR(g.vega->value, b.vega * weight, 1e-11);

    const HestonParams still{0.04, 0.04, 0.0, 0.0, 0.0};
    EXPECT_NEAR(pathwise_greeks(m, still, cfg).vega->value, b.vega, 1e-11);
}

TEST(Pathwise, ThetaAssemblyVariantsDiffer) {
    const auto m = MarketSpec::from_forward(100, 100, 0.05, 1);
    const SimConfig cfg{100, 20000, 5, Scheme::mixing};
    const double fd = fd_greeks(m, kRef).theta->value;
    const auto mech = pathwise_greeks(m, kRef, cfg, ThetaAssembly::mechanical).theta.value();
    const auto printed = pathwise_greeks(m, kRef, cfg, ThetaAssembly::printed).theta.value();
    EXPECT_NEAR(mech.value, fd, std::max(4 * mech.std_error, 0.02 * std::abs(fd)));
    EXPECT_GT(std::abs(printed.value - fd), 0.5 * std::abs(fd));
}

TEST(Pathwise, RejectsPuts) {
    auto m = MarketSpec::from_forward(100, 100, 0.05, 1);
    m.style = OptionStyle::put;
    EXPECT_THROW(pathwise_greeks(m, kRef, SimConfig{10, 10}), std::invalid_argument);
}

TEST(FiniteDifference, VegaFallsBackToOneSidedAtTheBoundary) {
    HestonParams p = kRef;
    p.v0 = 5e-5;
    const auto g = fd_greeks(MarketSpec{}, p);
    EXPECT_TRUE(std::isfinite(g.vega->value));
    EXPECT_GT(g.vega->value, 0.0);
}

TEST(FiniteDifference, RichardsonBeatsPlainStencil) {
    FdSteps steps;
    const auto plain = fd_greeks(MarketSpec{}, kRef, steps);
    steps.richardson = true;
    const auto rich = fd_greeks(MarketSpec{}, kRef, steps);
    FdSteps fine;
    fine.forward_rel = 1e-3;
    const auto ref = fd_greeks(MarketSpec{}, kRef, fine);
    EXPECT_LT(std::abs(rich.delta->value - ref.delta->value), std::abs(plain.delta->value - ref.delta->value));
    EXPECT_NEAR(rich.gamma->value, ref.gamma->value, 1e-5);
}

TEST(FlatVol, EstimatorsMatchBlackScholes) {
    const MarketSpec m{100, 105, 0.05, 1.0};
    const double sigma = 0.25;
    const auto est = pw_lr_estimators(m, sigma, SimConfig{1, 400000, 13, Scheme::mixing});
    const double sd = sigma;
    const double d1 = (std::log(100.0 / 105) + (0.05 + 0.5 * sigma * sigma)) / sd;
    const double d2 = d1 - sd;
    const double delta = analytic::norm_cdf(d1);
    const double gamma = analytic::norm_pdf(d1) / (100 * sd);
    const double rho = 105 * std::exp(-0.05) * analytic::norm_cdf(d2);
    auto check = [](const std::optional<GreekValue>& v, double truth, const char* what) {
        ASSERT_TRUE(v.has_value()) << what;
        EXPECT_NEAR(v->value, truth, 4 * v->std_error) << what;
    };
    check(est.pw.delta, delta, "pw delta");
    check(est.pw.rho, rho, "pw rho");
    check(est.lr.delta, delta, "lr delta");
    check(est.lr.gamma, gamma, "lr gamma");
    check(est.lr.rho, rho, "lr rho");
    check(est.lr_pw.gamma, gamma, "lr-pw gamma");
    check(est.pw_lr.gamma, gamma, "pw-lr gamma");
    EXPECT_FALSE(est.pw.gamma.has_value());
}

TEST(Correlation, MatchesFiniteDifference) {
    const auto m = MarketSpec::from_forward(100, 100, 0.05, 1);
    const auto cs = correlation_sensitivity(m, kRef, SimConfig{100, 40000, 9, Scheme::mixing});
    const auto fd = fd_correlation_sensitivity(m, kRef);
    EXPECT_NEAR(cs.total.value, fd.value, std::max(4 * cs.total.std_error, 0.03 * std::abs(fd.value)));
    EXPECT_NEAR(cs.total.value, cs.vega_part.value + cs.delta_part.value, 1e-12);
    HestonParams edge = kRef;
    edge.rho = 1.0 - 1e-12;
    EXPECT_THROW(correlation_sensitivity(m, edge, SimConfig{10, 10}), std::invalid_argument);
}
