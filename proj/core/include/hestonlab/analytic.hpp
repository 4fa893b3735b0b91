#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include "hestonlab/black.hpp"
#include "hestonlab/types.hpp"

namespace hestonlab::analytic {

/// C(u, tau) and D(u, tau) of the exponential-affine transform
/// exp{C vbar + D v} for parity index j in {0, 1}.
struct CfCoefficients {
    std::complex<double> c;
    std::complex<double> d;
};

/// Solves dD/dtau = alpha - beta D + gamma D^2, dC/dtau = lam D with
/// C(u,0) = D(u,0) = 0, where
///   alpha = -u^2/2 - iu/2 + iju,  beta = lam - rho eta j - rho eta iu,
///   gamma = eta^2 / 2,
/// in the r_-/g form (D = r_- (1 - e^{-d tau}) / (1 - g e^{-d tau})).
/// Throws std::invalid_argument for eta == 0, tau < 0 or j outside {0, 1}.
CfCoefficients cf_coefficients(std::complex<double> u, double tau, const HestonParams& p, int j);

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved_error)
        : std::runtime_error(what), achieved_error_(achieved_error) {}
    double achieved_error() const { return achieved_error_; }

private:
    double achieved_error_;
};

struct QuadratureOptions {
    double u_min = 1e-8;            // left end; [0, u_min] added as a rectangle
    double u_max_initial = 200.0;   // first truncation point, doubled as needed
    double tail_tolerance = 1e-12;  // stop once a doubling adds less than this
    double u_max_limit = 1e6;
    double relative_tolerance = 1e-13;
    double max_error = 1e-9;        // reported failure above this bound
    unsigned max_depth = 18;
};

struct ProbResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute quadrature error
    double u_max = 0.0;  // truncation point actually used
};

/// P_j(x, v0, tau) = +-1/2 + (1/pi) int_0^inf Re{exp(C vbar + D v0 + iux) / (iu)} du,
/// with +1/2 for calls and -1/2 for puts. x = ln(S e^{r tau} / K).
ProbResult heston_prob(double x, double v0, double tau, const HestonParams& p, int j,
                       OptionStyle style, const QuadratureOptions& opts = {});

/// The real integrand Re{exp(C vbar + D v0 + iux) / (iu)} at u > 0.
double prob_integrand(double u, double x, double v0, double tau, const HestonParams& p, int j);

struct PriceQuote {
    double value = 0.0;
    double p0 = 0.0;
    double p1 = 0.0;
    double quadrature_error = 0.0;
};

/// Heston European price  S0 P1 - K e^{-r tau} P0  with call- or put-style P_j.
/// eta == 0 routes to price_deterministic_vol. Throws std::invalid_argument for
/// invalid inputs, including k == 0 where the log-moneyness is undefined.
PriceQuote price(const MarketSpec& m, const HestonParams& p, const QuadratureOptions& opts = {});

/// sigma* = sqrt(vbar + (1 - e^{-lam T}) / (lam T) (v0 - vbar)), with the
/// lam T -> 0 limit sqrt(v0) taken by series.
double equivalent_vol(const HestonParams& p, double t);

/// Deterministic-variance (eta = 0) price: Black-Scholes at sigma*.
/// p0/p1 carry N(d-)/N(d+) (shifted by -1 for puts) and the error is zero.
PriceQuote price_deterministic_vol(const MarketSpec& m, const HestonParams& p);

}  // namespace hestonlab::analytic
