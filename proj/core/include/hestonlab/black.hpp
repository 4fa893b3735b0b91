#pragma once

#include "hestonlab/types.hpp"

namespace hestonlab::analytic {

double norm_pdf(double x);
double norm_cdf(double x);

/// Black-Scholes call on a spot level. sigma == 0 gives the discounted
/// forward intrinsic (s - k e^{-rt})^+; k == 0 gives s.
double black_scholes_call(double s, double k, double r, double t, double sigma);
double black_scholes_put(double s, double k, double r, double t, double sigma);
double black_scholes(double s, double k, double r, double t, double sigma, OptionStyle style);

/// Black (1976) futures-option premium e^{-rt} [f N(d+) - k N(d-)].
double black76(double f, double k, double r, double t, double sigma, OptionStyle style);

struct BlackInputs {
    double f = 100.0;
    double k = 100.0;
    double r = 0.0;
    double t = 1.0;
    double sigma = 0.2;
};

/// Call sensitivities used by the mixing Greeks.
///
/// delta and gamma differentiate in the forward f. vega differentiates in
/// sigma. theta (-d/dT) and rho (d/dr) hold the spot s = f e^{-rT} fixed,
/// which is the convention under which the conditional mixing value has no
/// explicit r dependence:
///   delta = e^{-rT} N(d+)
///   gamma = e^{-rT} phi(d+) / (f sigma sqrt(T))
///   vega  = f e^{-rT} phi(d+) sqrt(T)
///   theta = -e^{-rT} (f phi(d+) sigma / (2 sqrt(T)) + r k N(d-))
///   rho   = k T e^{-rT} N(d-)
struct BlackGreeks {
    double delta = 0.0;
    double gamma = 0.0;
    double vega = 0.0;
    double theta = 0.0;
    double rho = 0.0;
};

BlackGreeks black76_greeks(const BlackInputs& in);

}  // namespace hestonlab::analytic
