#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hestonlab/analytic.hpp"
#include "hestonlab/types.hpp"

namespace hestonlab::greeks {

enum class GreekMethod { pathwise_mixing, finite_difference, pw, lr, lr_pw, pw_lr };

std::string to_string(GreekMethod m);
GreekMethod parse_method(const std::string& s);

struct GreekValue {
    double value = 0.0;
    double std_error = 0.0;  // MC standard error, or FD noise bound
    bool reliable = true;
};

/// Greeks of a futures option. Conventions:
///   delta = dc/dF0, gamma = d2c/dF0^2   (r, T fixed)
///   vega  = dc/d sqrt(v0)
///   theta = -dc/dT, rho = dc/dr          (spot s0 = F0 e^{-rT} fixed)
/// Estimators that do not produce a Greek leave it empty.
struct GreekSet {
    GreekMethod method = GreekMethod::pathwise_mixing;
    std::optional<GreekValue> delta, gamma, vega, theta, rho;
};

/// How the theta estimator combines the h-ledgers with the Black theta.
///   mechanical: mean[ Theta_B - (Delta_B F_eff dY/dh + nu_B dsigma/dh) / n_t ],
///               the exact derivative of the discrete estimator since T = n_t h.
///   printed:    -mean[ Delta_B F_eff dY/dh + nu_B dsigma/dh + Theta_B ] / n_t.
enum class ThetaAssembly { mechanical, printed };

/// All five pathwise mixing Greeks from one shared path batch. m.s0 is the
/// spot; the forward is m.forward().
GreekSet pathwise_greeks(const MarketSpec& m, const HestonParams& p, const SimConfig& cfg,
                         ThetaAssembly theta_form = ThetaAssembly::mechanical);

struct FdSteps {
    double forward_rel = 0.01;  // delta/gamma bump as a fraction of F0
    double v0 = 1e-4;
    double t = 1e-4;
    double r = 1e-5;
    double rho = 0.01;
    bool richardson = false;    // combine steps h and h/2
    double noise_tolerance = 1e-6;  // relative; larger quadrature noise marks a Greek unreliable
};

/// Central finite differences of the analytic Heston price.
GreekSet fd_greeks(const MarketSpec& m, const HestonParams& p, const FdSteps& steps = {});

/// Central difference of the analytic price in rho.
GreekValue fd_correlation_sensitivity(const MarketSpec& m, const HestonParams& p,
                                      double step = 0.01);

struct FlatVolEstimators {
    GreekSet pw;     // delta, rho
    GreekSet lr;     // delta, gamma, rho
    GreekSet lr_pw;  // gamma
    GreekSet pw_lr;  // gamma
};

/// Pathwise, likelihood-ratio and mixed estimators for a European call in a
/// constant-volatility Black-Scholes world, with S_T = S0 exp((r - sigma^2/2) T + sigma sqrt(T) Z).
FlatVolEstimators pw_lr_estimators(const MarketSpec& m, double sigma, const SimConfig& cfg);

struct CorrelationSensitivity {
    GreekValue total;
    GreekValue vega_part;   // -rho / (1 - rho^2) sigma_eff nu_B
    GreekValue delta_part;  // Delta_B F_eff dY/drho
};

/// dc/drho from the mixing representation, accumulating
/// dY/drho = -rho int v dt + int sqrt(v) dW along each path.
CorrelationSensitivity correlation_sensitivity(const MarketSpec& m, const HestonParams& p,
                                               const SimConfig& cfg);

}  // namespace hestonlab::greeks
