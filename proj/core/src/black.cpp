#include "hestonlab/black.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hestonlab::analytic {

double norm_pdf(double x) {
    constexpr double inv_sqrt_2pi = 0.3989422804014326779399461;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double black_scholes_call(double s, double k, double r, double t, double sigma) {
    const double disc_k = k * std::exp(-r * t);
    if (k <= 0.0) return s;
    const double sd = sigma * std::sqrt(t);
    if (sd <= 0.0) return std::max(s - disc_k, 0.0);
    const double d_plus = (std::log(s / k) + (r + 0.5 * sigma * sigma) * t) / sd;
    const double d_minus = d_plus - sd;
    return s * norm_cdf(d_plus) - disc_k * norm_cdf(d_minus);
}

double black_scholes_put(double s, double k, double r, double t, double sigma) {
    const double disc_k = k * std::exp(-r * t);
    if (k <= 0.0) return 0.0;
    const double sd = sigma * std::sqrt(t);
    if (sd <= 0.0) return std::max(disc_k - s, 0.0);
    const double d_plus = (std::log(s / k) + (r + 0.5 * sigma * sigma) * t) / sd;
    const double d_minus = d_plus - sd;
    return disc_k * norm_cdf(-d_minus) - s * norm_cdf(-d_plus);
}

double black_scholes(double s, double k, double r, double t, double sigma, OptionStyle style) {
    return style == OptionStyle::call ? black_scholes_call(s, k, r, t, sigma)
                                      : black_scholes_put(s, k, r, t, sigma);
}

double black76(double f, double k, double r, double t, double sigma, OptionStyle style) {
    return black_scholes(f * std::exp(-r * t), k, r, t, sigma, style);
}

BlackGreeks black76_greeks(const BlackInputs& in) {
    const double sqrt_t = std::sqrt(in.t);
    const double sd = in.sigma * sqrt_t;
    const double disc = std::exp(-in.r * in.t);
    const double d_plus = (std::log(in.f / in.k) + 0.5 * sd * sd) / sd;
    const double d_minus = d_plus - sd;
    const double pdf = norm_pdf(d_plus);
    const double cdf_plus = norm_cdf(d_plus);
    const double cdf_minus = norm_cdf(d_minus);

    BlackGreeks g;
    g.delta = disc * cdf_plus;
    g.gamma = disc * pdf / (in.f * sd);
    g.vega = in.f * disc * pdf * sqrt_t;
    g.theta = -disc * (in.f * pdf * in.sigma / (2.0 * sqrt_t) + in.r * in.k * cdf_minus);
    g.rho = in.k * in.t * disc * cdf_minus;
    return g;
}

}  // namespace hestonlab::analytic
