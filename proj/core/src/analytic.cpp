#include "hestonlab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace hestonlab::analytic {

namespace {

using cplx = std::complex<double>;

// exp(z) - 1 without cancellation near z = 0.
cplx expm1c(cplx z) {
    if (std::abs(z) > 0.5) return std::exp(z) - 1.0;
    const cplx e = std::exp(z);
    if (e == 1.0) return z;
    const cplx em1 = e - 1.0;
    return em1 * z / std::log(e);
}

// log(1 + w) without cancellation near w = 0.
cplx log1pc(cplx w) {
    const cplx u = 1.0 + w;
    if (u == 1.0) return w;
    return std::log(u) * w / (u - 1.0);
}

}  // namespace

CfCoefficients cf_coefficients(cplx u, double tau, const HestonParams& p, int j) {
    if (j != 0 && j != 1) throw std::invalid_argument("parity index j must be 0 or 1");
    if (!(tau >= 0.0)) throw std::invalid_argument("tau must be >= 0");
    if (p.eta == 0.0)
        throw std::invalid_argument(
            "eta == 0 has no Riccati form; use the deterministic-variance pricer");
    if (tau == 0.0) return {cplx{0.0, 0.0}, cplx{0.0, 0.0}};

    const cplx i{0.0, 1.0};
    const double eta2 = p.eta * p.eta;
    const double jd = static_cast<double>(j);
    const cplx alpha = -0.5 * u * u - 0.5 * i * u + i * jd * u;
    const cplx beta = p.lam - p.rho * p.eta * jd - p.rho * p.eta * i * u;
    const double gamma = 0.5 * eta2;
    const cplx d = std::sqrt(beta * beta - 4.0 * alpha * gamma);

    // beta - d, i.e. eta^2 r_-. Uses r_+ r_- = 2 alpha / eta^2 when beta + d
    // is the better-conditioned sum.
    const cplx beta_plus_d = beta + d;
    const cplx beta_minus_d = std::abs(beta_plus_d) >= std::abs(beta - d)
                                  ? 2.0 * alpha * eta2 / beta_plus_d
                                  : beta - d;

    const cplx dtau = d * tau;
    const cplx em1 = expm1c(-dtau);  // e^{-d tau} - 1
    const cplx one_minus_e = -em1;
    const cplx e = 1.0 + em1;

    // (1 - e^{-d tau}) / d, with its dtau -> 0 limit.
    const cplx q = std::abs(dtau) < 1e-10 ? tau * (1.0 - 0.5 * dtau) : one_minus_e / d;

    // D = r_- (1 - e) / (1 - g e) rewritten as 2 alpha q / (beta q + 1 + e).
    const cplx dcoef = 2.0 * alpha * q / (beta * q + 1.0 + e);

    // (1 - g e) / (1 - g) = 1 + (beta - d) q / 2.
    const cplx log_term = log1pc(0.5 * beta_minus_d * q);
    const cplx ccoef = (p.lam / eta2) * (beta_minus_d * tau - 2.0 * log_term);
    return {ccoef, dcoef};
}

double prob_integrand(double u, double x, double v0, double tau, const HestonParams& p, int j) {
    const auto cf = cf_coefficients(cplx{u, 0.0}, tau, p, j);
    const cplx expo = cf.c * p.vbar + cf.d * v0 + cplx{0.0, u * x};
    return (std::exp(expo) / cplx{0.0, u}).real();
}

ProbResult heston_prob(double x, double v0, double tau, const HestonParams& p, int j,
                       OptionStyle style, const QuadratureOptions& opts) {
    if (!(tau > 0.0)) throw std::invalid_argument("heston_prob requires tau > 0");
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double u) { return prob_integrand(u, x, v0, tau, p, j); };

    double err = 0.0;
    double integral =
        gauss_kronrod<double, 31>::integrate(f, opts.u_min, opts.u_max_initial, opts.max_depth,
                                             opts.relative_tolerance, &err);
    // [0, u_min]: the integrand is continuous at 0+, so a rectangle suffices.
    integral += opts.u_min * f(opts.u_min);
    double total_err = err;

    double lo = opts.u_max_initial;
    while (true) {
        const double hi = 2.0 * lo;
        double chunk_err = 0.0;
        const double chunk = gauss_kronrod<double, 31>::integrate(
            f, lo, hi, opts.max_depth, opts.relative_tolerance, &chunk_err);
        integral += chunk;
        total_err += chunk_err;
        lo = hi;
        if (std::abs(chunk) < opts.tail_tolerance) break;
        if (lo >= opts.u_max_limit) {
            throw QuadratureError("Fourier integral tail did not decay before u = " +
                                      std::to_string(lo),
                                  std::abs(chunk) / std::numbers::pi);
        }
    }

    ProbResult res;
    res.u_max = lo;
    res.error = total_err / std::numbers::pi;
    const double base = style == OptionStyle::call ? 0.5 : -0.5;
    res.value = base + integral / std::numbers::pi;
    if (!std::isfinite(res.value) || res.error > opts.max_error) {
        throw QuadratureError("Fourier integral did not converge (error bound " +
                                  std::to_string(res.error) + ")",
                              res.error);
    }
    return res;
}

PriceQuote price(const MarketSpec& m, const HestonParams& p, const QuadratureOptions& opts) {
    require_valid(m);
    require_valid(p);
    if (m.k == 0.0)
        throw std::invalid_argument(
            "zero strike is not priceable: x = ln(S e^{rT}/K) is undefined at K = 0; "
            "use a small positive strike such as 0.001");
    if (p.eta == 0.0) return price_deterministic_vol(m, p);

    const double x = std::log(m.s0 * std::exp(m.r * m.t) / m.k);
    const auto p0 = heston_prob(x, p.v0, m.t, p, 0, m.style, opts);
    const auto p1 = heston_prob(x, p.v0, m.t, p, 1, m.style, opts);
    const double disc_k = m.k * std::exp(-m.r * m.t);

    PriceQuote q;
    q.p0 = p0.value;
    q.p1 = p1.value;
    q.value = std::max(0.0, m.s0 * p1.value - disc_k * p0.value);
    q.quadrature_error = m.s0 * p1.error + disc_k * p0.error;
    return q;
}

double equivalent_vol(const HestonParams& p, double t) {
    const double lt = p.lam * t;
    const double weight = std::abs(lt) < 1e-8 ? 1.0 - 0.5 * lt : -std::expm1(-lt) / lt;
    return std::sqrt(std::max(0.0, p.vbar + weight * (p.v0 - p.vbar)));
}

PriceQuote price_deterministic_vol(const MarketSpec& m, const HestonParams& p) {
    require_valid(m);
    require_valid(p);
    if (p.eta != 0.0)
        throw std::invalid_argument("price_deterministic_vol requires eta == 0");
    const double sigma = equivalent_vol(p, m.t);

    PriceQuote q;
    q.value = black_scholes(m.s0, m.k, m.r, m.t, sigma, m.style);
    const double sd = sigma * std::sqrt(m.t);
    if (m.k > 0.0 && sd > 0.0) {
        const double d_plus = (std::log(m.s0 / m.k) + (m.r + 0.5 * sigma * sigma) * m.t) / sd;
        q.p1 = norm_cdf(d_plus);
        q.p0 = norm_cdf(d_plus - sd);
    } else {
        const bool itm = m.k <= 0.0 || m.s0 * std::exp(m.r * m.t) > m.k;
        q.p0 = q.p1 = itm ? 1.0 : 0.0;
    }
    if (m.style == OptionStyle::put) {
        q.p0 -= 1.0;
        q.p1 -= 1.0;
    }
    return q;
}

}  // namespace hestonlab::analytic
