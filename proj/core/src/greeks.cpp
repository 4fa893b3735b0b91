#include "hestonlab/greeks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hestonlab/black.hpp"
#include "hestonlab/mc.hpp"
#include "hestonlab/parallel.hpp"

namespace hestonlab::greeks {

std::string to_string(GreekMethod m) {
    switch (m) {
        case GreekMethod::pathwise_mixing: return "pathwise-mixing";
        case GreekMethod::finite_difference: return "finite-difference";
        case GreekMethod::pw: return "pw";
        case GreekMethod::lr: return "lr";
        case GreekMethod::lr_pw: return "lr-pw";
        case GreekMethod::pw_lr: return "pw-lr";
    }
    return "unknown";
}

GreekMethod parse_method(const std::string& s) {
    for (auto m : {GreekMethod::pathwise_mixing, GreekMethod::finite_difference, GreekMethod::pw,
                   GreekMethod::lr, GreekMethod::lr_pw, GreekMethod::pw_lr})
        if (to_string(m) == s) return m;
    if (s == "pathwise") return GreekMethod::pathwise_mixing;
    if (s == "fd") return GreekMethod::finite_difference;
    throw std::invalid_argument("unknown Greek method '" + s + "'");
}

namespace {

GreekValue to_value(std::span<const double> xs) {
    const auto st = sample_stats(xs);
    return {st.mean, st.std_error, true};
}

// Black call sensitivities, including the sigma -> 0 limit.
analytic::BlackGreeks black_greeks_or_limit(double f, double k, double r, double t, double sigma) {
    if (sigma > 1e-14) return analytic::black76_greeks({f, k, r, t, sigma});
    const double disc = std::exp(-r * t);
    const double itm = f > k ? 1.0 : 0.0;
    analytic::BlackGreeks g;
    g.delta = disc * itm;
    g.theta = -disc * r * k * itm;
    g.rho = k * t * disc * itm;
    return g;
}

}  // namespace

GreekSet pathwise_greeks(const MarketSpec& m, const HestonParams& p, const SimConfig& cfg,
                         ThetaAssembly theta_form) {
    require_valid(m);
    require_valid(p);
    require_valid(cfg);
    if (m.style != OptionStyle::call)
        throw std::invalid_argument("pathwise Greeks are implemented for calls");

    const double f0 = m.forward();
    const double h = cfg.step(m.t);
    const double n_t = static_cast<double>(cfg.n_t);
    const double one_minus_rho2 = 1.0 - p.rho * p.rho;
    const double vega_scale = 2.0 * std::sqrt(p.v0);

    const auto n = static_cast<std::size_t>(cfg.n_p);
    std::vector<double> delta(n), gamma(n), vega(n), theta(n), rho(n);
    const mc::DerivativeFlags flags{true, true, false};

    parallel_for(cfg.n_p, [&](std::int64_t j) {
        RandomSource rng(cfg.seed, static_cast<std::uint64_t>(j));
        const auto path = mc::evolve_mixing_path(p, h, cfg.n_t, rng, flags);
        const double growth = std::exp(path.y_t);
        const double f_eff = f0 * growth;
        const double sigma = path.sigma_eff(p.rho, cfg.n_t);
        const auto bg = black_greeks_or_limit(f_eff, m.k, m.r, m.t, sigma);

        // dsigma/dx = (1 - rho^2) / (2 sigma n_t) * d(var_sum)/dx
        const double dsigma_scale = sigma > 1e-14 ? one_minus_rho2 / (2.0 * sigma * n_t) : 0.0;
        const double dsigma_dv0 = dsigma_scale * path.dsum_dv0;
        const double dsigma_dh = dsigma_scale * path.dsum_dh;

        const auto k = static_cast<std::size_t>(j);
        delta[k] = bg.delta * growth;
        gamma[k] = bg.gamma * growth * growth;
        vega[k] = vega_scale * (bg.delta * f_eff * path.dy_dv0 + bg.vega * dsigma_dv0);
        const double dc_dh_ledger = bg.delta * f_eff * path.dy_dh + bg.vega * dsigma_dh;
        theta[k] = theta_form == ThetaAssembly::mechanical
                       ? bg.theta - dc_dh_ledger / n_t
                       : -(dc_dh_ledger + bg.theta) / n_t;
        rho[k] = bg.rho;
    });

    GreekSet out;
    out.method = GreekMethod::pathwise_mixing;
    out.delta = to_value(delta);
    out.gamma = to_value(gamma);
    out.vega = to_value(vega);
    out.theta = to_value(theta);
    out.rho = to_value(rho);
    return out;
}

namespace {

struct Priced {
    double value;
    double error;
};

Priced price_at(const MarketSpec& m, const HestonParams& p) {
    const auto q = analytic::price(m, p);
    return {q.value, q.quadrature_error};
}

GreekValue judge(double value, double noise, double tolerance) {
    return {value, noise, noise <= tolerance * std::max(1.0, std::abs(value))};
}

struct Stencil {
    double first;   // central first difference
    double second;  // central second difference
    double noise1;
    double noise2;
};

template <class Fn>
Stencil central(Fn&& eval, double x, double step, bool need_second) {
    const auto up = eval(x + step);
    const auto dn = eval(x - step);
    Stencil s{};
    s.first = (up.value - dn.value) / (2.0 * step);
    s.noise1 = (up.error + dn.error) / (2.0 * step);
    if (need_second) {
        const auto mid = eval(x);
        s.second = (up.value - 2.0 * mid.value + dn.value) / (step * step);
        s.noise2 = (up.error + 2.0 * mid.error + dn.error) / (step * step);
    }
    return s;
}

template <class Fn>
Stencil central_maybe_richardson(Fn&& eval, double x, double step, bool need_second,
                                 bool richardson) {
    auto coarse = central(eval, x, step, need_second);
    if (!richardson) return coarse;
    auto fine = central(eval, x, 0.5 * step, need_second);
    Stencil s{};
    s.first = (4.0 * fine.first - coarse.first) / 3.0;
    s.second = (4.0 * fine.second - coarse.second) / 3.0;
    s.noise1 = (4.0 * fine.noise1 + coarse.noise1) / 3.0;
    s.noise2 = (4.0 * fine.noise2 + coarse.noise2) / 3.0;
    return s;
}

}  // namespace

GreekSet fd_greeks(const MarketSpec& m, const HestonParams& p, const FdSteps& steps) {
    require_valid(m);
    require_valid(p);
    const double f0 = m.forward();
    const double tol = steps.noise_tolerance;

    auto at_forward = [&](double f) {
        auto mm = MarketSpec::from_forward(f, m.k, m.r, m.t, m.style);
        return price_at(mm, p);
    };
    auto at_v0 = [&](double v0) {
        auto pp = p;
        pp.v0 = v0;
        return price_at(m, pp);
    };
    auto at_t = [&](double t) {
        auto mm = m;
        mm.t = t;
        return price_at(mm, p);
    };
    auto at_r = [&](double r) {
        auto mm = m;
        mm.r = r;
        return price_at(mm, p);
    };

    GreekSet out;
    out.method = GreekMethod::finite_difference;

    const double df = steps.forward_rel * f0;
    const auto fs = central_maybe_richardson(at_forward, f0, df, true, steps.richardson);
    out.delta = judge(fs.first, fs.noise1, tol);
    out.gamma = judge(fs.second, fs.noise2, tol);

    // dc/d sqrt(v0) = 2 sqrt(v0) dc/dv0; one-sided when v0 sits at the boundary.
    double dv = steps.v0;
    if (p.v0 - dv < 0.0) {
        const auto up = at_v0(p.v0 + dv);
        const auto mid = at_v0(p.v0);
        const double d = (up.value - mid.value) / dv;
        out.vega = judge(2.0 * std::sqrt(p.v0) * d,
                         2.0 * std::sqrt(p.v0) * (up.error + mid.error) / dv, tol);
    } else {
        const auto vs = central_maybe_richardson(at_v0, p.v0, dv, false, steps.richardson);
        out.vega = judge(2.0 * std::sqrt(p.v0) * vs.first, 2.0 * std::sqrt(p.v0) * vs.noise1, tol);
    }

    const auto ts = central_maybe_richardson(at_t, m.t, steps.t, false, steps.richardson);
    out.theta = judge(-ts.first, ts.noise1, tol);

    const auto rs = central_maybe_richardson(at_r, m.r, steps.r, false, steps.richardson);
    out.rho = judge(rs.first, rs.noise1, tol);
    return out;
}

GreekValue fd_correlation_sensitivity(const MarketSpec& m, const HestonParams& p, double step) {
    auto at_rho = [&](double rho) {
        auto pp = p;
        pp.rho = rho;
        return price_at(m, pp);
    };
    const auto s = central(at_rho, p.rho, step, false);
    return judge(s.first, s.noise1, 1e-6);
}

FlatVolEstimators pw_lr_estimators(const MarketSpec& m, double sigma, const SimConfig& cfg) {
    require_valid(m);
    require_valid(cfg);
    if (!(sigma > 0.0)) throw std::invalid_argument("flat-vol estimators need sigma > 0");

    const double t = m.t;
    const double sqrt_t = std::sqrt(t);
    const double sd = sigma * sqrt_t;
    const double disc = m.discount();
    const double drift = (m.r - 0.5 * sigma * sigma) * t;
    const double s0 = m.s0;

    const auto n = static_cast<std::size_t>(cfg.n_p);
    std::vector<double> pw_delta(n), pw_rho(n), lr_delta(n), lr_gamma(n), lr_rho(n),
        lr_pw_gamma(n), pw_lr_gamma(n);

    parallel_for(cfg.n_p, [&](std::int64_t j) {
        RandomSource rng(cfg.seed, static_cast<std::uint64_t>(j));
        const double z = rng.normal();  // d(S_T) == z by construction
        const double st = s0 * std::exp(drift + sd * z);
        const double in_money = st >= m.k ? 1.0 : 0.0;
        const double payoff = disc * std::max(st - m.k, 0.0);
        const auto k = static_cast<std::size_t>(j);

        pw_delta[k] = disc * in_money * st / s0;
        pw_rho[k] = disc * in_money * m.k * t;
        lr_delta[k] = payoff * z / (s0 * sd);
        lr_gamma[k] = payoff * (z * z - z * sd - 1.0) / (s0 * s0 * sd * sd);
        lr_rho[k] = payoff * (-t + z * sqrt_t / sigma);
        lr_pw_gamma[k] = disc * in_money * m.k * z / (s0 * s0 * sd);
        pw_lr_gamma[k] = disc * in_money * (st / (s0 * s0)) * (z / sd - 1.0);
    });

    FlatVolEstimators out;
    out.pw.method = GreekMethod::pw;
    out.pw.delta = to_value(pw_delta);
    out.pw.rho = to_value(pw_rho);
    out.lr.method = GreekMethod::lr;
    out.lr.delta = to_value(lr_delta);
    out.lr.gamma = to_value(lr_gamma);
    out.lr.rho = to_value(lr_rho);
    out.lr_pw.method = GreekMethod::lr_pw;
    out.lr_pw.gamma = to_value(lr_pw_gamma);
    out.pw_lr.method = GreekMethod::pw_lr;
    out.pw_lr.gamma = to_value(pw_lr_gamma);
    return out;
}

CorrelationSensitivity correlation_sensitivity(const MarketSpec& m, const HestonParams& p,
                                               const SimConfig& cfg) {
    require_valid(m);
    require_valid(p);
    require_valid(cfg);
    if (std::abs(p.rho) > 1.0 - 1e-9)
        throw std::invalid_argument("correlation sensitivity is singular as |rho| -> 1");
    if (m.style != OptionStyle::call)
        throw std::invalid_argument("correlation sensitivity is implemented for calls");

    const double f0 = m.forward();
    const double h = cfg.step(m.t);
    const double prefactor = -p.rho / (1.0 - p.rho * p.rho);
    const auto n = static_cast<std::size_t>(cfg.n_p);
    std::vector<double> total(n), vega_part(n), delta_part(n);
    const mc::DerivativeFlags flags{false, false, true};

    parallel_for(cfg.n_p, [&](std::int64_t j) {
        RandomSource rng(cfg.seed, static_cast<std::uint64_t>(j));
        const auto path = mc::evolve_mixing_path(p, h, cfg.n_t, rng, flags);
        const double f_eff = f0 * std::exp(path.y_t);
        const double sigma = path.sigma_eff(p.rho, cfg.n_t);
        const auto bg = black_greeks_or_limit(f_eff, m.k, m.r, m.t, sigma);
        const auto k = static_cast<std::size_t>(j);
        vega_part[k] = prefactor * sigma * bg.vega;
        delta_part[k] = bg.delta * f_eff * path.dy_drho;
        total[k] = vega_part[k] + delta_part[k];
    });

    return {to_value(total), to_value(vega_part), to_value(delta_part)};
}

}  // namespace hestonlab::greeks
