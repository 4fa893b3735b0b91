#include "hestonlab/implied_vol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "hestonlab/black.hpp"

namespace hestonlab::iv {

namespace {

std::string describe(double price, double lo, double hi) {
    std::ostringstream os;
    os.precision(12);
    os << "premium " << price << " outside the invertible band (" << lo << ", " << hi << ")";
    return os.str();
}

}  // namespace

double implied_vol(double price, double f, double k, double r, double t, OptionStyle style) {
    if (!(f > 0.0 && k > 0.0 && t > 0.0))
        throw std::invalid_argument("implied_vol requires f > 0, k > 0, t > 0");
    const double disc = std::exp(-r * t);
    const double intrinsic =
        disc * std::max(style == OptionStyle::call ? f - k : k - f, 0.0);
    const double cap = disc * (style == OptionStyle::call ? f : k);

    if (!(price > intrinsic))
        throw OutOfBandError(describe(price, intrinsic, cap), BandSide::below, intrinsic, cap);
    if (!(price < cap))
        throw OutOfBandError(describe(price, intrinsic, cap), BandSide::above, intrinsic, cap);

    auto objective = [&](double sigma) {
        return analytic::black76(f, k, r, t, sigma, style) - price;
    };
    const double g_lo = objective(kMinVol);
    const double g_hi = objective(kMaxVol);
    if (g_lo > 0.0)
        throw OutOfBandError(describe(price, price + g_lo, cap) + "; implied vol below bracket",
                             BandSide::below, intrinsic, cap);
    if (g_hi < 0.0)
        throw OutOfBandError(describe(price, intrinsic, cap) + "; implied vol above bracket",
                             BandSide::above, intrinsic, cap);
    if (g_lo == 0.0) return kMinVol;
    if (g_hi == 0.0) return kMaxVol;

    std::uintmax_t max_iter = 200;
    const auto tol = boost::math::tools::eps_tolerance<double>(52);
    const auto [a, b] =
        boost::math::tools::toms748_solve(objective, kMinVol, kMaxVol, g_lo, g_hi, tol, max_iter);
    // Pick the bracket end with the smaller residual.
    return std::abs(objective(a)) <= std::abs(objective(b)) ? a : b;
}

double model_iv(const HestonParams& p, const MarketSpec& tmpl, double k) {
    MarketSpec m = tmpl;
    m.k = k;
    const double f0 = m.forward();
    m.style = k >= f0 ? OptionStyle::call : OptionStyle::put;
    const double premium = analytic::price(m, p).value;
    try {
        return implied_vol(premium, f0, k, m.r, m.t, m.style);
    } catch (const OutOfBandError& e) {
        std::ostringstream os;
        os.precision(10);
        os << "strike " << k << ": " << e.what();
        throw OutOfBandError(os.str(), e.side(), e.lower(), e.upper(), k);
    }
}

SmileCurve smile(const HestonParams& p, const MarketSpec& m, std::span<const double> strikes) {
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        if (!(strikes[i] > 0.0)) throw std::invalid_argument("smile strikes must be positive");
        if (i > 0 && !(strikes[i] > strikes[i - 1]))
            throw std::invalid_argument("smile strikes must be strictly ascending");
    }
    SmileCurve c;
    c.params = p;
    c.f0 = m.forward();
    c.strikes.assign(strikes.begin(), strikes.end());
    c.ivs.reserve(strikes.size());
    for (double k : strikes) c.ivs.push_back(model_iv(p, m, k));
    return c;
}

std::string to_string(SweepParam s) {
    switch (s) {
        case SweepParam::rho: return "rho";
        case SweepParam::eta: return "eta";
        case SweepParam::lam: return "lam";
        case SweepParam::v0: return "v0";
        case SweepParam::vbar: return "vbar";
    }
    return "unknown";
}

SweepParam parse_sweep_param(const std::string& s) {
    for (auto p : {SweepParam::rho, SweepParam::eta, SweepParam::lam, SweepParam::v0,
                   SweepParam::vbar})
        if (to_string(p) == s) return p;
    throw std::invalid_argument("unknown sweep parameter '" + s +
                                "' (expected rho|eta|lam|v0|vbar)");
}

HestonParams with_param(HestonParams base, SweepParam which, double value) {
    switch (which) {
        case SweepParam::rho: base.rho = value; break;
        case SweepParam::eta: base.eta = value; break;
        case SweepParam::lam: base.lam = value; break;
        case SweepParam::v0: base.v0 = value; break;
        case SweepParam::vbar: base.vbar = value; break;
    }
    return base;
}

SmileDiagnostics diagnose(const SmileCurve& curve, const MarketSpec& m, double param_value) {
    if (curve.strikes.size() < 3) throw std::invalid_argument("diagnostics need >= 3 strikes");
    SmileDiagnostics d;
    d.param_value = param_value;
    const auto& p = curve.params;
    d.level = model_iv(p, m, curve.f0);

    const auto it = std::min_element(curve.ivs.begin(), curve.ivs.end());
    const auto idx = static_cast<std::size_t>(it - curve.ivs.begin());
    const double lo = curve.strikes[idx == 0 ? 0 : idx - 1];
    const double hi = curve.strikes[std::min(idx + 1, curve.strikes.size() - 1)];
    if (idx == 0 || idx + 1 == curve.strikes.size()) {
        d.argmin_strike = curve.strikes[idx];
        d.min_iv = *it;
    } else {
        std::uintmax_t max_iter = 100;
        auto f = [&](double k) { return model_iv(p, m, k); };
        const auto [k_star, iv_star] = boost::math::tools::brent_find_minima(f, lo, hi, 40, max_iter);
        d.argmin_strike = k_star;
        d.min_iv = iv_star;
    }

    const double step = 0.05 * curve.f0;
    if (!(d.argmin_strike > step))
        throw std::invalid_argument("curvature stencil extends below zero strike");
    d.curvature = (model_iv(p, m, d.argmin_strike + step) - 2.0 * d.min_iv +
                   model_iv(p, m, d.argmin_strike - step)) /
                  (step * step);
    const double diff = curve.ivs.back() - curve.ivs.front();
    d.skew = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
    return d;
}

SweepResult parameter_sweep(SweepParam which, std::span<const double> values,
                            const HestonParams& base, const MarketSpec& m,
                            std::span<const double> strikes) {
    SweepResult res;
    res.which = which;
    for (double v : values) {
        const auto p = with_param(base, which, v);
        require_valid(p);
        auto curve = smile(p, m, strikes);
        res.diagnostics.push_back(diagnose(curve, m, v));
        res.curves.push_back(std::move(curve));
    }
    return res;
}

std::vector<double> strike_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("bad strike grid");
    std::vector<double> ks;
    const auto n = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::int64_t i = 0; i <= n; ++i) ks.push_back(lo + static_cast<double>(i) * step);
    return ks;
}

}  // namespace hestonlab::iv
