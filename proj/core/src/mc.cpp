#include "hestonlab/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hestonlab/analytic.hpp"
#include "hestonlab/parallel.hpp"

namespace hestonlab::mc {

double MixingPath::sigma_eff(double rho, std::int64_t n_t) const {
    return std::sqrt((1.0 - rho * rho) * var_sum / static_cast<double>(n_t));
}

MixingPath evolve_mixing_path(const HestonParams& p, double h, std::int64_t n_t,
                              RandomSource& rng, const DerivativeFlags& flags,
                              const MixingRecorder* rec) {
    const double sqrt_h = std::sqrt(h);
    const double rho2 = p.rho * p.rho;

    MixingPath out;
    double v = p.v0;
    double y = 0.0;
    double dv_v0 = 1.0, dy_v0 = 0.0;
    double dv_h = 0.0, dy_h = 0.0;

    auto record = [&](std::int64_t i) {
        if (!rec) return;
        const auto k = static_cast<std::size_t>(i);
        if (!rec->v.empty()) rec->v[k] = v;
        if (!rec->y.empty()) rec->y[k] = y;
        if (!rec->dv_dv0.empty()) rec->dv_dv0[k] = dv_v0;
        if (!rec->dy_dv0.empty()) rec->dy_dv0[k] = dy_v0;
        if (!rec->dv_dh.empty()) rec->dv_dh[k] = dv_h;
        if (!rec->dy_dh.empty()) rec->dy_dh[k] = dy_h;
    };
    record(0);

    for (std::int64_t i = 0; i < n_t; ++i) {
        const double z = sqrt_h * rng.normal();
        const bool positive = v > 0.0;
        const double vp = positive ? v : 0.0;
        const double sv = std::sqrt(vp);
        out.var_sum += vp;

        // Ledgers first: they differentiate the step below at the current v.
        if (flags.wrt_v0) {
            if (positive) {
                out.dsum_dv0 += dv_v0;
                const double half_z_over_sv = 0.5 * z / sv;
                dy_v0 += (-0.5 * rho2 * h + p.rho * half_z_over_sv) * dv_v0;
                dv_v0 *= 1.0 - p.lam * h + p.eta * half_z_over_sv;
            }
        }
        if (flags.wrt_h) {
            if (positive) {
                out.dsum_dh += dv_h;
                const double half_z_over_sv = 0.5 * z / sv;
                const double chain = v / h + dv_h;
                dy_h += -0.5 * rho2 * (v + h * dv_h) + p.rho * half_z_over_sv * chain;
                dv_h = (1.0 - p.lam * h) * dv_h - p.lam * (v - p.vbar) +
                       p.eta * half_z_over_sv * chain;
            } else {
                dv_h += p.lam * p.vbar;
            }
        }
        if (flags.wrt_rho) out.dy_drho += -p.rho * vp * h + sv * z;
        if (!positive) out.truncated = true;

        y += -0.5 * rho2 * vp * h + p.rho * sv * z;
        v += -p.lam * (vp - p.vbar) * h + p.eta * sv * z;
        record(i + 1);
    }

    out.y_t = y;
    out.dy_dv0 = dy_v0;
    out.dy_dh = dy_h;
    return out;
}

double evolve_crude_path(double s0, double r, const HestonParams& p, double h, std::int64_t n_t,
                         RandomSource& rng, const CrudeRecorder* rec) {
    const double sqrt_h = std::sqrt(h);
    const double rho_bar = std::sqrt(1.0 - p.rho * p.rho);
    double s = s0;
    double v = p.v0;
    if (rec) {
        if (!rec->s.empty()) rec->s[0] = s;
        if (!rec->v.empty()) rec->v[0] = v;
    }
    for (std::int64_t i = 0; i < n_t; ++i) {
        const double z1 = sqrt_h * rng.normal();
        const double z2 = sqrt_h * rng.normal();
        const double vp = std::max(v, 0.0);
        const double sv = std::sqrt(vp);
        const double s_next = s + r * s * h + sv * s * z1;
        v += -p.lam * (vp - p.vbar) * h + p.eta * sv * (p.rho * z1 + rho_bar * z2);
        s = s_next;
        if (rec) {
            const auto k = static_cast<std::size_t>(i + 1);
            if (!rec->s.empty()) rec->s[k] = s;
            if (!rec->v.empty()) rec->v[k] = v;
        }
    }
    return s;
}

namespace {

void check_inputs(const MarketSpec& m, const HestonParams& p, const SimConfig& cfg) {
    require_valid(m);
    require_valid(p);
    require_valid(cfg);
}

}  // namespace

PathBatch simulate_crude(const MarketSpec& m, const HestonParams& p, const SimConfig& cfg) {
    check_inputs(m, p, cfg);
    if (cfg.scheme != Scheme::crude) throw std::invalid_argument("simulate_crude needs scheme=crude");
    PathBatch b;
    b.scheme = Scheme::crude;
    b.h = cfg.step(m.t);
    b.n_p = cfg.n_p;
    b.n_t = cfg.n_t;
    const auto cells = static_cast<std::size_t>(cfg.n_p * (cfg.n_t + 1));
    b.v.assign(cells, 0.0);
    b.s.assign(cells, 0.0);
    const auto width = static_cast<std::size_t>(cfg.n_t + 1);
    parallel_for(cfg.n_p, [&](std::int64_t j) {
        RandomSource rng(cfg.seed, static_cast<std::uint64_t>(j));
        CrudeRecorder rec{std::span<double>(b.v).subspan(b.index(j, 0), width),
                          std::span<double>(b.s).subspan(b.index(j, 0), width)};
        evolve_crude_path(m.s0, m.r, p, b.h, cfg.n_t, rng, &rec);
    });
    return b;
}

PathBatch simulate_mixing(const MarketSpec& m, const HestonParams& p, const SimConfig& cfg,
                          const DerivativeFlags& with_derivatives) {
    check_inputs(m, p, cfg);
    if (cfg.scheme != Scheme::mixing)
        throw std::invalid_argument("simulate_mixing needs scheme=mixing");
    PathBatch b;
    b.scheme = Scheme::mixing;
    b.h = cfg.step(m.t);
    b.n_p = cfg.n_p;
    b.n_t = cfg.n_t;
    const auto cells = static_cast<std::size_t>(cfg.n_p * (cfg.n_t + 1));
    b.v.assign(cells, 0.0);
    b.y.assign(cells, 0.0);
    if (with_derivatives.wrt_v0) {
        b.dv_dv0.assign(cells, 0.0);
        b.dy_dv0.assign(cells, 0.0);
    }
    if (with_derivatives.wrt_h) {
        b.dv_dh.assign(cells, 0.0);
        b.dy_dh.assign(cells, 0.0);
    }
    const auto width = static_cast<std::size_t>(cfg.n_t + 1);
    auto slice = [&](std::vector<double>& m_, std::int64_t j) {
        return m_.empty() ? std::span<double>{}
                          : std::span<double>(m_).subspan(b.index(j, 0), width);
    };
    parallel_for(cfg.n_p, [&](std::int64_t j) {
        RandomSource rng(cfg.seed, static_cast<std::uint64_t>(j));
        MixingRecorder rec{slice(b.v, j),      slice(b.y, j),     slice(b.dv_dv0, j),
                           slice(b.dy_dv0, j), slice(b.dv_dh, j), slice(b.dy_dh, j)};
        evolve_mixing_path(p, b.h, cfg.n_t, rng, with_derivatives, &rec);
    });
    return b;
}

McEstimate price_crude_mc(const MarketSpec& m, const HestonParams& p, const SimConfig& cfg) {
    check_inputs(m, p, cfg);
    const double h = cfg.step(m.t);
    const double disc = m.discount();
    std::vector<double> payoff(static_cast<std::size_t>(cfg.n_p));
    parallel_for(cfg.n_p, [&](std::int64_t j) {
        RandomSource rng(cfg.seed, static_cast<std::uint64_t>(j));
        const double st = evolve_crude_path(m.s0, m.r, p, h, cfg.n_t, rng);
        const double intrinsic = m.style == OptionStyle::call ? st - m.k : m.k - st;
        payoff[static_cast<std::size_t>(j)] = disc * std::max(intrinsic, 0.0);
    });
    const auto st = sample_stats(payoff);
    return {st.mean, st.std_error, cfg.n_p};
}

McEstimate price_mixing_mc(const MarketSpec& m, const HestonParams& p, const SimConfig& cfg) {
    check_inputs(m, p, cfg);
    const double h = cfg.step(m.t);
    std::vector<double> value(static_cast<std::size_t>(cfg.n_p));
    parallel_for(cfg.n_p, [&](std::int64_t j) {
        RandomSource rng(cfg.seed, static_cast<std::uint64_t>(j));
        const auto path = evolve_mixing_path(p, h, cfg.n_t, rng);
        const double s_eff = m.s0 * std::exp(path.y_t);
        value[static_cast<std::size_t>(j)] = analytic::black_scholes(
            s_eff, m.k, m.r, m.t, path.sigma_eff(p.rho, cfg.n_t), m.style);
    });
    const auto st = sample_stats(value);
    return {st.mean, st.std_error, cfg.n_p};
}

McEstimate price_mc(const MarketSpec& m, const HestonParams& p, const SimConfig& cfg) {
    return cfg.scheme == Scheme::crude ? price_crude_mc(m, p, cfg) : price_mixing_mc(m, p, cfg);
}

std::uint64_t replication_seed(std::uint64_t seed, int rep, std::int64_t n_p) {
    return splitmix64(splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(rep) << 32 ^
                                                    static_cast<std::uint64_t>(n_p)));
}

std::vector<ConvergenceRow> convergence_study(const MarketSpec& m, const HestonParams& p,
                                              std::span<const std::int64_t> n_p_list,
                                              int replications, std::int64_t n_t,
                                              std::uint64_t seed) {
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
    const double reference = analytic::price(m, p).value;
    std::vector<ConvergenceRow> rows;
    rows.reserve(n_p_list.size());
    for (const auto n_p : n_p_list) {
        std::vector<double> err_crude, err_mixing;
        for (int rep = 0; rep < replications; ++rep) {
            SimConfig cfg{n_t, n_p, replication_seed(seed, rep, n_p), Scheme::crude};
            err_crude.push_back(std::abs(price_crude_mc(m, p, cfg).value - reference));
            cfg.scheme = Scheme::mixing;
            err_mixing.push_back(std::abs(price_mixing_mc(m, p, cfg).value - reference));
        }
        rows.push_back({n_p, sample_stats(err_crude).mean, sample_stats(err_mixing).mean});
    }
    return rows;
}

}  // namespace hestonlab::mc
