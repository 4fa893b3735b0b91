// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "hestonlab/analytic.hpp"
#include "hestonlab/black.hpp"
#include "hestonlab/calibration.hpp"
#include "hestonlab/greeks.hpp"
#include "hestonlab/implied_vol.hpp"
#include "hestonlab/mc.hpp"
#include "hestonlab/parallel.hpp"

using namespace hestonlab;

namespace {

const HestonParams kRef{0.04, 0.04, 1.2, 0.3, -0.5};

struct Outcome {
    bool ok = true;
    std::string detail;

    void check(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(const char* f, auto... xs) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, xs...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli_run(std::vector<std::string> args) {
    args.insert(args.begin(), "hestonlab");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    set_thread_count(0);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<double>> csv_body(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

Outcome headline_price() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const double c = analytic::price(MarketSpec{}, kRef).value;
    const double dt = seconds_since(t0);
    o.check(std::abs(c - 10.3009) < 1e-3, fmt("call %.6f", c));
    o.check(dt < 0.1, fmt("runtime %.3fs", dt));
    if (o.ok) o.detail = fmt("call %.6f in %.4fs", c, dt);
    return o;
}

Outcome parity_triple() {
    Outcome o;
    MarketSpec m;
    const double c = analytic::price(m, kRef).value;
    m.style = OptionStyle::put;
    const double p = analytic::price(m, kRef).value;
    const double fwd_gap = 100 - 100 * std::exp(-0.05);
    o.check(std::abs(p - 5.4238) < 1e-3, fmt("put %.6f", p));
    o.check(std::abs(c - p - 4.8770) < 1e-4, fmt("c-p %.8f", c - p));
    o.check(std::abs(c - p - fwd_gap) < 1e-6, fmt("parity gap %.2e", c - p - fwd_gap));
    if (o.ok) o.detail = fmt("put %.6f, c-p %.8f, S0-Ke^-rT %.8f", p, c - p, fwd_gap);
    return o;
}

Outcome zero_strike() {
    Outcome o;
    MarketSpec m;
    m.k = 0.001;
    const double c = analytic::price(m, kRef).value;
    o.check(std::abs(c - 99.9990) < 1e-3, fmt("call %.6f", c));
    if (o.ok) o.detail = fmt("call %.6f", c);
    return o;
}

Outcome deterministic_variance() {
    Outcome o;
    double worst_gap = 0.0, worst_z = 0.0;
    for (double s0 = 80; s0 <= 120; s0 += 10)
        for (double v0 : {0.1, 0.15, 0.2, 0.25, 0.3}) {
            HestonParams p = kRef;
            p.v0 = v0;
            p.eta = 0.0;
            const MarketSpec m{s0, 100, 0.05, 1};
            const double closed = analytic::price_deterministic_vol(m, p).value;
            HestonParams tiny = p;
            tiny.eta = 1e-8;
            const double fourier = analytic::price(m, tiny).value;
            worst_gap = std::max(worst_gap, std::abs(fourier - closed));

            const auto mc = mc::price_mixing_mc(m, p, SimConfig{1000, 10000, 7, Scheme::mixing});
            const double z = std::abs(mc.value - closed) / mc.std_error;
            worst_z = std::max(worst_z, z);
            o.check(z < 3.0, fmt("S0=%g v0=%g z=%.2f", s0, v0, z));
        }
    o.check(worst_gap < 1e-6, fmt("fourier gap %.2e", worst_gap));
    if (o.ok) o.detail = fmt("max |fourier-closed| %.2e, max |z| %.2f", worst_gap, worst_z);
    return o;
}

Outcome convergence() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = cli_run({"convergence", "--reps", "50", "--np", "100,1000,10000", "--nt", "1000"});
    if (r.code != 0) {
        o.check(false, "cli exit " + std::to_string(r.code) + ": " + r.err);
        return o;
    }
    const auto rows = csv_body(r.out);
    o.check(rows.size() == 3, "expected 3 rows");
    if (!o.ok) return o;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        o.check(rows[i][2] < rows[i][1], fmt("row %zu mixing %.4g >= crude %.4g", i, rows[i][2], rows[i][1]));
        if (i > 0) {
            o.check(rows[i][1] < rows[i - 1][1], fmt("crude not decreasing at row %zu", i));
            o.check(rows[i][2] < rows[i - 1][2], fmt("mixing not decreasing at row %zu", i));
        }
    }
    if (o.ok)
        o.detail = fmt("crude %.4f/%.4f/%.4f mixing %.4f/%.4f/%.4f (%.0fs)", rows[0][1], rows[1][1],
                       rows[2][1], rows[0][2], rows[1][2], rows[2][2], seconds_since(t0));
    return o;
}

Outcome greeks_oracle() {
    Outcome o;
    const SimConfig cfg{250, 100000, 7, Scheme::mixing};
    const double f_base = MarketSpec{}.forward();
    struct Point {
        double f0, v0;
    };
    std::vector<Point> grid;
    for (double f0 : {80.0, 90.0, 100.0, 110.0, 120.0}) grid.push_back({f0, 0.04});
    for (double v0 : {0.1, 0.15, 0.2, 0.25, 0.3}) grid.push_back({f_base, v0});

    double worst = 0.0;
    auto cmp = [&](const char* name, const Point& pt, const greeks::GreekValue& mc, double fd, double rel) {
        const double tol = std::max(3 * mc.std_error, rel * std::abs(fd));
        const double gap = std::abs(mc.value - fd);
        worst = std::max(worst, gap / tol);
        o.check(gap <= tol, fmt("%s F0=%g v0=%g: %.6g vs %.6g", name, pt.f0, pt.v0, mc.value, fd));
    };
    for (const auto& pt : grid) {
        HestonParams p = kRef;
        p.v0 = pt.v0;
        const auto m = MarketSpec::from_forward(pt.f0, 100, 0.05, 1);
        const auto pw = greeks::pathwise_greeks(m, p, cfg);
        const auto fd = greeks::fd_greeks(m, p);
        cmp("delta", pt, *pw.delta, fd.delta->value, 0.01);
        cmp("gamma", pt, *pw.gamma, fd.gamma->value, 0.01);
        cmp("vega", pt, *pw.vega, fd.vega->value, 0.01);
        cmp("theta", pt, *pw.theta, fd.theta->value, 0.01);
        cmp("rho", pt, *pw.rho, fd.rho->value, 0.01);
        const auto cs = greeks::correlation_sensitivity(m, p, cfg);
        cmp("correlation", pt, cs.total, greeks::fd_correlation_sensitivity(m, p).value, 0.02);
    }

    // eta = 0, rho = 0, v0 = vbar: the mixing estimator collapses to Black.
    double degen_gap = 0.0;
    for (double lam : {0.0, 1.2}) {
        const HestonParams flat{0.04, 0.04, lam, 0.0, 0.0};
        const auto m = MarketSpec::from_forward(f_base, 100, 0.05, 1);
        const auto g = greeks::pathwise_greeks(m, flat, SimConfig{250, 1000, 7, Scheme::mixing});
        const auto b = analytic::black76_greeks({f_base, 100, 0.05, 1, 0.2});
        const double gaps[] = {g.delta->value - b.delta, g.gamma->value - b.gamma, g.theta->value - b.theta,
                               g.rho->value - b.rho, lam == 0.0 ? g.vega->value - b.vega : 0.0};
        for (double d : gaps) degen_gap = std::max(degen_gap, std::abs(d));
    }
    o.check(degen_gap < 1e-10, fmt("degenerate gap %.2e", degen_gap));
    if (o.ok) o.detail = fmt("%zu points, worst gap/tol %.2f, degenerate gap %.1e", grid.size(), worst, degen_gap);
    return o;
}

Outcome flat_vol_estimators() {
    Outcome o;
    const MarketSpec m{100, 100, 0.05, 1.0};
    const double sigma = 0.2;
    const auto est = greeks::pw_lr_estimators(m, sigma, SimConfig{1, 1000000, 7, Scheme::mixing});
    const double d1 = (0.05 + 0.5 * sigma * sigma) / sigma;
    const double d2 = d1 - sigma;
    const double delta = analytic::norm_cdf(d1);
    const double gamma = analytic::norm_pdf(d1) / (100 * sigma);
    const double rho = 100 * std::exp(-0.05) * analytic::norm_cdf(d2);
    double worst = 0.0;
    auto cmp = [&](const char* name, const std::optional<greeks::GreekValue>& v, double truth) {
        if (!v) {
            o.check(false, std::string(name) + " missing");
            return;
        }
        const double z = std::abs(v->value - truth) / v->std_error;
        worst = std::max(worst, z);
        o.check(z < 3.0, fmt("%s z=%.2f", name, z));
    };
    cmp("pw delta", est.pw.delta, delta);
    cmp("pw rho", est.pw.rho, rho);
    cmp("lr delta", est.lr.delta, delta);
    cmp("lr gamma", est.lr.gamma, gamma);
    cmp("lr rho", est.lr.rho, rho);
    cmp("lr-pw gamma", est.lr_pw.gamma, gamma);
    cmp("pw-lr gamma", est.pw_lr.gamma, gamma);
    if (o.ok) o.detail = fmt("7 estimators, max |z| %.2f", worst);
    return o;
}

Outcome smile_shapes() {
    Outcome o;
    const MarketSpec m;
    const auto ks = iv::strike_grid(50, 200, 2.5);
    auto column = [&](iv::SweepParam w, std::vector<double> vals, double iv::SmileDiagnostics::*f) {
        const auto r = iv::parameter_sweep(w, vals, kRef, m, ks);
        std::vector<double> out;
        for (const auto& d : r.diagnostics) out.push_back(d.*f);
        return out;
    };
    const auto argmin = column(iv::SweepParam::rho, {-0.5, -0.25, 0, 0.25, 0.5}, &iv::SmileDiagnostics::argmin_strike);
    o.check(std::is_sorted(argmin.rbegin(), argmin.rend()) &&
                std::adjacent_find(argmin.begin(), argmin.end()) == argmin.end(),
            "rho argmin not strictly decreasing");

    const auto c_eta = column(iv::SweepParam::eta, {0.3, 0.6, 0.9, 1.2, 1.5}, &iv::SmileDiagnostics::curvature);
    const auto c_lam = column(iv::SweepParam::lam, {0.1, 0.5, 0.9, 1.3, 1.7}, &iv::SmileDiagnostics::curvature);
    auto range = [](const std::vector<double>& v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *hi - *lo;
    };
    o.check(range(c_eta) > range(c_lam), fmt("curvature range eta %.2e <= lam %.2e", range(c_eta), range(c_lam)));

    for (auto w : {iv::SweepParam::v0, iv::SweepParam::vbar}) {
        const auto lv = column(w, {0.01, 0.07, 0.13, 0.19, 0.25}, &iv::SmileDiagnostics::level);
        o.check(std::is_sorted(lv.begin(), lv.end()), iv::to_string(w) + " level not increasing");
    }

    const auto fine = iv::smile(kRef, m, iv::strike_grid(60, 180, 1));
    double min_d2 = 1.0;
    for (std::size_t i = 1; i + 1 < fine.ivs.size(); ++i)
        min_d2 = std::min(min_d2, fine.ivs[i + 1] - 2 * fine.ivs[i] + fine.ivs[i - 1]);
    o.check(min_d2 >= -1e-6, fmt("min second difference %.2e", min_d2));
    if (o.ok)
        o.detail = fmt("argmin %.1f..%.1f, curvature range eta %.1e vs lam %.1e, min d2 %.1e", argmin.front(),
                       argmin.back(), range(c_eta), range(c_lam), min_d2);
    return o;
}

Outcome calibration_round_trip() {
    Outcome o;
    const HestonParams truth{0.073, 0.073, 0.45, 0.65, -0.15};
    calib::ChainMeta meta;
    meta.close = 80.0;
    meta.trade_date = calib::parse_date("2024-04-26");
    meta.expiry_date = calib::parse_date("2024-07-17");
    const auto ks = iv::strike_grid(50, 120, 2.5);
    const auto chain = calib::synthetic_chain(truth, ks, meta);

    const HestonParams starts[] = {{0.05, 0.05, 0.45, 1.0, 0.0},
                                   {0.1, 0.1, 0.45, 0.3, -0.4},
                                   {0.03, 0.03, 0.45, 1.5, 0.3},
                                   {0.12, 0.12, 0.45, 0.5, 0.2},
                                   {0.06, 0.06, 0.45, 1.2, -0.45}};
    calib::ModeOverrides ov;
    ov.vbar_fixed = truth.vbar;
    ov.lam_fixed = truth.lam;
    const auto t0 = std::chrono::steady_clock::now();
    double worst_loss = 0.0;
    for (const auto& s : starts) {
        calib::CalibConfig cfg;
        cfg.initial = s;
        const auto r = calib::calibrate_modes(chain, calib::Mode::fix2, cfg, ov);
        auto close = [](double a, double b) { return std::abs(a - b) <= std::max(0.1 * std::abs(b), 0.02); };
        o.check(close(r.params.v0, truth.v0) && close(r.params.eta, truth.eta) && close(r.params.rho, truth.rho),
                fmt("start v0=%g: got (%.4f, %.4f, %.4f)", s.v0, r.params.v0, r.params.eta, r.params.rho));
        o.check(r.loss < 1e-5, fmt("start v0=%g: loss %.2e", s.v0, r.loss));
        o.check(r.iterations <= 300, "too many iterations");
        worst_loss = std::max(worst_loss, r.loss);
    }
    if (o.ok) o.detail = fmt("5 starts, worst loss %.2e (%.0fs)", worst_loss, seconds_since(t0));
    return o;
}

Outcome determinism() {
    Outcome o;
    const std::vector<std::vector<std::string>> recipes{
        {"simulate", "--grid", "s0", "--values", "80,90,100,110,120", "--nt", "100", "--np", "10000"},
        {"simulate", "--grid", "v0", "--values", "0.1,0.15,0.2,0.25,0.3", "--nt", "100", "--np", "10000"},
        {"simulate", "--eta", "0", "--scheme", "mixing", "--grid", "s0", "--values", "80,100,120", "--nt", "1000"},
        {"greeks", "--grid", "f0", "--values", "80,100,120", "--np", "20000", "--correlation"},
        {"greeks", "--methods", "pw,lr,lr-pw,pw-lr", "--np", "100000"},
        {"convergence", "--reps", "5", "--np", "100,1000"},
    };
    int checked = 0;
    for (const auto& base : recipes) {
        std::string label;
        for (const auto& a : base) label += a + ' ';
        auto with_threads = [&](const char* n) {
            auto a = base;
            a.insert(a.end(), {"--threads", n});
            return cli_run(a);
        };
        const auto a = with_threads("1"), b = with_threads("1"), c = with_threads("3");
        o.check(a.code == 0, label + "exit " + std::to_string(a.code) + " " + a.err);
        o.check(a.out == b.out, label + "differs across runs");
        o.check(a.out == c.out, label + "differs across thread counts");
        ++checked;
    }
    if (o.ok) o.detail = fmt("%d seeded recipes x (2 runs, threads 1 and 3)", checked);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"headline price", headline_price},
        {"parity triple", parity_triple},
        {"zero-strike limit", zero_strike},
        {"deterministic variance", deterministic_variance},
        {"convergence ordering", convergence},
        {"greeks vs finite differences", greeks_oracle},
        {"flat-vol estimators", flat_vol_estimators},
        {"smile shapes", smile_shapes},
        {"calibration round trip", calibration_round_trip},
        {"determinism", determinism},
    };
    int failures = 0;
    int n = 0;
    for (const auto& [name, fn] : criteria) {
        ++n;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += o.ok ? 0 : 1;
        std::printf("%s %2d %s: %s\n", o.ok ? "PASS" : "FAIL", n, name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", n - failures, n);
    return failures == 0 ? 0 : 1;
}
