#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace hestonlab {

/// The five Heston parameters. All variances are per-year.
struct HestonParams {
    double v0 = 0.04;    // initial variance
    double vbar = 0.04;  // long-run variance
    double lam = 1.2;    // mean-reversion speed
    double eta = 0.3;    // volatility of volatility
    double rho = -0.5;   // correlation between the price and variance drivers

    /// 2*lam*vbar / eta^2. Infinite when eta == 0. Informational only.
    double feller_ratio() const {
        if (eta == 0.0) return std::numeric_limits<double>::infinity();
        return 2.0 * lam * vbar / (eta * eta);
    }

    bool operator==(const HestonParams&) const = default;
};

enum class OptionStyle { call, put };
enum class UnderlyingKind { spot, future };

/// Contract and market context. Only the spot level is stored; for futures
/// contracts the forward F0 = s0 * exp(r t) is derived.
struct MarketSpec {
    double s0 = 100.0;
    double k = 100.0;
    double r = 0.05;
    double t = 1.0;
    OptionStyle style = OptionStyle::call;
    UnderlyingKind underlying_kind = UnderlyingKind::spot;

    double forward() const { return s0 * std::exp(r * t); }
    double discount() const { return std::exp(-r * t); }

    /// Builds a futures-style spec that holds F0 fixed: s0 = f0 * exp(-r t).
    static MarketSpec from_forward(double f0, double k, double r, double t,
                                   OptionStyle style = OptionStyle::call) {
        return MarketSpec{f0 * std::exp(-r * t), k, r, t, style, UnderlyingKind::future};
    }

    bool operator==(const MarketSpec&) const = default;
};

enum class Scheme { crude, mixing };

struct SimConfig {
    std::int64_t n_t = 1000;
    std::int64_t n_p = 10000;
    std::uint64_t seed = 7;
    Scheme scheme = Scheme::mixing;

    double step(double t) const { return t / static_cast<double>(n_t); }
};

struct Violation {
    std::string field;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    double feller_ratio = 0.0;

    bool ok() const { return violations.empty(); }
    bool feller_satisfied() const { return feller_ratio >= 1.0; }
    std::string to_string() const;
};

/// Never throws; an empty violation list means the parameters are usable.
ValidationReport validate_params(const HestonParams& p);

ValidationReport validate_market(const MarketSpec& m);

ValidationReport validate_sim(const SimConfig& cfg);

/// Throws std::invalid_argument carrying the report text when invalid.
void require_valid(const HestonParams& p);
void require_valid(const MarketSpec& m);
void require_valid(const SimConfig& cfg);

std::string to_string(OptionStyle s);
std::string to_string(UnderlyingKind u);
std::string to_string(Scheme s);
OptionStyle parse_style(const std::string& s);
UnderlyingKind parse_underlying(const std::string& s);
Scheme parse_scheme(const std::string& s);

}  // namespace hestonlab
