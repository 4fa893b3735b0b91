#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hestonlab/analytic.hpp"
#include "hestonlab/types.hpp"

namespace hestonlab::iv {

inline constexpr double kMinVol = 1e-6;
inline constexpr double kMaxVol = 5.0;

enum class BandSide { below, above };

/// Raised when a premium has no implied volatility in [kMinVol, kMaxVol],
/// either because it violates the no-arbitrage band or because the root lies
/// outside the bracket.
class OutOfBandError : public std::domain_error {
public:
    OutOfBandError(const std::string& what, BandSide side, double lower, double upper,
                   std::optional<double> strike = std::nullopt)
        : std::domain_error(what), side_(side), lower_(lower), upper_(upper), strike_(strike) {}

    BandSide side() const { return side_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; }
    std::optional<double> strike() const { return strike_; }

private:
    BandSide side_;
    double lower_;
    double upper_;
    std::optional<double> strike_;
};

/// Black-76 implied volatility: sigma with black76(f, k, r, t, sigma) == price.
double implied_vol(double price, double f, double k, double r, double t,
                   OptionStyle style = OptionStyle::call);

/// Heston implied volatility at one strike, inverted from the out-of-the-money
/// side (puts below the forward, calls at or above it).
double model_iv(const HestonParams& p, const MarketSpec& tmpl, double k);

struct SmileCurve {
    std::vector<double> strikes;
    std::vector<double> ivs;
    HestonParams params;
    double f0 = 0.0;
};

/// Strikes must be strictly ascending and positive. Uses m's s0, r and t.
SmileCurve smile(const HestonParams& p, const MarketSpec& m, std::span<const double> strikes);

enum class SweepParam { rho, eta, lam, v0, vbar };

std::string to_string(SweepParam s);
SweepParam parse_sweep_param(const std::string& s);
HestonParams with_param(HestonParams base, SweepParam which, double value);

struct SmileDiagnostics {
    double param_value = 0.0;
    double level = 0.0;          // IV at K = F0
    double argmin_strike = 0.0;  // refined minimiser of IV(K)
    double min_iv = 0.0;
    double curvature = 0.0;      // second difference at the argmin, stencil +-5% of F0
    int skew = 0;                // sign(IV(K_hi) - IV(K_lo))
};

struct SweepResult {
    SweepParam which = SweepParam::rho;
    std::vector<SmileCurve> curves;
    std::vector<SmileDiagnostics> diagnostics;
};

SmileDiagnostics diagnose(const SmileCurve& curve, const MarketSpec& m, double param_value);

SweepResult parameter_sweep(SweepParam which, std::span<const double> values,
                            const HestonParams& base, const MarketSpec& m,
                            std::span<const double> strikes);

std::vector<double> strike_grid(double lo, double hi, double step);

}  // namespace hestonlab::iv
