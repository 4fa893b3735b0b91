#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hestonlab/types.hpp"

namespace hestonlab::calib {

struct QuoteRow {
    double strike = 0.0;
    double iv = 0.0;
    double x = 0.0;  // ln(K / close)
};

struct ChainMeta {
    double close = 0.0;
    std::chrono::year_month_day trade_date{};
    std::chrono::year_month_day expiry_date{};
    double r = 0.036;
    double daycount_base = 365.0;
};

struct QuoteChain {
    std::chrono::year_month_day trade_date{};
    std::chrono::year_month_day expiry_date{};
    double close = 0.0;
    double r = 0.0;
    double t = 0.0;
    std::vector<QuoteRow> rows;

    ChainMeta meta() const;
    std::vector<double> strikes() const;
    std::vector<double> ivs() const;
    /// Futures-style market template: the close is the forward level.
    MarketSpec market() const;
};

struct CleaningStats {
    std::size_t rows_read = 0;
    std::size_t dropped_missing = 0;
    std::size_t dropped_near_zero = 0;
};

class ChainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::chrono::year_month_day parse_date(const std::string& s);
std::string format_date(std::chrono::year_month_day d);

/// Reads {"close", "trade_date", "expiry_date", "r"} from a JSON sidecar.
ChainMeta load_meta(const std::filesystem::path& path);
void save_meta(const std::filesystem::path& path, const ChainMeta& meta);

/// Builds a chain from raw (strike, iv) rows: drops |iv| <= 0.0101, averages
/// duplicate strikes and sorts ascending.
QuoteChain make_chain(std::span<const double> strikes, std::span<const double> ivs,
                      const ChainMeta& meta, CleaningStats* stats = nullptr);

QuoteChain parse_chain(std::istream& in, const ChainMeta& meta, CleaningStats* stats = nullptr);
QuoteChain load_chain(const std::filesystem::path& path, const ChainMeta& meta,
                      CleaningStats* stats = nullptr);
void save_chain(const std::filesystem::path& path, const QuoteChain& chain);

/// Synthetic chain: model IVs of p at the given strikes.
QuoteChain synthetic_chain(const HestonParams& p, std::span<const double> strikes,
                           const ChainMeta& meta);

struct LossDetail {
    double loss = 0.0;
    std::vector<double> model_ivs;
    std::size_t penalised = 0;  // strikes whose inversion left the band
};

/// Mean squared IV error over strikes. An inversion outside the band
/// contributes (edge - market)^2 with edge the violated band limit.
LossDetail iv_loss_detail(const QuoteChain& chain, const HestonParams& p);
double iv_loss(const QuoteChain& chain, const HestonParams& p);

enum Param : std::size_t { kV0 = 0, kVbar, kLam, kEta, kRho, kParamCount };

using ParamVector = std::array<double, kParamCount>;
using ParamMask = std::array<bool, kParamCount>;

ParamVector to_vector(const HestonParams& p);
HestonParams from_vector(const ParamVector& v);
std::string param_name(std::size_t i);

struct Bounds {
    double v0_lo = 0.02, v0_hi = 0.12;
    double vbar_floor = 0.02, vbar_halfwidth = 0.04;  // vbar in [max(floor, v0 - hw), max(floor, v0 + hw)]
    double lam_lo = -2.0, lam_hi = 2.0;
    double eta_lo = 0.0, eta_hi = 2.0;
    double rho_lo = -0.5, rho_hi = 0.5;

    double lower(std::size_t i, double v0) const;
    double upper(std::size_t i, double v0) const;
    /// Nominal interval width per parameter, used to scale descent steps.
    double width(std::size_t i) const;
    /// Clamps the free coordinates, v0 first so vbar's interval follows it.
    HestonParams clamp(HestonParams p, const ParamMask& fixed) const;
    bool contains(const HestonParams& p, const ParamMask& fixed) const;
};

// box: each step is multiplied by the squared bound width of its parameter, so the
// update happens in coordinates where every box is [0, 1]. raw: plain steps.
enum class StepScaling { box, raw };

struct CalibConfig {
    HestonParams initial{0.05, 0.05, 0.45, 1.0, 0.0};
    ParamMask fixed{};
    int iterations = 300;
    double epsilon = 1e-4;
    double initial_learning_rate = 80.0;  // in box-normalised units; see StepScaling
    double learn_deno = 10.0;
    double decay_level = 0.6;
    StepScaling scaling = StepScaling::box;
    Bounds bounds{};
    /// Called after every update with (iteration, clamped params, loss).
    std::function<void(int, const HestonParams&, double)> on_iterate;

    double learning_rate(int iteration) const;
};

struct CalibResult {
    HestonParams params;
    double loss = 0.0;
    std::vector<double> loss_trace;  // entry 0 is the starting point, then one per iteration
    std::vector<double> fitted_ivs;
    ParamMask fixed{};
    int iterations = 0;
    int best_iteration = 0;
};

class CalibrationError : public std::runtime_error {
public:
    CalibrationError(const std::string& what, std::vector<double> trace)
        : std::runtime_error(what), trace_(std::move(trace)) {}
    const std::vector<double>& trace() const { return trace_; }

private:
    std::vector<double> trace_;
};

CalibResult gradient_descent(const QuoteChain& chain, const CalibConfig& cfg);

enum class Mode { fix0, fix2, fix5 };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

inline constexpr HestonParams kMeanFittedParams{0.07021063, 0.07327743, 0.5279261, 0.67426271,
                                               -0.17644479};

struct ModeOverrides {
    double vbar_fixed = 0.0763;
    double lam_fixed = 0.45;
    HestonParams fix5_params = kMeanFittedParams;
};

/// Sets the fixed mask and fixed values for the mode, then runs the descent
/// starting from cfg.initial (zero iterations for fix5).
CalibResult calibrate_modes(const QuoteChain& chain, Mode mode, CalibConfig cfg,
                            const ModeOverrides& overrides = {});

}  // namespace hestonlab::calib
