#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hestonlab/random.hpp"
#include "hestonlab/types.hpp"

namespace hestonlab::mc {

/// Which pathwise derivative ledgers to co-evolve with the mixing state.
struct DerivativeFlags {
    bool wrt_v0 = false;   // dv/dv0, dY/dv0
    bool wrt_h = false;    // dv/dh, dY/dh (normals held fixed as sqrt(h) Z')
    bool wrt_rho = false;  // dY/drho (variance path does not depend on rho)
};

/// Simulated trajectories, row-major n_p x (n_t + 1).
///
/// v holds the signed Euler variance; every coefficient uses max(v, 0).
/// y is filled for the mixing scheme, s for the crude scheme. Ledger matrices
/// are empty unless requested.
struct PathBatch {
    Scheme scheme = Scheme::mixing;
    double h = 0.0;
    std::int64_t n_p = 0;
    std::int64_t n_t = 0;
    std::vector<double> v;
    std::vector<double> y;
    std::vector<double> s;
    std::vector<double> dv_dv0;
    std::vector<double> dy_dv0;
    std::vector<double> dv_dh;
    std::vector<double> dy_dh;

    std::size_t index(std::int64_t path, std::int64_t step) const {
        return static_cast<std::size_t>(path * (n_t + 1) + step);
    }
    std::span<const double> row(const std::vector<double>& m, std::int64_t path) const {
        return std::span<const double>(m).subspan(index(path, 0),
                                                  static_cast<std::size_t>(n_t + 1));
    }
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_p = 0;
};

/// End-of-path summary of one mixing trajectory.
struct MixingPath {
    double y_t = 0.0;         // Y(T)
    double var_sum = 0.0;     // sum_{i<n_t} max(v(ih), 0)
    double dy_dv0 = 0.0;
    double dsum_dv0 = 0.0;    // sum_{i<n_t} d max(v(ih),0) / dv0
    double dy_dh = 0.0;
    double dsum_dh = 0.0;
    double dy_drho = 0.0;
    bool truncated = false;   // any step hit max(v, 0) = 0

    /// sigma_eff = sqrt((1 - rho^2) h var_sum / T) = sqrt((1 - rho^2) var_sum / n_t).
    double sigma_eff(double rho, std::int64_t n_t) const;
};

/// Optional per-step recording targets, each of length n_t + 1.
struct MixingRecorder {
    std::span<double> v, y, dv_dv0, dy_dv0, dv_dh, dy_dh;
};

struct CrudeRecorder {
    std::span<double> v, s;
};

/// Mixing recursions driven by one shared normal per step:
///   Y <- Y - rho^2/2 v+ h + rho sqrt(v+) Z
///   v <- v - lam (v+ - vbar) h + eta sqrt(v+) Z,   Z = sqrt(h) Z'.
MixingPath evolve_mixing_path(const HestonParams& p, double h, std::int64_t n_t,
                              RandomSource& rng, const DerivativeFlags& flags = {},
                              const MixingRecorder* rec = nullptr);

/// Crude Euler recursions on S directly with two normals per step. Returns S(T).
double evolve_crude_path(double s0, double r, const HestonParams& p, double h,
                         std::int64_t n_t, RandomSource& rng, const CrudeRecorder* rec = nullptr);

PathBatch simulate_crude(const MarketSpec& m, const HestonParams& p, const SimConfig& cfg);

PathBatch simulate_mixing(const MarketSpec& m, const HestonParams& p, const SimConfig& cfg,
                          const DerivativeFlags& with_derivatives = {});

/// e^{-rT} mean of (S(T) - K)^+ (or the put payoff) over paths.
McEstimate price_crude_mc(const MarketSpec& m, const HestonParams& p, const SimConfig& cfg);

/// Mean over paths of the conditional Black-Scholes value at
/// (S0 e^{Y(T)}, K, r, T, sigma_eff).
McEstimate price_mixing_mc(const MarketSpec& m, const HestonParams& p, const SimConfig& cfg);

McEstimate price_mc(const MarketSpec& m, const HestonParams& p, const SimConfig& cfg);

struct ConvergenceRow {
    std::int64_t n_p = 0;
    double err_crude = 0.0;
    double err_mixing = 0.0;
};

/// Per n_p, the mean over `replications` seeded runs of |estimate - reference|
/// for both schemes. The reference is the analytic Heston price.
std::vector<ConvergenceRow> convergence_study(const MarketSpec& m, const HestonParams& p,
                                              std::span<const std::int64_t> n_p_list,
                                              int replications, std::int64_t n_t,
                                              std::uint64_t seed);

/// Seed used for replication `rep` at path count n_p.
std::uint64_t replication_seed(std::uint64_t seed, int rep, std::int64_t n_p);

}  // namespace hestonlab::mc
