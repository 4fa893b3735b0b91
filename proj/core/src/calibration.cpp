#include "hestonlab/calibration.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "hestonlab/analytic.hpp"
#include "hestonlab/implied_vol.hpp"
#include "hestonlab/parallel.hpp"

namespace hestonlab::calib {

namespace {

constexpr double kNearZeroIv = 0.0101;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

bool is_missing(const std::string& field) {
    static const char* const tokens[] = {"", "na", "n/a", "nan", "null", "none", "-", "--"};
    const auto f = lower(trim(field));
    return std::any_of(std::begin(tokens), std::end(tokens),
                       [&](const char* t) { return f == t; });
}

// Keeps digits, sign and decimal point; a trailing '%' scales by 1/100.
std::optional<double> parse_numeric(const std::string& field, bool allow_percent) {
    std::string kept;
    bool percent = false;
    for (char c : field) {
        if ((c >= '0' && c <= '9') || c == '.' || c == '-' || c == '+')
            kept += c;
        else if (c == '%')
            percent = true;
    }
    if (!kept.empty() && kept.front() == '+') kept.erase(0, 1);
    double v = 0.0;
    const auto* end = kept.data() + kept.size();
    const auto [ptr, ec] = std::from_chars(kept.data(), end, v);
    if (kept.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
    if (percent && allow_percent) v /= 100.0;
    return v;
}

std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    return std::string(buf, res.ptr);
}

double year_fraction(const ChainMeta& meta) {
    if (!meta.trade_date.ok() || !meta.expiry_date.ok())
        throw ChainError("chain metadata has an invalid date");
    const auto days = (std::chrono::sys_days{meta.expiry_date} -
                       std::chrono::sys_days{meta.trade_date})
                          .count();
    if (days <= 0) throw ChainError("expiry must fall after the trade date");
    if (!(meta.daycount_base > 0.0)) throw ChainError("day-count base must be positive");
    return static_cast<double>(days) / meta.daycount_base;
}

}  // namespace

ChainMeta QuoteChain::meta() const {
    ChainMeta m;
    m.close = close;
    m.trade_date = trade_date;
    m.expiry_date = expiry_date;
    m.r = r;
    return m;
}

std::vector<double> QuoteChain::strikes() const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row.strike);
    return out;
}

std::vector<double> QuoteChain::ivs() const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row.iv);
    return out;
}

MarketSpec QuoteChain::market() const { return MarketSpec::from_forward(close, close, r, t); }

std::chrono::year_month_day parse_date(const std::string& s) {
    int y = 0;
    unsigned m = 0, d = 0;
    char dash1 = 0, dash2 = 0;
    std::istringstream is(trim(s));
    is >> y >> dash1 >> m >> dash2 >> d;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!is || dash1 != '-' || dash2 != '-' || !is.eof() || !ymd.ok())
        throw ChainError("invalid date '" + s + "' (expected YYYY-MM-DD)");
    return ymd;
}

std::string format_date(std::chrono::year_month_day d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

ChainMeta load_meta(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ChainError("cannot open metadata file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
        ChainMeta m;
        m.close = j.at("close").get<double>();
        m.trade_date = parse_date(j.at("trade_date").get<std::string>());
        m.expiry_date = parse_date(j.at("expiry_date").get<std::string>());
        m.r = j.value("r", 0.036);
        m.daycount_base = j.value("daycount_base", 365.0);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ChainError(path.string() + ": " + e.what());
    }
}

void save_meta(const std::filesystem::path& path, const ChainMeta& meta) {
    nlohmann::ordered_json j;
    j["close"] = meta.close;
    j["trade_date"] = format_date(meta.trade_date);
    j["expiry_date"] = format_date(meta.expiry_date);
    j["r"] = meta.r;
    if (meta.daycount_base != 365.0) j["daycount_base"] = meta.daycount_base;
    std::ofstream out(path);
    if (!out) throw ChainError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

QuoteChain make_chain(std::span<const double> strikes, std::span<const double> ivs,
                      const ChainMeta& meta, CleaningStats* stats) {
    if (strikes.size() != ivs.size()) throw ChainError("strike and IV columns differ in length");
    if (!(meta.close > 0.0)) throw ChainError("close must be positive");
    QuoteChain chain;
    chain.trade_date = meta.trade_date;
    chain.expiry_date = meta.expiry_date;
    chain.close = meta.close;
    chain.r = meta.r;
    chain.t = year_fraction(meta);

    std::map<double, std::pair<double, int>> groups;
    std::size_t near_zero = 0;
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        if (std::abs(ivs[i]) <= kNearZeroIv) {
            ++near_zero;
            continue;
        }
        auto& g = groups[strikes[i]];
        g.first += ivs[i];
        g.second += 1;
    }
    if (stats) stats->dropped_near_zero += near_zero;
    if (groups.empty()) throw ChainError("option chain is empty after cleaning");
    for (const auto& [k, g] : groups)
        chain.rows.push_back({k, g.first / g.second, std::log(k / meta.close)});
    return chain;
}

QuoteChain parse_chain(std::istream& in, const ChainMeta& meta, CleaningStats* stats) {
    CleaningStats local;
    CleaningStats& st = stats ? *stats : local;
    st = {};

    std::string line;
    if (!std::getline(in, line)) throw ChainError("option chain has no header row");
    const auto header = split_csv_line(line);
    std::optional<std::size_t> strike_col, iv_col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto name = lower(trim(header[i]));
        if (name == "strike" && !strike_col) strike_col = i;
        if (name == "iv" && !iv_col) iv_col = i;
    }
    if (!strike_col || !iv_col) throw ChainError("option chain needs Strike and IV columns");

    std::vector<double> strikes, ivs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++st.rows_read;
        const auto fields = split_csv_line(line);
        const auto field = [&](std::size_t c) {
            return c < fields.size() ? fields[c] : std::string{};
        };
        const auto ks = field(*strike_col);
        const auto vs = field(*iv_col);
        if (is_missing(ks) || is_missing(vs)) {
            ++st.dropped_missing;
            continue;
        }
        const auto k = parse_numeric(ks, false);
        const auto v = parse_numeric(vs, true);
        if (!k || !v) {
            throw ChainError("line " + std::to_string(line_no) + ": cannot parse " +
                             (!k ? "Strike '" + ks + "'" : "IV '" + vs + "'"));
        }
        if (!(*k > 0.0))
            throw ChainError("line " + std::to_string(line_no) + ": strike must be positive");
        strikes.push_back(*k);
        ivs.push_back(*v);
    }
    return make_chain(strikes, ivs, meta, &st);
}

QuoteChain load_chain(const std::filesystem::path& path, const ChainMeta& meta,
                      CleaningStats* stats) {
    std::ifstream in(path);
    if (!in) throw ChainError("cannot open option chain " + path.string());
    try {
        return parse_chain(in, meta, stats);
    } catch (const ChainError& e) {
        throw ChainError(path.string() + ": " + e.what());
    }
}

void save_chain(const std::filesystem::path& path, const QuoteChain& chain) {
    std::ofstream out(path);
    if (!out) throw ChainError("cannot write " + path.string());
    out << "Strike,IV\n";
    for (const auto& row : chain.rows) out << shortest(row.strike) << ',' << shortest(row.iv) << '\n';
}

QuoteChain synthetic_chain(const HestonParams& p, std::span<const double> strikes,
                           const ChainMeta& meta) {
    QuoteChain shell = make_chain(strikes, std::vector<double>(strikes.size(), 1.0), meta);
    const auto m = shell.market();
    for (auto& row : shell.rows) row.iv = iv::model_iv(p, m, row.strike);
    return shell;
}

LossDetail iv_loss_detail(const QuoteChain& chain, const HestonParams& p) {
    if (chain.rows.empty()) throw std::invalid_argument("iv_loss needs a nonempty chain");
    require_valid(p);
    const auto m = chain.market();
    const auto n = chain.rows.size();
    LossDetail out;
    out.model_ivs.assign(n, 0.0);
    std::vector<double> sq(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = chain.rows[i];
        double model = 0.0;
        try {
            model = iv::model_iv(p, m, row.strike);
        } catch (const iv::OutOfBandError& e) {
            model = e.side() == iv::BandSide::below ? iv::kMinVol : iv::kMaxVol;
            ++out.penalised;
        } catch (const analytic::QuadratureError&) {
            model = std::numeric_limits<double>::quiet_NaN();
        }
        out.model_ivs[i] = model;
        sq[i] = (model - row.iv) * (model - row.iv);
    }
    out.loss = pairwise_sum(sq) / static_cast<double>(n);
    return out;
}

double iv_loss(const QuoteChain& chain, const HestonParams& p) {
    return iv_loss_detail(chain, p).loss;
}

ParamVector to_vector(const HestonParams& p) { return {p.v0, p.vbar, p.lam, p.eta, p.rho}; }

HestonParams from_vector(const ParamVector& v) {
    return {v[kV0], v[kVbar], v[kLam], v[kEta], v[kRho]};
}

std::string param_name(std::size_t i) {
    static const char* const names[] = {"v0", "vbar", "lam", "eta", "rho"};
    if (i >= kParamCount) throw std::out_of_range("parameter index");
    return names[i];
}

double Bounds::lower(std::size_t i, double v0) const {
    switch (i) {
        case kV0: return v0_lo;
        case kVbar: return std::max(vbar_floor, v0 - vbar_halfwidth);
        case kLam: return lam_lo;
        case kEta: return eta_lo;
        case kRho: return rho_lo;
    }
    throw std::out_of_range("parameter index");
}

double Bounds::upper(std::size_t i, double v0) const {
    switch (i) {
        case kV0: return v0_hi;
        case kVbar: return std::max(vbar_floor, v0 + vbar_halfwidth);
        case kLam: return lam_hi;
        case kEta: return eta_hi;
        case kRho: return rho_hi;
    }
    throw std::out_of_range("parameter index");
}

double Bounds::width(std::size_t i) const {
    if (i == kVbar) return 2.0 * vbar_halfwidth;
    return upper(i, 0.0) - lower(i, 0.0);
}

HestonParams Bounds::clamp(HestonParams p, const ParamMask& fixed) const {
    auto v = to_vector(p);
    for (std::size_t i = 0; i < kParamCount; ++i) {
        if (fixed[i]) continue;
        v[i] = std::clamp(v[i], lower(i, v[kV0]), upper(i, v[kV0]));
    }
    return from_vector(v);
}

bool Bounds::contains(const HestonParams& p, const ParamMask& fixed) const {
    const auto v = to_vector(p);
    for (std::size_t i = 0; i < kParamCount; ++i) {
        if (fixed[i]) continue;
        if (v[i] < lower(i, v[kV0]) || v[i] > upper(i, v[kV0])) return false;
    }
    return true;
}

double CalibConfig::learning_rate(int iteration) const {
    return initial_learning_rate / std::pow(learn_deno + iteration, decay_level);
}

namespace {

void check_config(const CalibConfig& cfg) {
    if (cfg.iterations < 0) throw std::invalid_argument("iterations must be >= 0");
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(cfg.initial_learning_rate > 0.0) || !(cfg.learn_deno > 0.0) || !(cfg.decay_level >= 0.0))
        throw std::invalid_argument("learning-rate schedule must be positive");
}

// Central difference, one-sided when a bump leaves the model's domain.
std::vector<double> fd_gradient(const QuoteChain& chain, const ParamVector& x,
                                const std::vector<std::size_t>& free, double eps) {
    const auto n = free.size();
    std::vector<double> up(n), down(n);
    std::vector<int> up_ok(n), down_ok(n);
    parallel_for(static_cast<std::int64_t>(2 * n), [&](std::int64_t k) {
        const auto slot = static_cast<std::size_t>(k) / 2;
        const bool is_up = k % 2 == 0;
        auto y = x;
        y[free[slot]] += is_up ? eps : -eps;
        const auto p = from_vector(y);
        const bool valid = validate_params(p).ok();
        (is_up ? up_ok : down_ok)[slot] = valid;
        if (valid) (is_up ? up : down)[slot] = iv_loss(chain, p);
    });
    std::vector<double> g(n, 0.0);
    double center = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t s = 0; s < n; ++s) {
        if (up_ok[s] && down_ok[s]) {
            g[s] = (up[s] - down[s]) / (2.0 * eps);
            continue;
        }
        if (std::isnan(center)) center = iv_loss(chain, from_vector(x));
        if (up_ok[s]) g[s] = (up[s] - center) / eps;
        else if (down_ok[s]) g[s] = (center - down[s]) / eps;
    }
    return g;
}

}  // namespace

CalibResult gradient_descent(const QuoteChain& chain, const CalibConfig& cfg) {
    check_config(cfg);
    require_valid(cfg.initial);

    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < kParamCount; ++i)
        if (!cfg.fixed[i]) free.push_back(i);

    CalibResult res;
    res.fixed = cfg.fixed;
    HestonParams current = cfg.bounds.clamp(cfg.initial, cfg.fixed);
    double loss = iv_loss(chain, current);
    res.loss_trace.push_back(loss);
    if (std::isnan(loss)) throw CalibrationError("loss is NaN at the starting point", res.loss_trace);

    HestonParams best = current;
    double best_loss = loss;
    const int iterations = free.empty() ? 0 : cfg.iterations;

    for (int it = 0; it < iterations; ++it) {
        auto x = to_vector(current);
        const auto g = fd_gradient(chain, x, free, cfg.epsilon);
        const double lr = cfg.learning_rate(it);
        for (std::size_t s = 0; s < free.size(); ++s) {
            const auto i = free[s];
            const double scale =
                cfg.scaling == StepScaling::box ? std::pow(cfg.bounds.width(i), 2) : 1.0;
            x[i] -= lr * scale * g[s];
        }
        current = cfg.bounds.clamp(from_vector(x), cfg.fixed);
        loss = iv_loss(chain, current);
        res.loss_trace.push_back(loss);
        if (cfg.on_iterate) cfg.on_iterate(it + 1, current, loss);
        if (std::isnan(loss)) {
            std::ostringstream os;
            os << "loss became NaN at iteration " << it + 1;
            throw CalibrationError(os.str(), res.loss_trace);
        }
        if (loss < best_loss) {
            best_loss = loss;
            best = current;
            res.best_iteration = it + 1;
        }
        res.iterations = it + 1;
    }

    const auto detail = iv_loss_detail(chain, best);
    res.params = best;
    res.loss = detail.loss;
    res.fitted_ivs = detail.model_ivs;
    return res;
}

std::string to_string(Mode m) {
    switch (m) {
        case Mode::fix0: return "fix0";
        case Mode::fix2: return "fix2";
        case Mode::fix5: return "fix5";
    }
    return "unknown";
}

Mode parse_mode(const std::string& s) {
    for (auto m : {Mode::fix0, Mode::fix2, Mode::fix5})
        if (to_string(m) == s) return m;
    throw std::invalid_argument("unknown calibration mode '" + s + "' (expected fix0|fix2|fix5)");
}

CalibResult calibrate_modes(const QuoteChain& chain, Mode mode, CalibConfig cfg,
                            const ModeOverrides& overrides) {
    switch (mode) {
        case Mode::fix0:
            cfg.fixed = {};
            break;
        case Mode::fix2:
            cfg.fixed = {};
            cfg.fixed[kVbar] = cfg.fixed[kLam] = true;
            cfg.initial.vbar = overrides.vbar_fixed;
            cfg.initial.lam = overrides.lam_fixed;
            break;
        case Mode::fix5:
            cfg.fixed.fill(true);
            cfg.initial = overrides.fix5_params;
            cfg.iterations = 0;
            break;
    }
    return gradient_descent(chain, cfg);
}

}  // namespace hestonlab::calib
