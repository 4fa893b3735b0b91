#include "hestonlab/types.hpp"

#include <sstream>
#include <stdexcept>

namespace hestonlab {

namespace {

void check(ValidationReport& rep, bool ok, const char* field, const std::string& msg) {
    if (!ok) rep.violations.push_back({field, msg});
}

std::string fmt_value(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i].field << ": " << violations[i].message;
    }
    return os.str();
}

ValidationReport validate_params(const HestonParams& p) {
    ValidationReport rep;
    rep.feller_ratio = p.feller_ratio();
    check(rep, std::isfinite(p.v0) && p.v0 >= 0.0, "v0", "must be >= 0, got " + fmt_value(p.v0));
    check(rep, std::isfinite(p.vbar) && p.vbar >= 0.0, "vbar",
          "must be >= 0, got " + fmt_value(p.vbar));
    check(rep, std::isfinite(p.eta) && p.eta >= 0.0, "eta", "must be >= 0, got " + fmt_value(p.eta));
    check(rep, std::isfinite(p.lam), "lam", "must be finite, got " + fmt_value(p.lam));
    check(rep, std::isfinite(p.rho) && p.rho > -1.0 && p.rho < 1.0, "rho",
          "must lie in (-1, 1), got " + fmt_value(p.rho));
    return rep;
}

ValidationReport validate_market(const MarketSpec& m) {
    ValidationReport rep;
    check(rep, std::isfinite(m.s0) && m.s0 > 0.0, "s0", "must be > 0, got " + fmt_value(m.s0));
    check(rep, std::isfinite(m.k) && m.k >= 0.0, "k", "must be >= 0, got " + fmt_value(m.k));
    check(rep, std::isfinite(m.t) && m.t > 0.0, "t", "must be > 0, got " + fmt_value(m.t));
    check(rep, std::isfinite(m.r), "r", "must be finite, got " + fmt_value(m.r));
    return rep;
}

ValidationReport validate_sim(const SimConfig& cfg) {
    ValidationReport rep;
    check(rep, cfg.n_t >= 1, "n_t", "must be >= 1, got " + std::to_string(cfg.n_t));
    check(rep, cfg.n_p >= 1, "n_p", "must be >= 1, got " + std::to_string(cfg.n_p));
    return rep;
}

void require_valid(const HestonParams& p) {
    auto rep = validate_params(p);
    if (!rep.ok()) throw std::invalid_argument("invalid Heston parameters: " + rep.to_string());
}

void require_valid(const MarketSpec& m) {
    auto rep = validate_market(m);
    if (!rep.ok()) throw std::invalid_argument("invalid market spec: " + rep.to_string());
}

void require_valid(const SimConfig& cfg) {
    auto rep = validate_sim(cfg);
    if (!rep.ok()) throw std::invalid_argument("invalid simulation config: " + rep.to_string());
}

std::string to_string(OptionStyle s) { return s == OptionStyle::call ? "call" : "put"; }
std::string to_string(UnderlyingKind u) { return u == UnderlyingKind::spot ? "spot" : "future"; }
std::string to_string(Scheme s) { return s == Scheme::crude ? "crude" : "mixing"; }

OptionStyle parse_style(const std::string& s) {
    if (s == "call") return OptionStyle::call;
    if (s == "put") return OptionStyle::put;
    throw std::invalid_argument("unknown option style '" + s + "' (expected call|put)");
}

UnderlyingKind parse_underlying(const std::string& s) {
    if (s == "spot") return UnderlyingKind::spot;
    if (s == "future") return UnderlyingKind::future;
    throw std::invalid_argument("unknown underlying kind '" + s + "' (expected spot|future)");
}

Scheme parse_scheme(const std::string& s) {
    if (s == "crude") return Scheme::crude;
    if (s == "mixing") return Scheme::mixing;
    throw std::invalid_argument("unknown scheme '" + s + "' (expected crude|mixing)");
}

}  // namespace hestonlab
