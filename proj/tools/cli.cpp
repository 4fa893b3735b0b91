#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hestonlab/analytic.hpp"
#include "hestonlab/calibration.hpp"
#include "hestonlab/greeks.hpp"
#include "hestonlab/implied_vol.hpp"
#include "hestonlab/mc.hpp"
#include "hestonlab/parallel.hpp"
#include "hestonlab/types.hpp"

namespace hestonlab::cli {

namespace {

using json = nlohmann::ordered_json;

const char* const kCommands[] = {"price", "simulate", "greeks", "smile", "calibrate", "convergence"};

std::string num(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json to_json_value(double v) { return v; }
json to_json_value(std::int64_t v) { return v; }
json to_json_value(std::uint64_t v) { return v; }
json to_json_value(int v) { return v; }
json to_json_value(bool v) { return v; }
json to_json_value(const std::string& v) { return v; }
template <class T>
json to_json_value(const std::vector<T>& xs) {
    json a = json::array();
    for (const auto& x : xs) a.push_back(to_json_value(x));
    return a;
}

std::string show(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_float()) return num(j.get<double>());
    if (j.is_array()) {
        std::string s;
        for (const auto& x : j) s += (s.empty() ? "" : ",") + show(x);
        return s;
    }
    return j.dump();
}

// Wraps one subcommand and remembers every option so the resolved
// configuration can be echoed next to the results.
class Command {
public:
    Command(CLI::App& parent, const std::string& name, const std::string& description)
        : app_(parent.add_subcommand(name, description)), name_(name) {
        app_->add_option("--format", format_, "Output format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
        app_->add_option("--out", out_, "Write output to this file instead of stdout");
        app_->add_option("--config", config_, "JSON file supplying any flag; argv wins");
        app_->add_option("--threads", threads_, "Worker threads (default HESTON_LAB_THREADS)");
    }

    template <class T>
    CLI::Option* option(const std::string& name, T& var, const std::string& description) {
        echo_.emplace_back(name, [&var] { return to_json_value(var); });
        return app_->add_option("--" + name, var, description)->capture_default_str();
    }

    CLI::Option* flag(const std::string& name, bool& var, const std::string& description) {
        echo_.emplace_back(name, [&var] { return to_json_value(var); });
        return app_->add_flag("--" + name, var, description);
    }

    void model_options(MarketSpec& m, HestonParams& p, std::string* style) {
        option("s0", m.s0, "Initial underlying level");
        option("k", m.k, "Strike");
        option("r", m.r, "Risk-free rate");
        option("t", m.t, "Maturity in years");
        if (style) option("style", *style, "call, put or both")->check(CLI::IsMember({"call", "put", "both"}));
        params(p);
    }

    void params(HestonParams& p) {
        option("v0", p.v0, "Initial variance");
        option("vbar", p.vbar, "Long-run variance");
        option("lam", p.lam, "Mean-reversion speed");
        option("eta", p.eta, "Volatility of volatility");
        option("rho", p.rho, "Correlation");
    }

    CLI::App* app() const { return app_; }
    const std::string& name() const { return name_; }
    const std::string& format() const { return format_; }
    const std::string& out_path() const { return out_; }
    unsigned threads() const { return threads_; }

    json config() const {
        json c;
        for (const auto& [k, f] : echo_) c[k] = f();
        return c;
    }

    void write_csv_preamble(std::ostream& os) const {
        os << "# command=" << name_ << '\n';
        for (const auto& [k, f] : echo_) os << "# " << k << '=' << show(f()) << '\n';
    }

    json envelope() const {
        json j;
        j["command"] = name_;
        j["config"] = config();
        return j;
    }

private:
    CLI::App* app_;
    std::string name_;
    std::string format_ = "csv";
    std::string out_;
    std::string config_;
    unsigned threads_ = 0;
    std::vector<std::pair<std::string, std::function<json()>>> echo_;
};

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

OptionStyle style_of(const std::string& s) { return s == "put" ? OptionStyle::put : OptionStyle::call; }

// --- JSON config expansion ------------------------------------------------

void append_value_tokens(const std::string& key, const json& v, std::vector<std::string>& out) {
    const std::string opt = "--" + key;
    if (v.is_boolean()) {
        if (v.get<bool>()) out.push_back(opt);
        return;
    }
    if (v.is_object()) throw InputError("config key '" + key + "' must not be an object");
    out.push_back(opt);
    if (v.is_string()) out.push_back(v.get<std::string>());
    else if (v.is_number_integer()) out.push_back(v.dump());
    else out.push_back(show(v));
}

std::string normalise_key(std::string k) {
    if (k.rfind("--", 0) == 0) k.erase(0, 2);
    for (auto& c : k)
        if (c == '_') c = '-';
    return k;
}

// Splices the entries of --config FILE into argv right after the
// subcommand, skipping keys already given on the command line.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (!path) return args;

    std::size_t sub = args.size();
    for (std::size_t i = 1; i < args.size() && sub == args.size(); ++i)
        for (const char* c : kCommands)
            if (args[i] == c) sub = i;
    if (sub == args.size()) return args;

    std::ifstream in(*path);
    if (!in) throw InputError("cannot open config file " + *path);
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::exception& e) {
        throw InputError("config file " + *path + ": " + e.what());
    }
    if (!cfg.is_object()) throw InputError("config file must hold a JSON object");

    std::set<std::string> given;
    for (std::size_t i = sub + 1; i < args.size(); ++i) {
        const auto& a = args[i];
        if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') - 2));
    }

    std::vector<std::pair<std::string, json>> entries;
    for (const auto& [k, v] : cfg.items()) {
        if (v.is_object()) {
            if (k != args[sub]) {
                bool is_command = false;
                for (const char* c : kCommands) is_command = is_command || k == c;
                if (!is_command) throw InputError("config key '" + k + "' must not be an object");
            }
            continue;
        }
        entries.emplace_back(normalise_key(k), v);
    }
    if (cfg.contains(args[sub]))
        for (const auto& [k, v] : cfg[args[sub]].items()) entries.emplace_back(normalise_key(k), v);

    std::vector<std::string> tokens;
    std::map<std::string, json> last;
    std::vector<std::string> order;
    for (auto& [k, v] : entries) {
        if (k == "config" || given.count(k)) continue;
        if (!last.count(k)) order.push_back(k);
        last[k] = v;
    }
    for (const auto& k : order) append_value_tokens(k, last[k], tokens);

    std::vector<std::string> out(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(sub) + 1);
    out.insert(out.end(), tokens.begin(), tokens.end());
    out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(sub) + 1, args.end());
    return out;
}

// --- output sink -------------------------------------------------------------

class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw InputError("cannot write output file " + path);
            os_ = file_.get();
        }
    }
    std::ostream& operator*() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

void emit(const Command& cmd, const json& doc, const std::function<void(std::ostream&)>& csv,
          std::ostream& out) {
    Sink sink(cmd.out_path(), out);
    if (cmd.format() == "json") {
        *sink << doc.dump(2) << '\n';
    } else {
        cmd.write_csv_preamble(*sink);
        csv(*sink);
    }
}

// --- subcommands --------------------------------------------------------------

struct PriceArgs {
    MarketSpec m;
    HestonParams p;
    std::string style = "call";
};

void do_price(const Command& cmd, const PriceArgs& a, std::ostream& out) {
    std::vector<std::pair<std::string, analytic::PriceQuote>> quotes;
    for (const char* s : {"call", "put"}) {
        if (a.style != "both" && a.style != s) continue;
        auto m = a.m;
        m.style = style_of(s);
        quotes.emplace_back(s, analytic::price(m, a.p));
    }
    auto doc = cmd.envelope();
    doc["forward"] = a.m.forward();
    doc["feller_ratio"] = a.p.feller_ratio();
    json rows = json::array();
    for (const auto& [s, q] : quotes)
        rows.push_back({{"style", s}, {"value", q.value}, {"p0", q.p0}, {"p1", q.p1},
                        {"quadrature_error", q.quadrature_error}});
    doc["results"] = rows;
    if (quotes.size() == 2) {
        doc["parity"] = {{"call_minus_put", quotes[0].second.value - quotes[1].second.value},
                         {"s0_minus_discounted_k", a.m.s0 - a.m.k * a.m.discount()}};
    }
    emit(cmd, doc,
         [&](std::ostream& os) {
             os << "style,value,p0,p1,quadrature_error\n";
             for (const auto& [s, q] : quotes)
                 os << s << ',' << num(q.value) << ',' << num(q.p0) << ',' << num(q.p1) << ','
                    << num(q.quadrature_error) << '\n';
         },
         out);
}

struct SimArgs {
    MarketSpec m;
    HestonParams p;
    std::string style = "call";
    std::string scheme = "both";
    std::int64_t n_t = 1000;
    std::int64_t n_p = 10000;
    std::uint64_t seed = 7;
    std::string grid = "s0";
    std::vector<double> values;
};

void apply_grid(const std::string& grid, double v, MarketSpec& m, HestonParams& p) {
    if (grid == "s0") m.s0 = v;
    else if (grid == "f0") m.s0 = v * std::exp(-m.r * m.t);
    else if (grid == "v0") p.v0 = v;
    else if (grid == "k") m.k = v;
    else throw std::invalid_argument("unknown grid variable '" + grid + "'");
}

double grid_default(const std::string& grid, const MarketSpec& m, const HestonParams& p) {
    if (grid == "s0") return m.s0;
    if (grid == "f0") return m.forward();
    if (grid == "v0") return p.v0;
    return m.k;
}

void do_simulate(const Command& cmd, const SimArgs& a, std::ostream& out) {
    const auto values = a.values.empty() ? std::vector<double>{grid_default(a.grid, a.m, a.p)} : a.values;
    struct Row {
        double g;
        std::string scheme;
        mc::McEstimate est;
        double analytic;
    };
    std::vector<Row> rows;
    for (double v : values) {
        auto m = a.m;
        auto p = a.p;
        m.style = style_of(a.style);
        apply_grid(a.grid, v, m, p);
        const double reference = analytic::price(m, p).value;
        for (const char* s : {"crude", "mixing"}) {
            if (a.scheme != "both" && a.scheme != s) continue;
            SimConfig cfg{a.n_t, a.n_p, a.seed, parse_scheme(s)};
            rows.push_back({v, s, mc::price_mc(m, p, cfg), reference});
        }
    }
    auto doc = cmd.envelope();
    json res = json::array();
    for (const auto& r : rows)
        res.push_back({{"grid_var", a.grid}, {"grid_value", r.g}, {"scheme", r.scheme},
                       {"value", r.est.value}, {"std_error", r.est.std_error}, {"analytic", r.analytic}});
    doc["results"] = res;
    emit(cmd, doc,
         [&](std::ostream& os) {
             os << "grid_var,grid_value,scheme,value,std_error,analytic\n";
             for (const auto& r : rows)
                 os << a.grid << ',' << num(r.g) << ',' << r.scheme << ',' << num(r.est.value) << ','
                    << num(r.est.std_error) << ',' << num(r.analytic) << '\n';
         },
         out);
}

struct GreeksArgs {
    MarketSpec m;
    HestonParams p;
    double f0 = 0.0;
    std::vector<std::string> methods{"pathwise-mixing", "finite-difference"};
    std::string grid = "f0";
    std::vector<double> values;
    std::int64_t n_t = 250;
    std::int64_t n_p = 100000;
    std::uint64_t seed = 7;
    bool correlation = false;
    std::string theta_form = "mechanical";
    double sigma = 0.2;
    bool richardson = false;
};

void do_greeks(const Command& cmd, GreeksArgs a, std::ostream& out) {
    if (a.f0 > 0.0) a.m.s0 = a.f0 * std::exp(-a.m.r * a.m.t);
    a.m.underlying_kind = UnderlyingKind::future;
    const auto values = a.values.empty() ? std::vector<double>{grid_default(a.grid, a.m, a.p)} : a.values;
    std::vector<greeks::GreekMethod> methods;
    for (const auto& s : a.methods) methods.push_back(greeks::parse_method(s));
    const auto theta_form = a.theta_form == "printed" ? greeks::ThetaAssembly::printed
                                                       : greeks::ThetaAssembly::mechanical;

    struct Row {
        double g;
        std::string greek;
        std::string method;
        greeks::GreekValue v;
    };
    std::vector<Row> rows;
    auto push_set = [&](double g, const greeks::GreekSet& s) {
        const auto name = greeks::to_string(s.method);
        const std::pair<const char*, const std::optional<greeks::GreekValue>*> items[] = {
            {"delta", &s.delta}, {"gamma", &s.gamma}, {"vega", &s.vega},
            {"theta", &s.theta}, {"rho", &s.rho}};
        for (const auto& [n, v] : items)
            if (v->has_value()) rows.push_back({g, n, name, **v});
    };

    for (double v : values) {
        auto m = a.m;
        auto p = a.p;
        apply_grid(a.grid, v, m, p);
        const SimConfig cfg{a.n_t, a.n_p, a.seed, Scheme::mixing};
        for (auto method : methods) {
            using greeks::GreekMethod;
            switch (method) {
                case GreekMethod::pathwise_mixing:
                    push_set(v, greeks::pathwise_greeks(m, p, cfg, theta_form));
                    if (a.correlation)
                        rows.push_back({v, "correlation", greeks::to_string(method),
                                        greeks::correlation_sensitivity(m, p, cfg).total});
                    break;
                case GreekMethod::finite_difference: {
                    greeks::FdSteps steps;
                    steps.richardson = a.richardson;
                    push_set(v, greeks::fd_greeks(m, p, steps));
                    if (a.correlation)
                        rows.push_back({v, "correlation", greeks::to_string(method),
                                        greeks::fd_correlation_sensitivity(m, p)});
                    break;
                }
                default: {
                    const auto flat = greeks::pw_lr_estimators(m, a.sigma, cfg);
                    const greeks::GreekSet* s = method == GreekMethod::pw   ? &flat.pw
                                                : method == GreekMethod::lr ? &flat.lr
                                                : method == GreekMethod::lr_pw ? &flat.lr_pw
                                                                               : &flat.pw_lr;
                    push_set(v, *s);
                }
            }
        }
    }

    auto doc = cmd.envelope();
    json res = json::array();
    for (const auto& r : rows)
        res.push_back({{"grid_var", a.grid}, {"grid_value", r.g}, {"greek", r.greek},
                       {"method", r.method}, {"value", r.v.value}, {"std_error", r.v.std_error},
                       {"reliable", r.v.reliable}});
    doc["results"] = res;
    emit(cmd, doc,
         [&](std::ostream& os) {
             os << "grid_var,grid_value,greek,method,value,std_error\n";
             for (const auto& r : rows)
                 os << a.grid << ',' << num(r.g) << ',' << r.greek << ',' << r.method << ','
                    << num(r.v.value) << ',' << num(r.v.std_error) << '\n';
         },
         out);
}

struct SmileArgs {
    MarketSpec m;
    HestonParams p;
    std::string sweep = "rho";
    std::vector<double> values;
    double k_min = 50.0;
    double k_max = 200.0;
    double k_step = 2.5;
    bool diagnostics = false;
};

std::vector<double> default_sweep(iv::SweepParam w) {
    switch (w) {
        case iv::SweepParam::rho: return {-0.5, -0.25, 0.0, 0.25, 0.5};
        case iv::SweepParam::eta: return {0.3, 0.6, 0.9, 1.2, 1.5};
        case iv::SweepParam::lam: return {0.1, 0.5, 0.9, 1.3, 1.7};
        case iv::SweepParam::v0:
        case iv::SweepParam::vbar: return {0.01, 0.07, 0.13, 0.19, 0.25};
    }
    return {};
}

void do_smile(const Command& cmd, const SmileArgs& a, std::ostream& out) {
    const auto which = iv::parse_sweep_param(a.sweep);
    const auto values = a.values.empty() ? default_sweep(which) : a.values;
    const auto strikes = iv::strike_grid(a.k_min, a.k_max, a.k_step);
    auto m = a.m;
    m.underlying_kind = UnderlyingKind::future;
    const auto sweep = iv::parameter_sweep(which, values, a.p, m, strikes);

    auto doc = cmd.envelope();
    doc["forward"] = m.forward();
    json curves = json::array();
    for (std::size_t c = 0; c < sweep.curves.size(); ++c) {
        const auto& d = sweep.diagnostics[c];
        curves.push_back({{"param_name", a.sweep},
                          {"param_value", d.param_value},
                          {"strikes", sweep.curves[c].strikes},
                          {"ivs", sweep.curves[c].ivs},
                          {"level", d.level},
                          {"argmin_strike", d.argmin_strike},
                          {"min_iv", d.min_iv},
                          {"curvature", d.curvature},
                          {"skew", d.skew}});
    }
    doc["results"] = curves;
    emit(cmd, doc,
         [&](std::ostream& os) {
             if (a.diagnostics) {
                 os << "param_name,param_value,level,argmin_strike,min_iv,curvature,skew\n";
                 for (const auto& d : sweep.diagnostics)
                     os << a.sweep << ',' << num(d.param_value) << ',' << num(d.level) << ','
                        << num(d.argmin_strike) << ',' << num(d.min_iv) << ',' << num(d.curvature)
                        << ',' << d.skew << '\n';
                 return;
             }
             os << "param_name,param_value,strike,iv\n";
             for (std::size_t c = 0; c < sweep.curves.size(); ++c)
                 for (std::size_t i = 0; i < strikes.size(); ++i)
                     os << a.sweep << ',' << num(sweep.diagnostics[c].param_value) << ','
                        << num(strikes[i]) << ',' << num(sweep.curves[c].ivs[i]) << '\n';
         },
         out);
}

struct CalibArgs {
    std::string chain;
    std::string meta;
    double close = 0.0;
    std::string trade_date;
    std::string expiry_date;
    double r = 0.036;
    std::string mode = "fix0";
    calib::CalibConfig cfg;
    std::string scaling = "box";
    calib::ModeOverrides overrides;
    std::vector<double> fix5{calib::kMeanFittedParams.v0, calib::kMeanFittedParams.vbar,
                             calib::kMeanFittedParams.lam, calib::kMeanFittedParams.eta,
                             calib::kMeanFittedParams.rho};
    std::string fit_csv;
};

void write_fit_csv(std::ostream& os, const calib::QuoteChain& chain, const calib::CalibResult& res) {
    os << "strike,market_iv,model_iv\n";
    for (std::size_t i = 0; i < chain.rows.size(); ++i)
        os << num(chain.rows[i].strike) << ',' << num(chain.rows[i].iv) << ','
           << num(res.fitted_ivs[i]) << '\n';
}

void do_calibrate(const Command& cmd, CalibArgs a, std::ostream& out) {
    calib::ChainMeta meta;
    if (!a.meta.empty()) {
        meta = calib::load_meta(a.meta);
    } else {
        if (a.trade_date.empty() || a.expiry_date.empty() || !(a.close > 0.0))
            throw InputError("calibrate needs --meta or all of --close, --trade-date, --expiry-date");
        meta.r = a.r;
    }
    // Explicit flags override the sidecar.
    if (a.close > 0.0) meta.close = a.close;
    if (!a.trade_date.empty()) meta.trade_date = calib::parse_date(a.trade_date);
    if (!a.expiry_date.empty()) meta.expiry_date = calib::parse_date(a.expiry_date);
    if (a.meta.empty() || cmd.app()->get_option("--r")->count() > 0) meta.r = a.r;

    calib::CleaningStats stats;
    const auto chain = calib::load_chain(a.chain, meta, &stats);
    if (a.fix5.size() != 5) throw InputError("--fix5 takes five values: v0,vbar,lam,eta,rho");
    a.overrides.fix5_params = {a.fix5[0], a.fix5[1], a.fix5[2], a.fix5[3], a.fix5[4]};
    a.cfg.scaling = a.scaling == "raw" ? calib::StepScaling::raw : calib::StepScaling::box;
    const auto mode = calib::parse_mode(a.mode);
    const auto res = calib::calibrate_modes(chain, mode, a.cfg, a.overrides);

    auto doc = cmd.envelope();
    doc["chain"] = {{"close", chain.close},
                    {"trade_date", calib::format_date(chain.trade_date)},
                    {"expiry_date", calib::format_date(chain.expiry_date)},
                    {"r", chain.r},
                    {"t", chain.t},
                    {"strikes", chain.rows.size()},
                    {"rows_read", stats.rows_read},
                    {"dropped_missing", stats.dropped_missing},
                    {"dropped_near_zero", stats.dropped_near_zero}};
    const auto pv = calib::to_vector(res.params);
    json params, fixed;
    for (std::size_t i = 0; i < calib::kParamCount; ++i) {
        params[calib::param_name(i)] = pv[i];
        fixed[calib::param_name(i)] = static_cast<bool>(res.fixed[i]);
    }
    doc["params"] = params;
    doc["fixed"] = fixed;
    doc["loss"] = res.loss;
    doc["feller_ratio"] = res.params.feller_ratio();
    doc["iterations"] = res.iterations;
    doc["best_iteration"] = res.best_iteration;
    doc["loss_trace"] = res.loss_trace;
    json fitted = json::array();
    for (std::size_t i = 0; i < chain.rows.size(); ++i)
        fitted.push_back({{"strike", chain.rows[i].strike},
                          {"x", chain.rows[i].x},
                          {"market_iv", chain.rows[i].iv},
                          {"model_iv", res.fitted_ivs[i]}});
    doc["fitted"] = fitted;

    if (!a.fit_csv.empty()) {
        std::ofstream f(a.fit_csv);
        if (!f) throw InputError("cannot write " + a.fit_csv);
        write_fit_csv(f, chain, res);
    }
    emit(cmd, doc, [&](std::ostream& os) { write_fit_csv(os, chain, res); }, out);
}

struct ConvergenceArgs {
    MarketSpec m;
    HestonParams p;
    std::string style = "call";
    int reps = 50;
    std::vector<std::int64_t> n_p{100, 1000, 10000};
    std::int64_t n_t = 1000;
    std::uint64_t seed = 7;
};

void do_convergence(const Command& cmd, ConvergenceArgs a, std::ostream& out) {
    a.m.style = style_of(a.style);
    const auto rows = mc::convergence_study(a.m, a.p, a.n_p, a.reps, a.n_t, a.seed);
    auto doc = cmd.envelope();
    doc["analytic"] = analytic::price(a.m, a.p).value;
    json res = json::array();
    for (const auto& r : rows)
        res.push_back({{"n_p", r.n_p}, {"err_crude", r.err_crude}, {"err_mixing", r.err_mixing}});
    doc["results"] = res;
    emit(cmd, doc,
         [&](std::ostream& os) {
             os << "n_p,err_crude,err_mixing\n";
             for (const auto& r : rows)
                 os << r.n_p << ',' << num(r.err_crude) << ',' << num(r.err_mixing) << '\n';
         },
         out);
}

class ThreadScope {
public:
    explicit ThreadScope(unsigned n) : active_(n > 0) {
        if (active_) set_thread_count(n);
    }
    ~ThreadScope() {
        if (active_) set_thread_count(0);
    }
    ThreadScope(const ThreadScope&) = delete;
    ThreadScope& operator=(const ThreadScope&) = delete;

private:
    bool active_;
};

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Heston pricing, simulation, Greeks, smiles and calibration", "hestonlab"};
    app.require_subcommand(1);

    PriceArgs price;
    Command price_cmd(app, "price", "Semi-analytic European price");
    price_cmd.model_options(price.m, price.p, &price.style);

    SimArgs sim;
    Command sim_cmd(app, "simulate", "Crude and mixing Monte Carlo prices");
    sim_cmd.model_options(sim.m, sim.p, &sim.style);
    sim_cmd.option("scheme", sim.scheme, "crude, mixing or both")
        ->check(CLI::IsMember({"crude", "mixing", "both"}));
    sim_cmd.option("nt", sim.n_t, "Time steps");
    sim_cmd.option("np", sim.n_p, "Paths");
    sim_cmd.option("seed", sim.seed, "Generator seed");
    sim_cmd.option("grid", sim.grid, "Grid variable: s0, f0, v0 or k")
        ->check(CLI::IsMember({"s0", "f0", "v0", "k"}));
    sim_cmd.option("values", sim.values, "Comma-separated grid values")->delimiter(',');

    GreeksArgs gk;
    Command gk_cmd(app, "greeks", "Pathwise, finite-difference and flat-vol Greek estimators");
    gk_cmd.model_options(gk.m, gk.p, nullptr);
    gk_cmd.option("f0", gk.f0, "Futures level; overrides --s0 when positive");
    gk_cmd.option("methods", gk.methods,
                  "pathwise-mixing, finite-difference, pw, lr, lr-pw, pw-lr")
        ->delimiter(',');
    gk_cmd.option("grid", gk.grid, "Grid variable: f0, s0, v0 or k")
        ->check(CLI::IsMember({"s0", "f0", "v0", "k"}));
    gk_cmd.option("values", gk.values, "Comma-separated grid values")->delimiter(',');
    gk_cmd.option("nt", gk.n_t, "Time steps");
    gk_cmd.option("np", gk.n_p, "Paths");
    gk_cmd.option("seed", gk.seed, "Generator seed");
    gk_cmd.flag("correlation", gk.correlation, "Also estimate dc/drho (correlation)");
    gk_cmd.option("theta-form", gk.theta_form, "mechanical or printed")
        ->check(CLI::IsMember({"mechanical", "printed"}));
    gk_cmd.option("sigma", gk.sigma, "Flat volatility for pw/lr estimators");
    gk_cmd.flag("richardson", gk.richardson, "Richardson-extrapolate finite differences");

    SmileArgs sm;
    Command sm_cmd(app, "smile", "Implied-volatility smiles under a one-parameter sweep");
    sm_cmd.model_options(sm.m, sm.p, nullptr);
    sm_cmd.option("sweep", sm.sweep, "rho, eta, lam, v0 or vbar")
        ->check(CLI::IsMember({"rho", "eta", "lam", "v0", "vbar"}));
    sm_cmd.option("values", sm.values, "Comma-separated sweep values")->delimiter(',');
    sm_cmd.option("kmin", sm.k_min, "Lowest strike");
    sm_cmd.option("kmax", sm.k_max, "Highest strike");
    sm_cmd.option("kstep", sm.k_step, "Strike spacing");
    sm_cmd.flag("diagnostics", sm.diagnostics, "Emit level/argmin/curvature rows instead of curves");

    CalibArgs ca;
    Command ca_cmd(app, "calibrate", "Gradient-descent calibration to an option chain");
    ca_cmd.option("chain", ca.chain, "Chain CSV with Strike and IV columns")->required();
    ca_cmd.option("meta", ca.meta, "JSON sidecar with close, trade_date, expiry_date, r");
    ca_cmd.option("close", ca.close, "Underlying close");
    ca_cmd.option("trade-date", ca.trade_date, "YYYY-MM-DD");
    ca_cmd.option("expiry-date", ca.expiry_date, "YYYY-MM-DD");
    ca_cmd.option("r", ca.r, "Risk-free rate");
    ca_cmd.option("mode", ca.mode, "fix0, fix2 or fix5")->check(CLI::IsMember({"fix0", "fix2", "fix5"}));
    ca_cmd.params(ca.cfg.initial);
    ca_cmd.option("iterations", ca.cfg.iterations, "Descent iterations");
    ca_cmd.option("epsilon", ca.cfg.epsilon, "Finite-difference step");
    ca_cmd.option("lr0", ca.cfg.initial_learning_rate, "Initial learning rate");
    ca_cmd.option("deno", ca.cfg.learn_deno, "Learning-rate denominator offset");
    ca_cmd.option("decay", ca.cfg.decay_level, "Learning-rate decay exponent");
    ca_cmd.option("scaling", ca.scaling, "box or raw step scaling")->check(CLI::IsMember({"box", "raw"}));
    ca_cmd.option("vbar-fixed", ca.overrides.vbar_fixed, "vbar held fixed in fix2");
    ca_cmd.option("lam-fixed", ca.overrides.lam_fixed, "lam held fixed in fix2");
    ca_cmd.option("fix5", ca.fix5, "v0,vbar,lam,eta,rho used by fix5")->delimiter(',');
    ca_cmd.option("fit-csv", ca.fit_csv, "Also write strike,market_iv,model_iv here");
    ca_cmd.app()->get_option("--format")->default_val("json");

    ConvergenceArgs cv;
    Command cv_cmd(app, "convergence", "Mean absolute MC error against the analytic price");
    cv_cmd.model_options(cv.m, cv.p, &cv.style);
    cv_cmd.app()->get_option("--style")->check(CLI::IsMember({"call", "put"}));
    cv_cmd.option("reps", cv.reps, "Replications per path count");
    cv_cmd.option("np", cv.n_p, "Comma-separated path counts")->delimiter(',');
    cv_cmd.option("nt", cv.n_t, "Time steps");
    cv_cmd.option("seed", cv.seed, "Generator seed");

    std::vector<std::string> args;
    try {
        args = expand_config(raw_args);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return kInputError;
    }

    const Command* cmds[] = {&price_cmd, &sim_cmd, &gk_cmd, &sm_cmd, &ca_cmd, &cv_cmd};
    const Command* active = nullptr;
    for (const auto* c : cmds)
        if (c->app()->parsed()) active = c;

    try {
        ThreadScope threads(active->threads());
        if (active == &price_cmd) do_price(price_cmd, price, out);
        else if (active == &sim_cmd) do_simulate(sim_cmd, sim, out);
        else if (active == &gk_cmd) do_greeks(gk_cmd, gk, out);
        else if (active == &sm_cmd) do_smile(sm_cmd, sm, out);
        else if (active == &ca_cmd) do_calibrate(ca_cmd, ca, out);
        else do_convergence(cv_cmd, cv, out);
    } catch (const iv::OutOfBandError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumericalError;
    } catch (const analytic::QuadratureError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumericalError;
    } catch (const calib::CalibrationError& e) {
        err << "numerical error: " << e.what() << " (trace of " << e.trace().size()
            << " losses)\n";
        return kNumericalError;
    } catch (const calib::ChainError& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::invalid_argument& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumericalError;
    }
    return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv, argv + argc);
    if (args.empty()) args.emplace_back("hestonlab");
    return run(args, out, err);
}

}  // namespace hestonlab::cli
