// Writes the synthetic option-chain fixtures under data/fixtures: five expiries
// on each of three trade dates, IVs generated from the reference parameter set
// and printed the way a quote page would show them. One later-dated chain on
// the July expiry carries a single outlier quote.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <span>
#include <string>
#include <vector>

#include "hestonlab/calibration.hpp"
#include "hestonlab/implied_vol.hpp"

namespace calib = hestonlab::calib;

namespace {

struct Day {
    const char* date;
    double close;
};

constexpr Day kDays[] = {{"2024-04-24", 82.81}, {"2024-04-25", 83.57}, {"2024-04-26", 83.85}};
constexpr const char* kExpiries[] = {"2024-06-14", "2024-07-17", "2024-08-15", "2024-09-17",
                                     "2024-10-17"};

std::string fixed(double v, int digits) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void write_chain(const std::filesystem::path& dir, const Day& day, const char* expiry,
                 std::span<const double> strikes, int outlier = -1) {
    calib::ChainMeta meta;
    meta.close = day.close;
    meta.trade_date = calib::parse_date(day.date);
    meta.expiry_date = calib::parse_date(expiry);
    meta.r = 0.036;
    const auto chain = calib::synthetic_chain(calib::kMeanFittedParams, strikes, meta);

    const std::string stem = std::string("wti_") + day.date + "_exp_" + expiry;
    calib::save_meta(dir / (stem + ".json"), meta);
    std::ofstream out(dir / (stem + ".csv"));
    out << "Strike,Open,High,Low,Last,Change,Bid,Ask,Volume,Open Int,IV,Time\n";
    auto quote = [&](double strike, bool call, double iv) {
        out << '"' << fixed(strike, 2) << (call ? 'C' : 'P') << "\",N/A,N/A,N/A,"
            << "unch,unch,N/A,N/A,0,0," << fixed(100.0 * iv, 2) << "%," << day.date << '\n';
    };
    for (std::size_t i = 0; i < chain.rows.size(); ++i) {
        const auto& row = chain.rows[i];
        const bool call = row.strike >= day.close;
        quote(row.strike, call, static_cast<int>(i) == outlier ? row.iv + 0.12 : row.iv);
        // A far strike with a stale zero quote, and a duplicate
        // strike quoted on the other side, as quote pages show them.
        if (i == 0) quote(55.0, false, 0.0);
        if (i == chain.rows.size() / 2) quote(row.strike, !call, row.iv);
    }
    out << "\"112.50C\",N/A,N/A,N/A,unch,unch,N/A,N/A,0,0,N/A," << day.date << '\n';
    std::cout << (dir / (stem + ".csv")).string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? argv[1] : "data/fixtures";
    std::filesystem::create_directories(dir);
    const auto strikes = hestonlab::iv::strike_grid(60.0, 110.0, 2.5);

    for (const auto& day : kDays)
        for (const char* expiry : kExpiries) write_chain(dir, day, expiry, strikes);
    write_chain(dir, Day{"2024-05-10", 78.26}, "2024-07-17", strikes, 3);
    return 0;
}
