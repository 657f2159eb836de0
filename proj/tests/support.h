#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "rankfolio/price_matrix.h"

namespace rankfolio::test {

// Geometric random walk, one row per calendar day from 2020-01-01. Prices
// are rounded to 12 significant digits so they survive a CSV round trip.
inline PriceMatrix random_prices(std::size_t days, std::size_t assets, std::uint64_t seed, double vol = 0.03,
                                 double drift = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(drift, vol);
    std::vector<Date> dates;
    const auto d0 = Date{2020, 1, 1}.to_days();
    for (std::size_t i = 0; i < days; ++i) dates.push_back(Date::from_days(d0 + static_cast<std::int64_t>(i)));
    std::vector<std::string> syms;
    for (std::size_t j = 0; j < assets; ++j) syms.push_back("A" + std::to_string(j));
    std::vector<double> p(days * assets);
    std::vector<double> level(assets);
    for (std::size_t j = 0; j < assets; ++j) level[j] = 10.0 + 90.0 * std::uniform_real_distribution<double>(0, 1)(rng);
    for (std::size_t i = 0; i < days; ++i) {
        for (std::size_t j = 0; j < assets; ++j) {
            if (i > 0) level[j] *= std::exp(z(rng));
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.12g", level[j]);
            p[i * assets + j] = std::strtod(buf, nullptr);
        }
    }
    return PriceMatrix(std::move(dates), std::move(syms), std::move(p));
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("rankfolio_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace rankfolio::test
