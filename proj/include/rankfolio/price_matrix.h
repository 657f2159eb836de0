#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rankfolio/date.h"

namespace rankfolio {

using ReturnVector = std::vector<double>;

// Raised for malformed or invalid price data. Row numbers are 1-based file
// lines (header = line 1); an empty column means the error is row-wide.
class DataError : public std::runtime_error {
public:
    DataError(const std::string& what, std::size_t row = 0, std::string column = {});

    std::size_t row() const { return row_; }
    const std::string& column() const { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

// T x n grid of strictly positive daily close prices. Immutable once
// constructed; every constructor path validates the invariants.
class PriceMatrix {
public:
    PriceMatrix() = default;
    // Rows must already be strictly increasing by date.
    PriceMatrix(std::vector<Date> dates, std::vector<std::string> assets,
                std::vector<double> prices_row_major);

    std::size_t days() const { return dates_.size(); }
    std::size_t assets() const { return assets_.size(); }

    const std::vector<Date>& dates() const { return dates_; }
    const std::vector<std::string>& symbols() const { return assets_; }

    double price(std::size_t day, std::size_t asset) const {
        return prices_[day * assets_.size() + asset];
    }
    std::span<const double> row(std::size_t day) const {
        return {prices_.data() + day * assets_.size(), assets_.size()};
    }

    // Rows [first, last] inclusive.
    PriceMatrix slice(std::size_t first, std::size_t last) const;
    // Reorders asset columns: column k of the result is column order[k] of this.
    PriceMatrix permute_assets(std::span<const std::size_t> order) const;

    bool operator==(const PriceMatrix&) const = default;

private:
    std::vector<Date> dates_;
    std::vector<std::string> assets_;
    std::vector<double> prices_;
};

// Read-only window onto rows [0, last] of a price matrix. Strategies only
// ever see history through this view, so reading a future row throws.
class HistoryView {
public:
    HistoryView(const PriceMatrix& prices, std::size_t last);

    std::size_t last() const { return last_; }
    std::size_t assets() const { return prices_->assets(); }

    double price(std::size_t day, std::size_t asset) const;
    std::span<const double> row(std::size_t day) const;
    // Price relative p[day] / p[day - 1]; requires 1 <= day <= last.
    double relative(std::size_t day, std::size_t asset) const;
    std::vector<double> relatives(std::size_t day) const;

private:
    void check(std::size_t day) const;

    const PriceMatrix* prices_;
    std::size_t last_;
};

// CSV with header `date,<SYM1>,...`. Rows may appear in any date order; the
// result is sorted ascending.
PriceMatrix load_csv(const std::filesystem::path& path);
PriceMatrix parse_csv(const std::string& text, const std::string& source = "<memory>");

// 12 significant digits, ISO dates, '\n' line endings.
void write_csv(const PriceMatrix& prices, const std::filesystem::path& path);
std::string format_csv(const PriceMatrix& prices);

// Simple returns realized from day t to day t+1 (0-based): p[t+1]/p[t] - 1.
ReturnVector returns_at(const PriceMatrix& prices, std::size_t t);

struct ReturnStats {
    std::string asset;
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation (divisor count - 1)
    double min = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double max = 0.0;
};

// Per-asset daily-return statistics. Quantiles use linear interpolation
// between order statistics at position q * (count - 1).
std::vector<ReturnStats> summary_stats(const PriceMatrix& prices);

// Inner join of several matrices on their common dates; asset columns are
// concatenated in argument order. Symbols must be distinct.
PriceMatrix merge_on_common_dates(std::span<const PriceMatrix> parts);

}  // namespace rankfolio
