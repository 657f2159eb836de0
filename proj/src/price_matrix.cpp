#include "rankfolio/price_matrix.h"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace rankfolio {

namespace {

std::string describe(const std::string& what, std::size_t row, const std::string& column) {
    std::string msg = what;
    if (row > 0) msg += " at row " + std::to_string(row);
    if (!column.empty()) msg += ", column '" + column + "'";
    return msg;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_number(const std::string& field, std::size_t row, const std::string& column) {
    if (field.empty()) throw DataError("missing value", row, column);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size() || errno == ERANGE) {
        throw DataError("unparseable number '" + field + "'", row, column);
    }
    return v;
}

std::string format_price(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

DataError::DataError(const std::string& what, std::size_t row, std::string column)
    : std::runtime_error(describe(what, row, column)), row_(row), column_(std::move(column)) {}

PriceMatrix::PriceMatrix(std::vector<Date> dates, std::vector<std::string> assets,
                         std::vector<double> prices_row_major)
    : dates_(std::move(dates)), assets_(std::move(assets)), prices_(std::move(prices_row_major)) {
    if (assets_.empty()) throw DataError("price matrix has no asset columns");
    if (prices_.size() != dates_.size() * assets_.size()) {
        throw DataError("price grid size does not match dates x assets");
    }
    std::set<std::string> seen;
    for (const auto& a : assets_) {
        if (a.empty()) throw DataError("empty asset symbol");
        if (!seen.insert(a).second) throw DataError("duplicate asset symbol", 0, a);
    }
    for (std::size_t i = 0; i < dates_.size(); ++i) {
        if (i > 0 && !(dates_[i - 1] < dates_[i])) {
            throw DataError("dates not strictly increasing: " + dates_[i].to_string(), i + 2);
        }
        for (std::size_t j = 0; j < assets_.size(); ++j) {
            const double p = prices_[i * assets_.size() + j];
            if (!std::isfinite(p)) throw DataError("non-finite price", i + 2, assets_[j]);
            if (p <= 0.0) throw DataError("non-positive price", i + 2, assets_[j]);
        }
    }
}

PriceMatrix PriceMatrix::slice(std::size_t first, std::size_t last) const {
    if (first > last || last >= days()) throw std::out_of_range("PriceMatrix::slice: bad row range");
    std::vector<Date> d(dates_.begin() + static_cast<std::ptrdiff_t>(first),
                        dates_.begin() + static_cast<std::ptrdiff_t>(last + 1));
    std::vector<double> p(prices_.begin() + static_cast<std::ptrdiff_t>(first * assets()),
                          prices_.begin() + static_cast<std::ptrdiff_t>((last + 1) * assets()));
    return PriceMatrix(std::move(d), assets_, std::move(p));
}

PriceMatrix PriceMatrix::permute_assets(std::span<const std::size_t> order) const {
    if (order.size() != assets()) throw std::invalid_argument("permute_assets: wrong order length");
    std::vector<std::string> a;
    std::vector<double> p(prices_.size());
    for (std::size_t k = 0; k < order.size(); ++k) a.push_back(assets_.at(order[k]));
    for (std::size_t i = 0; i < days(); ++i) {
        for (std::size_t k = 0; k < order.size(); ++k) p[i * assets() + k] = price(i, order[k]);
    }
    return PriceMatrix(dates_, std::move(a), std::move(p));
}

HistoryView::HistoryView(const PriceMatrix& prices, std::size_t last) : prices_(&prices), last_(last) {
    if (last >= prices.days()) throw std::out_of_range("HistoryView: last row beyond matrix");
}

void HistoryView::check(std::size_t day) const {
    if (day > last_) {
        throw std::out_of_range("HistoryView: row " + std::to_string(day) + " is after the decision day " +
                                std::to_string(last_));
    }
}

double HistoryView::price(std::size_t day, std::size_t asset) const {
    check(day);
    return prices_->price(day, asset);
}

std::span<const double> HistoryView::row(std::size_t day) const {
    check(day);
    return prices_->row(day);
}

double HistoryView::relative(std::size_t day, std::size_t asset) const {
    check(day);
    if (day == 0) throw std::out_of_range("HistoryView: no price relative for row 0");
    return prices_->price(day, asset) / prices_->price(day - 1, asset);
}

std::vector<double> HistoryView::relatives(std::size_t day) const {
    std::vector<double> x(assets());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = relative(day, j);
    return x;
}

PriceMatrix parse_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split_fields(line);
            break;
        }
    }
    if (header.size() < 2) throw DataError(source + ": header must name a date column and at least one asset");
    std::vector<std::string> assets(header.begin() + 1, header.end());

    struct Row {
        Date date;
        std::size_t line;
        std::vector<double> values;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw DataError(source + ": ragged row (" + std::to_string(fields.size()) + " fields, expected " +
                                std::to_string(header.size()) + ")",
                            line_no);
        }
        Row r;
        r.line = line_no;
        try {
            r.date = Date::parse(fields[0]);
        } catch (const std::invalid_argument& e) {
            throw DataError(source + ": " + e.what(), line_no, header[0]);
        }
        r.values.reserve(assets.size());
        for (std::size_t j = 0; j < assets.size(); ++j) {
            const double v = parse_number(fields[j + 1], line_no, assets[j]);
            if (!std::isfinite(v)) throw DataError(source + ": non-finite price", line_no, assets[j]);
            if (v <= 0.0) throw DataError(source + ": non-positive price", line_no, assets[j]);
            r.values.push_back(v);
        }
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw DataError(source + ": no data rows");

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date) {
            throw DataError(source + ": duplicate date " + rows[i].date.to_string(), rows[i].line, header[0]);
        }
    }

    std::vector<Date> dates;
    std::vector<double> prices;
    dates.reserve(rows.size());
    prices.reserve(rows.size() * assets.size());
    for (auto& r : rows) {
        dates.push_back(r.date);
        prices.insert(prices.end(), r.values.begin(), r.values.end());
    }
    return PriceMatrix(std::move(dates), std::move(assets), std::move(prices));
}

PriceMatrix load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open price file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), path.string());
}

std::string format_csv(const PriceMatrix& prices) {
    std::string out = "date";
    for (const auto& a : prices.symbols()) out += "," + a;
    out += "\n";
    for (std::size_t i = 0; i < prices.days(); ++i) {
        out += prices.dates()[i].to_string();
        for (double p : prices.row(i)) out += "," + format_price(p);
        out += "\n";
    }
    return out;
}

void write_csv(const PriceMatrix& prices, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write price file '" + path.string() + "'");
    out << format_csv(prices);
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

ReturnVector returns_at(const PriceMatrix& prices, std::size_t t) {
    if (t + 1 >= prices.days()) {
        throw std::out_of_range("returns_at: day " + std::to_string(t) + " has no following price (T = " +
                                std::to_string(prices.days()) + ")");
    }
    ReturnVector r(prices.assets());
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = prices.price(t + 1, j) / prices.price(t, j) - 1.0;
    return r;
}

namespace {

double interpolated_quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

}  // namespace

std::vector<ReturnStats> summary_stats(const PriceMatrix& prices) {
    if (prices.days() < 2) throw DataError("summary statistics need at least 2 days of prices");
    const std::size_t count = prices.days() - 1;
    std::vector<ReturnStats> out;
    std::vector<double> r(count);
    for (std::size_t j = 0; j < prices.assets(); ++j) {
        for (std::size_t t = 0; t < count; ++t) r[t] = prices.price(t + 1, j) / prices.price(t, j) - 1.0;
        ReturnStats s;
        s.asset = prices.symbols()[j];
        s.count = count;
        s.mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(count);
        double ss = 0.0;
        for (double v : r) ss += (v - s.mean) * (v - s.mean);
        s.std = count > 1 ? std::sqrt(ss / static_cast<double>(count - 1))
                          : std::numeric_limits<double>::quiet_NaN();
        std::vector<double> sorted = r;
        std::sort(sorted.begin(), sorted.end());
        s.min = sorted.front();
        s.max = sorted.back();
        s.q25 = interpolated_quantile(sorted, 0.25);
        s.median = interpolated_quantile(sorted, 0.50);
        s.q75 = interpolated_quantile(sorted, 0.75);
        out.push_back(s);
    }
    return out;
}

PriceMatrix merge_on_common_dates(std::span<const PriceMatrix> parts) {
    if (parts.empty()) throw DataError("nothing to merge");
    std::map<Date, std::size_t> hits;
    for (const auto& p : parts) {
        for (const auto& d : p.dates()) ++hits[d];
    }
    std::vector<Date> common;
    for (const auto& [d, c] : hits) {
        if (c == parts.size()) common.push_back(d);
    }
    if (common.empty()) throw DataError("price files share no common dates");

    std::vector<std::string> assets;
    for (const auto& p : parts) assets.insert(assets.end(), p.symbols().begin(), p.symbols().end());

    std::vector<double> grid(common.size() * assets.size());
    std::size_t col0 = 0;
    for (const auto& p : parts) {
        std::size_t i = 0;
        for (std::size_t row = 0; row < p.days() && i < common.size(); ++row) {
            if (p.dates()[row] != common[i]) continue;
            for (std::size_t j = 0; j < p.assets(); ++j) grid[i * assets.size() + col0 + j] = p.price(row, j);
            ++i;
        }
        col0 += p.assets();
    }
    return PriceMatrix(std::move(common), std::move(assets), std::move(grid));
}

}  // namespace rankfolio
