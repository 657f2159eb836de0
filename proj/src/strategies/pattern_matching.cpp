#include <algorithm>
#include <cmath>

#include "rankfolio/classic.h"
#include "rankfolio/kernels.h"

namespace rankfolio {

namespace {

// Flattened window of `window` relatives ending at `end_day`, oldest first.
void append_window(const HistoryView& h, std::size_t end_day, std::size_t window, std::vector<double>& out) {
    for (std::size_t d = end_day + 1 - window; d <= end_day; ++d) {
        for (std::size_t j = 0; j < h.assets(); ++j) out.push_back(h.relative(d, j));
    }
}

// Candidate windows end at days [window, t - 1] so each has an observed successor.
std::vector<double> candidate_windows(const HistoryView& h, std::size_t window, std::size_t& count) {
    const std::size_t t = h.last();
    count = t > window ? t - window : 0;
    std::vector<double> rows;
    rows.reserve(count * window * h.assets());
    for (std::size_t s = window; s + 1 <= t; ++s) append_window(h, s, window, rows);
    return rows;
}

}  // namespace

std::vector<PatternMatch> nearest_patterns(const HistoryView& h, std::size_t window, std::size_t k) {
    const std::size_t t = h.last();
    if (window == 0 || k == 0 || t < k + window) throw std::out_of_range("bnn: not enough history");
    std::size_t count = 0;
    const auto rows = candidate_windows(h, window, count);
    std::vector<double> query;
    append_window(h, t, window, query);
    std::vector<double> dist(count);
    kernels::squared_distances(rows, query.size(), query, dist);

    std::vector<PatternMatch> all(count);
    for (std::size_t c = 0; c < count; ++c) all[c] = PatternMatch{window + c, dist[c]};
    auto closer = [](const PatternMatch& a, const PatternMatch& b) {
        return a.score < b.score || (a.score == b.score && a.end_day < b.end_day);
    };
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);
    all.resize(k);
    return all;
}

std::vector<PatternMatch> correlated_patterns(const HistoryView& h, std::size_t window, double rho) {
    const std::size_t t = h.last();
    if (window == 0 || t < window + 1) return {};
    std::size_t count = 0;
    const auto rows = candidate_windows(h, window, count);
    std::vector<double> query;
    append_window(h, t, window, query);
    std::vector<double> corr(count);
    kernels::row_correlations(rows, query.size(), query, corr);

    std::vector<PatternMatch> out;
    for (std::size_t c = 0; c < count; ++c) {
        if (corr[c] >= rho) out.push_back(PatternMatch{window + c, corr[c]});
    }
    return out;
}

WeightVector successor_log_optimal(const HistoryView& h, const std::vector<PatternMatch>& matches) {
    if (matches.empty()) return uniform_weights(h.assets());
    std::vector<PatternMatch> ordered = matches;
    std::sort(ordered.begin(), ordered.end(),
              [](const PatternMatch& a, const PatternMatch& b) { return a.end_day < b.end_day; });
    std::vector<double> x;
    x.reserve(ordered.size() * h.assets());
    for (const auto& m : ordered) {
        for (std::size_t j = 0; j < h.assets(); ++j) x.push_back(h.relative(m.end_day + 1, j));
    }
    return log_optimal_portfolio(x, h.assets()).weights;
}

WeightVector NearestNeighborLogOptimal::next(const HistoryView& h) {
    if (h.last() < k_ + window_) return uniform_weights(h.assets());
    return successor_log_optimal(h, nearest_patterns(h, window_, k_));
}

WeightVector CorrelationDrivenLogOptimal::next(const HistoryView& h) {
    return successor_log_optimal(h, correlated_patterns(h, window_, rho_));
}

}  // namespace rankfolio
