#include "rankfolio/features.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rankfolio {

TargetSpec TargetSpec::parse(const std::string& text) {
    if (text == "return") return TargetSpec{Mode::Return, 1};
    std::size_t used = 0;
    int p = 0;
    try {
        p = std::stoi(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty() || p < 1) {
        throw std::invalid_argument("invalid rank power '" + text + "' (expected 'return' or a positive integer)");
    }
    return TargetSpec{Mode::Rank, p};
}

std::string TargetSpec::to_string() const { return mode == Mode::Return ? "return" : std::to_string(power); }

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double pearson_or_zero(std::span<const double> a, std::span<const double> b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("spearman: need two equal-length series");
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    return pearson_or_zero(ra, rb);
}

std::vector<double> compute_features(const HistoryView& h, std::size_t t, const FeatureOptions& opt) {
    const std::size_t w = opt.window;
    if (w < 2) throw std::invalid_argument("compute_features: window must be at least 2");
    if (t < w || t > h.last()) {
        throw std::out_of_range("compute_features: day " + std::to_string(t) + " needs " + std::to_string(w) +
                                " prior days");
    }
    const std::size_t n = h.assets();
    std::vector<double> f(4 * n);
    std::vector<double> rets(w), prices(w), index(w);
    std::iota(index.begin(), index.end(), 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < w; ++k) {
            const std::size_t s = t + 1 - w + k;
            rets[k] = h.price(s, j) / h.price(s - 1, j) - 1.0;
            prices[k] = h.price(s, j);
        }
        const double mean = std::accumulate(rets.begin(), rets.end(), 0.0) / static_cast<double>(w);
        double ss = 0.0;
        for (double r : rets) ss += (r - mean) * (r - mean);
        const double vol = std::sqrt(ss / static_cast<double>(w - 1));

        f[j] = rets.back();
        f[n + j] = vol;
        f[2 * n + j] = vol > 0.0 ? mean / vol : 0.0;
        f[3 * n + j] = opt.trend == TrendMeasure::PriceSpearman ? spearman(index, prices) : spearman(index, rets);
    }
    return f;
}

std::vector<double> compute_features(const PriceMatrix& prices, std::size_t t, const FeatureOptions& opt) {
    return compute_features(HistoryView(prices, t), t, opt);
}

std::vector<double> rank_transform(std::span<const double> returns, int power) {
    if (power < 1) throw std::invalid_argument("rank_transform: power must be >= 1");
    std::vector<std::size_t> idx(returns.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return returns[a] < returns[b]; });
    std::vector<double> out(returns.size());
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
        const double rank = static_cast<double>(pos + 1);
        double v = 1.0;
        for (int p = 0; p < power; ++p) v *= rank;
        out[idx[pos]] = v;
    }
    return out;
}

std::vector<double> make_target(std::span<const double> returns, const TargetSpec& spec) {
    if (spec.mode == TargetSpec::Mode::Return) return {returns.begin(), returns.end()};
    return rank_transform(returns, spec.power);
}

TrainingSet build_training_set(const HistoryView& h, std::size_t lookback, const TargetSpec& target,
                               const FeatureOptions& opt) {
    const std::size_t t = h.last();
    if (lookback == 0) throw std::invalid_argument("build_training_set: lookback must be >= 1");
    if (t < lookback + opt.window) {
        throw std::out_of_range("build_training_set: day " + std::to_string(t) + " needs " +
                                std::to_string(lookback + opt.window) + " prior days");
    }
    const std::size_t n = h.assets();
    TrainingSet ts;
    ts.rows = lookback;
    ts.feature_dim = 4 * n;
    ts.target_dim = n;
    ts.first_day = t - lookback;
    ts.features.reserve(ts.rows * ts.feature_dim);
    ts.targets.reserve(ts.rows * n);
    std::vector<double> r(n);
    for (std::size_t s = t - lookback; s < t; ++s) {
        const auto f = compute_features(h, s, opt);
        ts.features.insert(ts.features.end(), f.begin(), f.end());
        for (std::size_t j = 0; j < n; ++j) r[j] = h.price(s + 1, j) / h.price(s, j) - 1.0;
        const auto b = make_target(r, target);
        ts.targets.insert(ts.targets.end(), b.begin(), b.end());
    }
    return ts;
}

TrainingSet build_training_set(const PriceMatrix& prices, std::size_t t, std::size_t lookback,
                               const TargetSpec& target, const FeatureOptions& opt) {
    return build_training_set(HistoryView(prices, t), lookback, target, opt);
}

Normalizer Normalizer::fit(std::span<const double> rows, std::size_t dim) {
    if (dim == 0 || rows.empty() || rows.size() % dim != 0) throw std::invalid_argument("Normalizer::fit: bad shape");
    const std::size_t count = rows.size() / dim;
    Normalizer nz;
    nz.mean.assign(dim, 0.0);
    nz.std.assign(dim, 0.0);
    for (std::size_t r = 0; r < count; ++r) {
        for (std::size_t i = 0; i < dim; ++i) nz.mean[i] += rows[r * dim + i];
    }
    for (double& m : nz.mean) m /= static_cast<double>(count);
    for (std::size_t r = 0; r < count; ++r) {
        for (std::size_t i = 0; i < dim; ++i) {
            const double d = rows[r * dim + i] - nz.mean[i];
            nz.std[i] += d * d;
        }
    }
    for (double& s : nz.std) s = std::max(std::sqrt(s / static_cast<double>(count)), kStdFloor);
    return nz;
}

std::vector<double> Normalizer::transform(std::span<const double> row) const {
    if (row.size() != mean.size()) throw std::invalid_argument("Normalizer: dimension mismatch");
    std::vector<double> out(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) out[i] = (row[i] - mean[i]) / std[i];
    return out;
}

std::vector<double> Normalizer::transform_rows(std::span<const double> rows) const {
    const std::size_t dim = mean.size();
    if (rows.size() % dim != 0) throw std::invalid_argument("Normalizer: dimension mismatch");
    std::vector<double> out(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) out[k] = (rows[k] - mean[k % dim]) / std[k % dim];
    return out;
}

}  // namespace rankfolio
