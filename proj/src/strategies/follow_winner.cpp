#include <algorithm>
#include <cmath>
#include <limits>

#include "rankfolio/classic.h"
#include "rankfolio/kernels.h"

namespace rankfolio {

WeightVector sample_simplex_uniform(std::mt19937_64& rng, std::size_t n) {
    WeightVector w(n);
    double total = 0.0;
    for (double& x : w) {
        const double u = static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
        x = -std::log(u);
        total += x;
    }
    for (double& x : w) x /= total;
    return w;
}

WeightVector UniversalPortfolio::next(const HistoryView& h) {
    const std::size_t t = h.last();
    if (portfolios_.empty()) {
        n_ = h.assets();
        std::mt19937_64 rng(seed_);
        portfolios_.reserve(samples_ * n_);
        for (std::size_t k = 0; k < samples_; ++k) {
            const auto b = sample_simplex_uniform(rng, n_);
            portfolios_.insert(portfolios_.end(), b.begin(), b.end());
        }
        log_wealth_.assign(samples_, 0.0);
    } else {
        if (t == 0) throw std::logic_error("up: update needs a previous day");
        const auto x = h.relatives(t);
        kernels::accumulate_log_growth(portfolios_, x, log_wealth_);
    }

    const double peak = *std::max_element(log_wealth_.begin(), log_wealth_.end());
    WeightVector w(n_, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < samples_; ++k) {
        const double scale = std::exp(log_wealth_[k] - peak);
        total += scale;
        for (std::size_t j = 0; j < n_; ++j) w[j] += scale * portfolios_[k * n_ + j];
    }
    for (double& x : w) x /= total;
    return clean_simplex(w);
}

WeightVector ExponentialGradient::next(const HistoryView& h) {
    if (!last_) {
        last_ = uniform_weights(h.assets());
        return *last_;
    }
    const auto x = h.relatives(h.last());
    const WeightVector& b = *last_;
    const double growth = dot(b, x);
    std::vector<double> expo(b.size());
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
        expo[j] = eta_ * x[j] / growth;
        peak = std::max(peak, expo[j]);
    }
    WeightVector w(b.size());
    double total = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
        w[j] = b[j] * std::exp(expo[j] - peak);
        total += w[j];
    }
    for (double& v : w) v /= total;
    last_ = w;
    return w;
}

}  // namespace rankfolio
