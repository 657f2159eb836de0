#include <cmath>

#include "rankfolio/classic.h"

namespace rankfolio {

WeightVector BuyAndHold::next(const HistoryView& h) {
    const std::size_t t = h.last();
    if (start_prices_.empty()) {
        const auto row = h.row(t);
        start_prices_.assign(row.begin(), row.end());
        return uniform_weights(h.assets());
    }
    WeightVector w(h.assets());
    double total = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] = h.price(t, j) / start_prices_[j];
        total += w[j];
    }
    for (double& x : w) x /= total;
    return w;
}

WeightVector bcrp_hindsight(const PriceMatrix& prices, std::size_t first_day, std::size_t last_day,
                            const LogOptimalOptions& opt) {
    if (first_day > last_day || last_day + 1 >= prices.days()) {
        throw std::out_of_range("bcrp_hindsight: trading period outside the price matrix");
    }
    const std::size_t n = prices.assets();
    std::vector<double> x;
    x.reserve((last_day - first_day + 1) * n);
    for (std::size_t t = first_day; t <= last_day; ++t) {
        for (std::size_t j = 0; j < n; ++j) x.push_back(prices.price(t + 1, j) / prices.price(t, j));
    }
    auto res = log_optimal_portfolio(x, n, opt);
    if (!res.converged) {
        throw SolverError("bcrp: log-optimal solver did not converge in " + std::to_string(res.iterations) +
                          " iterations");
    }
    return res.weights;
}

void BestCrp::observe_trading_period(const PriceMatrix& prices, std::size_t first_day, std::size_t last_day) {
    weights_ = bcrp_hindsight(prices, first_day, last_day, opt_);
}

WeightVector BestCrp::next(const HistoryView& h) {
    if (!weights_) throw std::logic_error("bcrp: trading period was not observed before trading");
    if (weights_->size() != h.assets()) throw std::logic_error("bcrp: asset count changed");
    return *weights_;
}

}  // namespace rankfolio
