#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankfolio/features.h"
#include "rankfolio/metrics.h"
#include "rankfolio/price_matrix.h"
#include "rankfolio/rank_learner.h"
#include "rankfolio/strategy.h"

namespace rankfolio {

struct BacktestConfig {
    std::size_t lookback = 80;
    std::size_t refit_interval = 10;
    double decay_alpha = 0.7;
    std::size_t decay_length = 1;
    // Auto: learners decay, classic strategies do not.
    enum class DecayMode { Auto, On, Off };
    DecayMode decay_mode = DecayMode::Auto;
    double fee = 0.0;
    TargetSpec target;
    std::uint64_t seed = 10;
    std::size_t feature_window = 20;
    TrendMeasure trend = TrendMeasure::PriceSpearman;
    std::optional<Date> start;
    std::optional<Date> end;

    int epochs = 200;
    double learning_rate = 1e-3;
    std::vector<std::size_t> hidden = {20, 20};
    std::size_t knn_k = 15;

    ClassicParams classic;
    MetricsOptions metrics;
    std::string benchmark = "ucrp";

    // Throws std::invalid_argument on violated invariants.
    void validate() const;
};

// Trading days [first, last]; day t holds weights chosen at the close of t
// and earns p[t+1]/p[t] - 1.
struct TradingWindow {
    std::size_t first = 0;
    std::size_t last = 0;
    std::size_t size() const { return last - first + 1; }
};
TradingWindow resolve_trading_window(const PriceMatrix& prices, const BacktestConfig& cfg);

// Smoothed weights: (sum_i alpha^i * previous[i-1] + prediction) /
// (1 + sum_i alpha^i) with i = 1..min(length, previous.size()).
// `previous` is most recent first.
WeightVector apply_decay(std::span<const WeightVector> previous, std::span<const double> prediction, double alpha,
                         std::size_t length);

// Weights after one day of price moves without trading.
WeightVector drifted_weights(std::span<const double> w, std::span<const double> r);
// L1 distance to the previous (drifted) weights; an empty `previous` means
// all cash, so the turnover is the full allocation.
double turnover(std::span<const double> previous_drifted, std::span<const double> target);
double transaction_cost(std::span<const double> previous_drifted, std::span<const double> target, double fee);

struct DayRecord {
    std::size_t day = 0;
    Date date;
    WeightVector predicted;  // before decay
    WeightVector weights;    // held for the day
    double gross = 0.0;
    double turnover = 0.0;
    double cost = 0.0;
    double net = 0.0;
    double wealth = 0.0;  // net wealth after the day
    bool refit = false;
};

struct BacktestResult {
    std::string strategy;
    std::vector<std::string> assets;
    TradingWindow window;
    std::vector<DayRecord> days;
    MetricsReport gross_metrics;
    MetricsReport net_metrics;
    std::vector<double> benchmark_net;  // empty when no benchmark was used

    std::vector<double> gross_returns() const;
    std::vector<double> net_returns() const;
};

// Accepts classic names, "mlp", "knn", and learner variants "mlp:<power>" /
// "knn:return". Throws std::invalid_argument("unknown strategy ...").
std::unique_ptr<Strategy> make_strategy(const std::string& id, const BacktestConfig& cfg);
bool is_known_strategy(const std::string& id);
// Canonical label, e.g. "mlp" -> "mlp:2" under the configured target.
std::string canonical_strategy_id(const std::string& id, const BacktestConfig& cfg);

// Runs one strategy over the trading window. When `benchmark_net` is given it
// is used for the information ratio; otherwise cfg.benchmark is run (unless
// it is the strategy itself or empty).
BacktestResult run_backtest(const PriceMatrix& prices, const std::string& strategy_id, const BacktestConfig& cfg,
                            const std::vector<double>* benchmark_net = nullptr);

// weights.csv: date + one column per asset (held weights).
std::string format_weights_csv(const BacktestResult& result);
// returns.csv: date,gross,cost,net,wealth.
std::string format_returns_csv(const BacktestResult& result);

}  // namespace rankfolio
