#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rankfolio/price_matrix.h"

namespace rankfolio {

// What the learners are trained to predict: next-day returns, or next-day
// cross-sectional ranks (1 = worst, n = best) raised to `power`.
struct TargetSpec {
    enum class Mode { Return, Rank };
    Mode mode = Mode::Rank;
    int power = 2;

    // "return" or a positive integer power.
    static TargetSpec parse(const std::string& text);
    std::string to_string() const;
    bool operator==(const TargetSpec&) const = default;
};

// How the per-asset trend-strength feature is measured over the window.
enum class TrendMeasure { PriceSpearman, ReturnSpearman };

struct FeatureOptions {
    std::size_t window = 20;
    TrendMeasure trend = TrendMeasure::PriceSpearman;
};

// 4n features at day t, feature-major: last returns, trailing volatilities,
// trailing Sharpe ratios, trend rank correlations. Requires t >= window and
// reads no price after day t.
std::vector<double> compute_features(const HistoryView& h, std::size_t t, const FeatureOptions& opt = {});
std::vector<double> compute_features(const PriceMatrix& prices, std::size_t t, const FeatureOptions& opt = {});

// Ascending ordinal ranks (ties by index), each raised to `power`.
std::vector<double> rank_transform(std::span<const double> returns, int power);
std::vector<double> make_target(std::span<const double> returns, const TargetSpec& spec);

// Spearman correlation with average ranks for ties; 0 if either side is constant.
double spearman(std::span<const double> a, std::span<const double> b);

// Row-major supervised-learning block.
struct TrainingSet {
    std::size_t rows = 0;
    std::size_t feature_dim = 0;
    std::size_t target_dim = 0;
    std::size_t first_day = 0;  // day of row 0
    std::vector<double> features;
    std::vector<double> targets;

    std::span<const double> feature_row(std::size_t r) const { return {features.data() + r * feature_dim, feature_dim}; }
    std::span<const double> target_row(std::size_t r) const { return {targets.data() + r * target_dim, target_dim}; }
};

// Rows for days s = t - lookback ... t - 1, each labelled with the target of
// the return from s to s + 1. Uses only prices up to day t = h.last().
TrainingSet build_training_set(const HistoryView& h, std::size_t lookback, const TargetSpec& target,
                               const FeatureOptions& opt = {});
TrainingSet build_training_set(const PriceMatrix& prices, std::size_t t, std::size_t lookback,
                               const TargetSpec& target, const FeatureOptions& opt = {});

// Per-dimension z-scoring fit on a training block.
struct Normalizer {
    static constexpr double kStdFloor = 1e-12;
    std::vector<double> mean;
    std::vector<double> std;  // population std, floored at kStdFloor

    static Normalizer fit(std::span<const double> rows, std::size_t dim);
    std::vector<double> transform(std::span<const double> row) const;
    std::vector<double> transform_rows(std::span<const double> rows) const;
    bool operator==(const Normalizer&) const = default;
};

}  // namespace rankfolio
