#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rankfolio/engine.h"
#include "rankfolio/metrics.h"

namespace rankfolio {

inline constexpr const char* kVersion = "0.3.0";

// FNV-1a 64-bit over the raw bytes, as 16 hex digits.
std::string fnv1a64_hex(const std::string& bytes);
std::string hash_file(const std::filesystem::path& path);

struct RunManifest {
    std::string command;
    std::string strategy;
    std::string data_path;
    std::string data_hash;
    std::vector<std::pair<std::string, std::string>> config;
    std::string version = kVersion;
    std::string timestamp;  // UTC, ISO-8601
};
RunManifest make_manifest(const std::string& command, const std::string& strategy,
                          const std::filesystem::path& data_path, const BacktestConfig& cfg);
std::string format_manifest(const RunManifest& m);

struct MetricsRow {
    std::string label;
    MetricsReport metrics;
};

// CSV with `key_column` first, then the seven metric columns.
std::string format_metrics_csv(const std::string& key_column, const std::vector<MetricsRow>& rows, bool printed);
// Space-aligned plain-text table of the printed (two-decimal) values.
std::string format_metrics_text(const std::string& key_column, const std::vector<MetricsRow>& rows);

struct ComparisonRow {
    std::string strategy;
    std::optional<BacktestResult> result;
    std::string error;  // non-empty when the run failed
};

// Runs every strategy (concurrently) against the configured benchmark; rows
// come back sorted by canonical strategy id. Failures are captured per row.
std::vector<ComparisonRow> run_comparison(const PriceMatrix& prices, const std::vector<std::string>& strategies,
                                          const BacktestConfig& cfg);

// Expands "all" (classic + mlp + knn at the configured target) and "all-ml"
// (mlp and knn for return and powers 1..4) inside a strategy list.
std::vector<std::string> expand_strategy_list(const std::vector<std::string>& items, const BacktestConfig& cfg);

inline const std::vector<double> kDefaultFeeGrid = {0.0, 0.00025, 0.0005, 0.00075, 0.001, 0.00125, 0.0015};

struct FeeRow {
    double fee = 0.0;
    BacktestResult result;
};
// One run per fee (concurrently), sorted by fee. Throws on a negative fee.
std::vector<FeeRow> run_fee_sweep(const PriceMatrix& prices, const std::string& strategy, std::vector<double> fees,
                                  const BacktestConfig& cfg);
std::string format_fee(double fee);

// Each asset rescaled to 1 at the first row.
std::string format_normalized_prices_csv(const PriceMatrix& prices);
// date,strategy_wealth,benchmark_wealth,cumulative_excess
std::string format_wealth_plot_csv(const BacktestResult& result);

// Statistic rows (count, mean, std, min, 25%, 50%, 75%, max) by asset columns.
std::string format_summary_stats_csv(const std::vector<ReturnStats>& stats);
std::string format_summary_stats_text(const std::vector<ReturnStats>& stats);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace rankfolio
