#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankfolio {

class MetricsError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct MetricsOptions {
    double periods_per_year = 250.0;
    // Audit switch: annualized return = sqrt(periods) * sum(R) instead of
    // periods * mean(R). Not time-normalized; off by default.
    bool legacy_sqrt_sum_return = false;
};

double annualized_return(std::span<const double> r, const MetricsOptions& opt = {});
// sqrt(periods) * population standard deviation.
double annualized_volatility(std::span<const double> r, const MetricsOptions& opt = {});
double sharpe(std::span<const double> r, const MetricsOptions& opt = {});
// Fraction of strictly positive entries.
double winning_pct(std::span<const double> r);
// Gains over |losses|; +infinity when there is no losing day.
double profit_factor(std::span<const double> r);
// sqrt(periods) * mean(r - b) / std(r - b), population std.
double information_ratio(std::span<const double> r, std::span<const double> benchmark,
                         const MetricsOptions& opt = {});
// Peak-to-trough decline of the compounded wealth curve starting at 1.
double max_drawdown(std::span<const double> r);

// Cumulative product of (1 + r), one entry per day.
std::vector<double> wealth_curve(std::span<const double> r);

struct MetricsReport {
    double annualized_return = 0.0;
    double annualized_volatility = 0.0;
    std::optional<double> sharpe;  // empty for zero volatility
    double winning_pct = 0.0;
    double profit_factor = 0.0;
    bool profit_factor_infinite = false;
    std::optional<double> information_ratio;  // empty without benchmark or when degenerate
    double max_drawdown = 0.0;
};

// Computes every metric that is defined for the series; degenerate ones are
// left empty instead of throwing. Requires at least two observations.
MetricsReport compute_metrics(std::span<const double> r, std::span<const double> benchmark = {},
                              const MetricsOptions& opt = {});

// Column order: profit_factor, sharpe, information_ratio,
// annualized_return_pct, max_drawdown_pct, winning_pct, annualized_volatility_pct.
const std::vector<std::string>& metrics_columns();
// Full precision (%.17g, percent columns scaled by 100); empty cells for missing values.
std::vector<std::string> metrics_raw_cells(const MetricsReport& m);
// Two decimals, round-half-even, percent columns scaled by 100.
std::vector<std::string> metrics_printed_cells(const MetricsReport& m);

// Round-half-even to two decimals on the decimal value nearest to x.
std::string format_fixed2(double x);

}  // namespace rankfolio
