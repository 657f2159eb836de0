#include "rankfolio/metrics.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>

namespace rankfolio {

namespace {

void require_non_empty(std::span<const double> r, const char* what) {
    if (r.empty()) throw MetricsError(std::string(what) + ": empty return series");
}

double mean_of(std::span<const double> r) {
    return std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
}

double population_std(std::span<const double> r) {
    const double m = mean_of(r);
    double ss = 0.0;
    for (double v : r) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(r.size()));
}

std::string full_precision(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

double annualized_return(std::span<const double> r, const MetricsOptions& opt) {
    require_non_empty(r, "annualized_return");
    if (opt.legacy_sqrt_sum_return) {
        return std::sqrt(opt.periods_per_year) * std::accumulate(r.begin(), r.end(), 0.0);
    }
    return opt.periods_per_year * mean_of(r);
}

double annualized_volatility(std::span<const double> r, const MetricsOptions& opt) {
    if (r.size() < 2) throw MetricsError("annualized_volatility: need at least 2 observations");
    return std::sqrt(opt.periods_per_year) * population_std(r);
}

double sharpe(std::span<const double> r, const MetricsOptions& opt) {
    const double vol = annualized_volatility(r, opt);
    if (!(vol > 0.0)) throw MetricsError("sharpe: zero volatility");
    return annualized_return(r, opt) / vol;
}

double winning_pct(std::span<const double> r) {
    require_non_empty(r, "winning_pct");
    std::size_t wins = 0;
    for (double v : r) wins += v > 0.0 ? 1 : 0;
    return static_cast<double>(wins) / static_cast<double>(r.size());
}

double profit_factor(std::span<const double> r) {
    require_non_empty(r, "profit_factor");
    double gains = 0.0, losses = 0.0;
    for (double v : r) {
        if (v >= 0.0) {
            gains += v;
        } else {
            losses += v;
        }
    }
    if (losses == 0.0) return std::numeric_limits<double>::infinity();
    return gains / std::fabs(losses);
}

double information_ratio(std::span<const double> r, std::span<const double> benchmark,
                         const MetricsOptions& opt) {
    if (benchmark.size() != r.size()) throw MetricsError("information_ratio: benchmark length mismatch");
    if (r.size() < 2) throw MetricsError("information_ratio: need at least 2 observations");
    std::vector<double> excess(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) excess[i] = r[i] - benchmark[i];
    const double s = population_std(excess);
    if (!(s > 0.0)) throw MetricsError("information_ratio: degenerate excess returns");
    return std::sqrt(opt.periods_per_year) * mean_of(excess) / s;
}

double max_drawdown(std::span<const double> r) {
    require_non_empty(r, "max_drawdown");
    double wealth = 1.0, peak = 1.0, mdd = 0.0;
    for (double v : r) {
        if (v <= -1.0) throw MetricsError("max_drawdown: return <= -1 wipes out wealth");
        wealth *= 1.0 + v;
        peak = std::max(peak, wealth);
        mdd = std::max(mdd, (peak - wealth) / peak);
    }
    return mdd;
}

std::vector<double> wealth_curve(std::span<const double> r) {
    std::vector<double> w(r.size());
    double acc = 1.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        acc *= 1.0 + r[i];
        w[i] = acc;
    }
    return w;
}

MetricsReport compute_metrics(std::span<const double> r, std::span<const double> benchmark,
                              const MetricsOptions& opt) {
    MetricsReport m;
    m.annualized_return = annualized_return(r, opt);
    m.annualized_volatility = annualized_volatility(r, opt);
    if (m.annualized_volatility > 0.0) m.sharpe = m.annualized_return / m.annualized_volatility;
    m.winning_pct = winning_pct(r);
    m.profit_factor = profit_factor(r);
    m.profit_factor_infinite = std::isinf(m.profit_factor);
    if (!benchmark.empty()) {
        try {
            m.information_ratio = information_ratio(r, benchmark, opt);
        } catch (const MetricsError&) {
            m.information_ratio.reset();
        }
    }
    m.max_drawdown = max_drawdown(r);
    return m;
}

const std::vector<std::string>& metrics_columns() {
    static const std::vector<std::string> cols = {
        "profit_factor",  "sharpe",      "information_ratio",        "annualized_return_pct",
        "max_drawdown_pct", "winning_pct", "annualized_volatility_pct"};
    return cols;
}

std::vector<std::string> metrics_raw_cells(const MetricsReport& m) {
    return {m.profit_factor_infinite ? "inf" : full_precision(m.profit_factor),
            m.sharpe ? full_precision(*m.sharpe) : "",
            m.information_ratio ? full_precision(*m.information_ratio) : "",
            full_precision(m.annualized_return * 100.0),
            full_precision(m.max_drawdown * 100.0),
            full_precision(m.winning_pct * 100.0),
            full_precision(m.annualized_volatility * 100.0)};
}

std::vector<std::string> metrics_printed_cells(const MetricsReport& m) {
    return {m.profit_factor_infinite ? "inf" : format_fixed2(m.profit_factor),
            m.sharpe ? format_fixed2(*m.sharpe) : "",
            m.information_ratio ? format_fixed2(*m.information_ratio) : "",
            format_fixed2(m.annualized_return * 100.0),
            format_fixed2(m.max_drawdown * 100.0),
            format_fixed2(m.winning_pct * 100.0),
            format_fixed2(m.annualized_volatility * 100.0)};
}

std::string format_fixed2(double x) {
    if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    // Round the shortest round-trip decimal representation, so 2.675 is a
    // tie (-> 2.68) even though the binary value is slightly below it.
    char buf[64];
    int prec = 0;
    for (; prec < 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*e", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    std::snprintf(buf, sizeof buf, "%.*e", prec, x);
    std::string s(buf);
    const bool negative = s[0] == '-';
    if (negative) s.erase(0, 1);
    const std::size_t epos = s.find('e');
    const int exponent = std::atoi(s.c_str() + epos + 1);
    std::string digits;
    for (std::size_t i = 0; i < epos; ++i) {
        if (s[i] != '.') digits += s[i];
    }
    // value = digits * 10^(exponent - (k - 1)); scale to hundredths.
    const int k = static_cast<int>(digits.size());
    const int cents_exp = exponent - (k - 1) + 2;
    std::string kept;
    if (cents_exp >= 0) {
        kept = digits + std::string(static_cast<std::size_t>(cents_exp), '0');
    } else {
        const int drop = -cents_exp;
        std::string rest;
        if (drop >= k) {
            kept = "0";
            rest = std::string(static_cast<std::size_t>(drop - k), '0') + digits;
        } else {
            kept = digits.substr(0, static_cast<std::size_t>(k - drop));
            rest = digits.substr(static_cast<std::size_t>(k - drop));
        }
        bool round_up = false;
        if (rest[0] > '5') {
            round_up = true;
        } else if (rest[0] == '5') {
            const bool beyond = rest.find_first_not_of('0', 1) != std::string::npos;
            round_up = beyond || ((kept.back() - '0') % 2 == 1);
        }
        if (round_up) {
            int i = static_cast<int>(kept.size()) - 1;
            while (i >= 0 && kept[static_cast<std::size_t>(i)] == '9') kept[static_cast<std::size_t>(i--)] = '0';
            if (i < 0) {
                kept.insert(kept.begin(), '1');
            } else {
                ++kept[static_cast<std::size_t>(i)];
            }
        }
    }
    kept.erase(0, std::min(kept.find_first_not_of('0'), kept.size()));
    while (kept.size() < 3) kept.insert(kept.begin(), '0');
    const bool zero = kept.find_first_not_of('0') == std::string::npos;
    std::string out = (negative && !zero) ? "-" : "";
    out += kept.substr(0, kept.size() - 2) + "." + kept.substr(kept.size() - 2);
    return out;
}

}  // namespace rankfolio
