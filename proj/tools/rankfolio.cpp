#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rankfolio/config.h"
#include "rankfolio/engine.h"
#include "rankfolio/mlp.h"
#include "rankfolio/price_matrix.h"
#include "rankfolio/report.h"
#ifdef RANKFOLIO_HAVE_FETCH
#include "rankfolio/fetch.h"
#endif

namespace fs = std::filesystem;
using namespace rankfolio;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shared run options; every override maps onto a config key.
struct RunFlags {
    std::string data;
    std::string config;
    std::string out = "out";
    std::map<std::string, std::string> overrides;
};

void add_data_flags(CLI::App* cmd, RunFlags& f, bool data_required = true) {
    auto* d = cmd->add_option("--data", f.data, "Price panel CSV (date,<SYM1>,...)");
    if (data_required) d->required();
    cmd->add_option("--config", f.config, "key = value run configuration file");
    cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
}

void add_override(CLI::App* cmd, RunFlags& f, const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&f, key](const std::string& v) { f.overrides[key] = v; }, help);
}

void add_config_flags(CLI::App* cmd, RunFlags& f) {
    add_override(cmd, f, "--rank-power", "rank_power", "Learner target: return|1|2|3|4");
    add_override(cmd, f, "--fee", "fee", "Proportional fee per unit turnover");
    add_override(cmd, f, "--lookback", "lookback", "Training lookback N (days)");
    add_override(cmd, f, "--refit", "refit", "Refit interval m (days)");
    add_override(cmd, f, "--decay-alpha", "decay_alpha", "Decay factor alpha in [0,1)");
    add_override(cmd, f, "--decay-len", "decay_len", "Decay memory length l");
    add_override(cmd, f, "--feature-window", "feature_window", "Feature window (days)");
    add_override(cmd, f, "--seed", "seed", "Random seed");
    add_override(cmd, f, "--start", "start", "First trading date (YYYY-MM-DD)");
    add_override(cmd, f, "--end", "end", "Last trading date (YYYY-MM-DD)");
    add_override(cmd, f, "--benchmark", "benchmark", "Information-ratio benchmark strategy");
}

BacktestConfig resolve_config(const RunFlags& f) {
    BacktestConfig cfg;
    if (!f.config.empty()) {
        if (!fs::exists(f.config)) throw UsageError("config file not found: " + f.config);
        cfg = load_config(f.config, cfg);
    }
    for (const auto& [key, value] : f.overrides) {
        try {
            set_config_value(cfg, key, value);
        } catch (const ConfigError& e) {
            throw UsageError(std::string("--") + e.what());
        }
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

std::string checked_strategy(const std::string& id, const BacktestConfig& cfg) {
    if (!is_known_strategy(id)) throw UsageError("unknown strategy '" + id + "'");
    return canonical_strategy_id(id, cfg);
}

void write_out(const fs::path& dir, const std::string& name, const std::string& content) {
    fs::create_directories(dir);
    write_text_file(dir / name, content);
}

int cmd_backtest(const RunFlags& f, const std::string& strategy_arg) {
    const BacktestConfig cfg = resolve_config(f);
    const std::string id = checked_strategy(strategy_arg, cfg);
    const PriceMatrix prices = load_csv(f.data);
    const BacktestResult res = run_backtest(prices, id, cfg);
    const fs::path out = f.out;
    write_out(out, "weights.csv", format_weights_csv(res));
    write_out(out, "returns.csv", format_returns_csv(res));
    const std::vector<MetricsRow> rows = {{"net", res.net_metrics}, {"gross", res.gross_metrics}};
    write_out(out, "metrics.csv", format_metrics_csv("series", rows, true));
    write_out(out, "metrics_raw.csv", format_metrics_csv("series", rows, false));
    write_out(out, "manifest.txt", format_manifest(make_manifest("backtest", id, f.data, cfg)));
    if (id.rfind("mlp:", 0) == 0) {
        auto strategy = make_strategy(id, cfg);
        // Replay to recover the final model state for the snapshot.
        const TradingWindow win = res.window;
        for (std::size_t t = win.first; t <= win.last; ++t) strategy->next(HistoryView(prices, t));
        const auto& learner = dynamic_cast<const RankLearnerStrategy&>(*strategy);
        if (learner.model()) {
            const Normalizer* norm = learner.normalizer() ? &*learner.normalizer() : nullptr;
            write_out(out, "model.txt", format_model(*learner.model(), norm));
        }
    }
    std::cout << format_metrics_text("strategy", {{id, res.net_metrics}});
    return 0;
}

int cmd_compare(const RunFlags& f, const std::vector<std::string>& strategies) {
    const BacktestConfig cfg = resolve_config(f);
    for (const auto& s : strategies) {
        if (s != "all" && s != "all-ml") checked_strategy(s, cfg);
    }
    const PriceMatrix prices = load_csv(f.data);
    const auto ids = expand_strategy_list(strategies, cfg);
    const auto results = run_comparison(prices, ids, cfg);
    std::vector<MetricsRow> rows;
    for (const auto& r : results) {
        if (!r.result) {
            std::cerr << "rankfolio: " << r.strategy << " failed: " << r.error << "\n";
            continue;
        }
        rows.push_back({r.strategy, r.result->net_metrics});
    }
    const fs::path out = f.out;
    write_out(out, "comparison.csv", format_metrics_csv("strategy", rows, true));
    write_out(out, "comparison_raw.csv", format_metrics_csv("strategy", rows, false));
    write_out(out, "manifest.txt", format_manifest(make_manifest("compare", "", f.data, cfg)));
    std::cout << format_metrics_text("strategy", rows);
    return rows.empty() ? 1 : 0;
}

int cmd_sweep(const RunFlags& f, const std::string& strategy_arg, const std::vector<double>& fees) {
    const BacktestConfig cfg = resolve_config(f);
    const std::string id = checked_strategy(strategy_arg, cfg);
    for (double fee : fees) {
        if (!(fee >= 0.0)) throw UsageError("fee must be non-negative, got " + format_fee(fee));
    }
    const PriceMatrix prices = load_csv(f.data);
    const auto sweep = run_fee_sweep(prices, id, fees.empty() ? kDefaultFeeGrid : fees, cfg);
    std::vector<MetricsRow> rows;
    for (const auto& r : sweep) rows.push_back({format_fee(r.fee), r.result.net_metrics});
    const fs::path out = f.out;
    write_out(out, "fee_sweep.csv", format_metrics_csv("fee", rows, true));
    write_out(out, "fee_sweep_raw.csv", format_metrics_csv("fee", rows, false));
    write_out(out, "manifest.txt", format_manifest(make_manifest("sweep-fees", id, f.data, cfg)));
    std::cout << id << "\n" << format_metrics_text("fee", rows);
    return 0;
}

int cmd_plotdata(const RunFlags& f, const std::string& strategy_arg) {
    const BacktestConfig cfg = resolve_config(f);
    const std::string id = checked_strategy(strategy_arg, cfg);
    const PriceMatrix prices = load_csv(f.data);
    const BacktestResult res = run_backtest(prices, id, cfg);
    const fs::path out = f.out;
    write_out(out, "prices_normalized.csv", format_normalized_prices_csv(prices));
    write_out(out, "wealth.csv", format_wealth_plot_csv(res));
    write_out(out, "returns.csv", format_returns_csv(res));
    std::cout << "wrote " << (out / "prices_normalized.csv").string() << " and " << (out / "wealth.csv").string()
              << "\n";
    return 0;
}

int cmd_validate(const RunFlags& f) {
    const PriceMatrix prices = load_csv(f.data);
    const auto stats = summary_stats(prices);
    std::cout << prices.days() << " days x " << prices.assets() << " assets, " << prices.dates().front().to_string()
              << " .. " << prices.dates().back().to_string() << "\n"
              << format_summary_stats_text(stats);
    if (!f.out.empty()) write_out(f.out, "summary_stats.csv", format_summary_stats_csv(stats));
    return 0;
}

#ifdef RANKFOLIO_HAVE_FETCH
int cmd_fetch(const std::vector<std::string>& assets, const std::string& start, const std::string& end,
              const std::string& out, std::optional<int> delay_ms, const std::string& panel) {
    Date s, e;
    try {
        s = Date::parse(start);
        e = Date::parse(end);
    } catch (const std::invalid_argument& ex) {
        throw UsageError(ex.what());
    }
    FetchOptions opt = FetchOptions::from_environment();
    if (delay_ms) {
        if (*delay_ms < 0) throw UsageError("--delay-ms must be >= 0");
        opt.delay_ms = *delay_ms;
    }
    HistoryFetcher fetcher(opt);
    const PriceMatrix merged = fetch_panel(fetcher, assets, s, e, out);
    for (const auto& a : assets) std::cout << "wrote " << (fs::path(out) / (a + ".csv")).string() << "\n";
    if (!panel.empty()) {
        write_csv(merged, panel);
        std::cout << "wrote " << panel << " (" << merged.days() << " common days)\n";
    }
    return 0;
}
#endif

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rank-based portfolio backtesting", "rankfolio"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    RunFlags flags;
    std::string strategy = "mlp";
    std::vector<std::string> strategies{"all"};
    std::vector<double> fees;

    auto* backtest = app.add_subcommand("backtest", "Run one strategy and write weights, returns and metrics");
    add_data_flags(backtest, flags);
    add_config_flags(backtest, flags);
    backtest->add_option("--strategy", strategy, "Strategy id")->capture_default_str();

    auto* compare = app.add_subcommand("compare", "Compare strategies side by side");
    add_data_flags(compare, flags);
    add_config_flags(compare, flags);
    compare->add_option("--strategy,--strategies", strategies, "Strategy ids, 'all' or 'all-ml'")
        ->delimiter(',')
        ->capture_default_str();

    auto* sweep = app.add_subcommand("sweep-fees", "Metrics of one strategy across a fee grid");
    add_data_flags(sweep, flags);
    add_config_flags(sweep, flags);
    sweep->add_option("--strategy", strategy, "Strategy id")->capture_default_str();
    sweep->add_option("--fees", fees, "Comma-separated fee grid")->delimiter(',');

    auto* plot = app.add_subcommand("plotdata", "Write normalized prices and wealth curves as CSV");
    add_data_flags(plot, flags);
    add_config_flags(plot, flags);
    plot->add_option("--strategy", strategy, "Strategy id")->capture_default_str();

    auto* validate = app.add_subcommand("validate", "Check a price panel and print summary statistics");
    validate->add_option("--data", flags.data, "Price panel CSV")->required();
    std::string validate_out;
    validate->add_option("--out", validate_out, "Directory for summary_stats.csv");

#ifdef RANKFOLIO_HAVE_FETCH
    std::vector<std::string> assets;
    std::string fetch_start, fetch_end, fetch_out = "data", panel;
    std::optional<int> delay_ms;
    auto* fetch = app.add_subcommand("fetch", "Download daily prices (RANKFOLIO_API_BASE overrides the API)");
    fetch->add_option("--assets", assets, "Comma-separated asset ids")->delimiter(',')->required();
    fetch->add_option("--start", fetch_start, "First date (YYYY-MM-DD)")->required();
    fetch->add_option("--end", fetch_end, "Last date (YYYY-MM-DD)")->required();
    fetch->add_option("--out", fetch_out, "Directory for per-asset CSVs")->capture_default_str();
    fetch->add_option("--delay-ms", delay_ms, "Minimum gap between requests in milliseconds");
    fetch->add_option("--panel", panel, "Also write the merged panel CSV here");
#endif

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*backtest) return cmd_backtest(flags, strategy);
        if (*compare) return cmd_compare(flags, strategies);
        if (*sweep) return cmd_sweep(flags, strategy, fees);
        if (*plot) return cmd_plotdata(flags, strategy);
        if (*validate) {
            flags.out = validate_out;
            return cmd_validate(flags);
        }
#ifdef RANKFOLIO_HAVE_FETCH
        if (*fetch) return cmd_fetch(assets, fetch_start, fetch_end, fetch_out, delay_ms, panel);
#endif
    } catch (const UsageError& e) {
        std::cerr << "rankfolio: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "rankfolio: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "rankfolio: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
