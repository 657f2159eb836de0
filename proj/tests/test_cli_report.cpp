#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

#include "rankfolio/config.h"
#include "rankfolio/metrics.h"
#include "rankfolio/report.h"
#include "support.h"

using namespace rankfolio;

namespace {

BacktestConfig small_config() {
    BacktestConfig cfg;
    cfg.lookback = 30;
    cfg.feature_window = 10;
    cfg.epochs = 40;
    cfg.classic.up_samples = 400;
    return cfg;
}

std::vector<std::vector<std::string>> read_csv_cells(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(RANKFOLIO_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("empty config yields the defaults") {
    const auto cfg = parse_config("");
    CHECK(cfg.lookback == 80);
    CHECK(cfg.refit_interval == 10);
    CHECK(cfg.decay_alpha == 0.7);
    CHECK(cfg.decay_length == 1);
    CHECK(cfg.seed == 10);
    CHECK(cfg.target == TargetSpec{TargetSpec::Mode::Rank, 2});
    CHECK(cfg.benchmark == "ucrp");
}

TEST_CASE("config parsing is strict") {
    CHECK_THROWS_WITH_AS(parse_config("lookbak = 80\n"), doctest::Contains("unknown key"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("# c\n\nlookback = x\n"), doctest::Contains("line 3"), ConfigError);
    CHECK_THROWS_AS(parse_config("fee = 1e-3x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("lookback = -3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("rank_power = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("start = 2020-02-30\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("decay = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("just text\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/rankfolio.cfg"), ConfigError);
    const auto cfg = parse_config("decay_alpha = 0.5\nrank_power = return\nhidden = 8, 4\nstart = 2021-01-05\n");
    CHECK(cfg.decay_alpha == 0.5);
    CHECK(cfg.target.mode == TargetSpec::Mode::Return);
    CHECK(cfg.hidden == std::vector<std::size_t>{8, 4});
    CHECK(cfg.start == Date{2021, 1, 5});
}

TEST_CASE("config echo round-trips") {
    auto cfg = parse_config("fee = 0.00025\nlookback = 60\nup_samples = 7\ntrend = return\nend = 2022-03-01\n");
    const auto again = parse_config(format_config(cfg));
    CHECK(format_config(again) == format_config(cfg));
    CHECK(again.fee == 0.00025);
    CHECK(again.classic.up_samples == 7);
    CHECK(config_entries(cfg).size() == config_keys().size());
}

TEST_CASE("fnv-1a hashes") {
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("comparison rows are sorted, complete, and rederivable") {
    const PriceMatrix p = test::random_prices(90, 3, 2);
    const auto cfg = small_config();
    const auto ids = expand_strategy_list({"all"}, cfg);
    CHECK(ids.size() == 14);
    const auto rows = run_comparison(p, ids, cfg);
    REQUIRE(rows.size() == 14);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].strategy < rows[i].strategy);
    const BacktestResult* ucrp = nullptr;
    const BacktestResult* bcrp = nullptr;
    for (const auto& r : rows) {
        REQUIRE(r.result.has_value());
        const auto net = r.result->net_returns();
        const auto again = compute_metrics(net, r.strategy == "ucrp" ? std::span<const double>{}
                                                                      : std::span<const double>(r.result->benchmark_net));
        CHECK(metrics_raw_cells(again) == metrics_raw_cells(r.result->net_metrics));
        if (r.strategy == "ucrp") ucrp = &*r.result;
        if (r.strategy == "bcrp") bcrp = &*r.result;
    }
    REQUIRE(ucrp);
    REQUIRE(bcrp);
    CHECK_FALSE(ucrp->net_metrics.information_ratio.has_value());
    CHECK(bcrp->days.back().wealth >= ucrp->days.back().wealth - 1e-9);
    CHECK(expand_strategy_list({"all-ml"}, cfg).size() == 10);
}

TEST_CASE("failing comparison rows are reported, not fatal") {
    const PriceMatrix p = test::random_prices(90, 3, 2);
    auto cfg = small_config();
    cfg.knn_k = 500;  // more neighbours than training rows
    const auto rows = run_comparison(p, {"knn", "ucrp"}, cfg);
    REQUIRE(rows.size() == 2);
    CHECK_FALSE(rows[0].result.has_value());
    CHECK(rows[0].error.find("k exceeds") != std::string::npos);
    CHECK(rows[1].result.has_value());
}

TEST_CASE("identical assets give identical rows") {
    std::string csv = "date,X,Y\n";
    const PriceMatrix base = test::random_prices(90, 1, 3);
    for (std::size_t i = 0; i < base.days(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", base.price(i, 0));
        csv += base.dates()[i].to_string() + "," + buf + "," + buf + "\n";
    }
    const auto rows = run_comparison(parse_csv(csv), {"bah", "ucrp"}, small_config());
    REQUIRE(rows.size() == 2);
    auto a = metrics_printed_cells(rows[0].result->net_metrics);
    auto b = metrics_printed_cells(rows[1].result->net_metrics);
    CHECK(a[2].empty());
    CHECK(b[2].empty());
    CHECK(a == b);
}

TEST_CASE("fee sweep is sorted and monotone") {
    const PriceMatrix p = test::random_prices(100, 3, 4);
    const auto cfg = small_config();
    const auto rows = run_fee_sweep(p, "mlp", {0.001, 0.0, 0.0005}, cfg);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].fee == 0.0);
    CHECK(rows[2].fee == 0.001);
    CHECK(rows[0].result.net_metrics.annualized_return > rows[1].result.net_metrics.annualized_return);
    CHECK(rows[1].result.net_metrics.annualized_return > rows[2].result.net_metrics.annualized_return);
    CHECK(format_returns_csv(rows[0].result) == format_returns_csv(run_backtest(p, "mlp", cfg)));
    CHECK_THROWS_AS(run_fee_sweep(p, "mlp", {-0.001}, cfg), std::invalid_argument);
    CHECK(kDefaultFeeGrid.size() == 7);
    CHECK(format_fee(0.00025) == "0.00025");
}

TEST_CASE("plot data") {
    const PriceMatrix p = test::random_prices(90, 3, 5);
    const auto norm = read_csv_cells(format_normalized_prices_csv(p));
    CHECK(norm[0] == std::vector<std::string>{"date", "A0", "A1", "A2"});
    CHECK(norm[1] == std::vector<std::string>{"2020-01-01", "1", "1", "1"});
    const auto cfg = small_config();
    const auto ucrp = read_csv_cells(format_wealth_plot_csv(run_backtest(p, "ucrp", cfg)));
    for (std::size_t i = 1; i < ucrp.size(); ++i) CHECK(ucrp[i][3] == "0");
    const auto res = run_backtest(p, "olmar", cfg);
    const auto w = read_csv_cells(format_wealth_plot_csv(res));
    double wealth = 1.0, bench = 1.0, excess = 0.0;
    for (std::size_t i = 0; i < res.days.size(); ++i) {
        wealth *= 1.0 + res.days[i].net;
        bench *= 1.0 + res.benchmark_net[i];
        excess += res.days[i].net - res.benchmark_net[i];
        CHECK(std::stod(w[i + 1][1]) == doctest::Approx(wealth).epsilon(1e-12));
        CHECK(std::stod(w[i + 1][2]) == doctest::Approx(bench).epsilon(1e-12));
        CHECK(std::stod(w[i + 1][3]) == doctest::Approx(excess).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("summary statistics table layout") {
    const PriceMatrix p = test::random_prices(40, 2, 6);
    const auto cells = read_csv_cells(format_summary_stats_csv(summary_stats(p)));
    REQUIRE(cells.size() == 9);
    CHECK(cells[0] == std::vector<std::string>{"statistic", "A0", "A1"});
    CHECK(cells[1] == std::vector<std::string>{"count", "39", "39"});
    std::vector<std::string> names;
    for (std::size_t i = 1; i < cells.size(); ++i) names.push_back(cells[i][0]);
    CHECK(names == std::vector<std::string>{"count", "mean", "std", "min", "25%", "50%", "75%", "max"});
}

TEST_CASE("metrics tables") {
    const std::vector<double> r{0.01, -0.02, 0.03};
    const std::vector<MetricsRow> rows{{"net", compute_metrics(r)}};
    const auto csv = read_csv_cells(format_metrics_csv("series", rows, true));
    CHECK(csv[0][0] == "series");
    CHECK(csv[0][1] == "profit_factor");
    CHECK(csv[1][0] == "net");
    CHECK(csv[1][2] == format_fixed2(*rows[0].metrics.sharpe));
    const auto text = format_metrics_text("series", rows);
    CHECK(text.find("profit_factor") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

TEST_CASE("command line contract") {
    const auto dir = test::temp_dir("cli");
    const PriceMatrix p = test::random_prices(90, 3, 7);
    write_csv(p, dir / "p.csv");
    write_text_file(dir / "run.cfg", "lookback = 30\nfeature_window = 10\nepochs = 30\nup_samples = 200\n");
    const std::string data = "--data " + (dir / "p.csv").string() + " --config " + (dir / "run.cfg").string();

    CHECK(run_cli("backtest " + data + " --strategy nosuch --out " + (dir / "x").string()) == 2);
    CHECK(run_cli("backtest " + data + " --lookbak 3") == 2);
    CHECK(run_cli("backtest " + data + " --fee abc") == 2);
    CHECK(run_cli("backtest " + data + " --rank-power 0") == 2);
    CHECK(run_cli("backtest --data " + (dir / "missing.csv").string()) == 1);
    CHECK(run_cli("backtest " + data.substr(0, data.find(" --config")) + " --config /nonexistent.cfg") == 2);
    CHECK(run_cli("") == 2);

    const auto a = dir / "a", b = dir / "b";
    CHECK(run_cli("backtest " + data + " --strategy mlp --rank-power 2 --seed 10 --out " + a.string()) == 0);
    CHECK(run_cli("backtest " + data + " --strategy mlp --rank-power 2 --seed 10 --out " + b.string()) == 0);
    for (const char* f : {"weights.csv", "returns.csv", "metrics.csv", "metrics_raw.csv", "model.txt"}) {
        CHECK(test::read_file(a / f) == test::read_file(b / f));
        CHECK_FALSE(test::read_file(a / f).empty());
    }
    const auto manifest = test::read_file(a / "manifest.txt");
    CHECK(manifest.find("data_fnv1a64 = " + hash_file(dir / "p.csv")) != std::string::npos);
    CHECK(manifest.find("lookback = 30") != std::string::npos);
    CHECK(manifest.find("strategy = mlp:2") != std::string::npos);

    // Flags override the config file.
    const auto c = dir / "c";
    CHECK(run_cli("backtest " + data + " --strategy ucrp --decay-alpha 0 --out " + c.string()) == 0);
    CHECK(test::read_file(c / "manifest.txt").find("decay_alpha = 0\n") != std::string::npos);
    const auto metrics = read_csv_cells(test::read_file(c / "metrics.csv"));
    CHECK(metrics[1][3].empty());

    CHECK(run_cli("compare " + data + " --strategies bah,ucrp,olmar --out " + (dir / "cmp").string()) == 0);
    CHECK(read_csv_cells(test::read_file(dir / "cmp" / "comparison.csv")).size() == 4);
    CHECK(run_cli("sweep-fees " + data + " --strategy olmar --out " + (dir / "fees").string()) == 0);
    CHECK(read_csv_cells(test::read_file(dir / "fees" / "fee_sweep.csv")).size() == 8);
    CHECK(run_cli("sweep-fees " + data + " --strategy olmar --fees=-0.1") == 2);
    CHECK(run_cli("plotdata " + data + " --strategy olmar --out " + (dir / "plot").string()) == 0);
    CHECK(std::filesystem::exists(dir / "plot" / "wealth.csv"));
    CHECK(run_cli("validate --data " + (dir / "p.csv").string()) == 0);
}
