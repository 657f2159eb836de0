#include <doctest.h>

#include <cmath>

#include "rankfolio/engine.h"
#include "support.h"

using namespace rankfolio;

namespace {

BacktestConfig small_config() {
    BacktestConfig cfg;
    cfg.lookback = 30;
    cfg.feature_window = 10;
    cfg.refit_interval = 5;
    cfg.epochs = 40;
    cfg.classic.up_samples = 400;
    return cfg;
}

// Recomputes every accounting column from the held weights and the prices.
void check_replay(const PriceMatrix& p, const BacktestResult& res, double fee) {
    std::vector<double> prev;
    double wealth = 1.0;
    for (const auto& d : res.days) {
        const auto r = returns_at(p, d.day);
        double gross = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j) gross += d.weights[j] * r[j];
        double turn = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j) turn += std::fabs(d.weights[j] - (prev.empty() ? 0.0 : prev[j]));
        CHECK(d.gross == doctest::Approx(gross).epsilon(1e-14));
        CHECK(d.turnover == doctest::Approx(turn).epsilon(1e-12));
        CHECK(d.cost == doctest::Approx(fee * turn).epsilon(1e-12));
        CHECK(d.net == doctest::Approx(gross - fee * turn).epsilon(1e-12));
        wealth *= 1.0 + d.net;
        CHECK(d.wealth == doctest::Approx(wealth).epsilon(1e-12));
        if (d.day + 1 < p.days()) {
            prev.assign(r.size(), 0.0);
            double total = 0.0;
            for (std::size_t j = 0; j < r.size(); ++j) total += prev[j] = d.weights[j] * (1.0 + r[j]);
            for (double& v : prev) v /= total;
        }
    }
}

}  // namespace

TEST_CASE("decay blends the prediction with recent smoothed weights") {
    const std::vector<WeightVector> prev{{1.0, 0.0}};
    const std::vector<double> pred{0.0, 1.0};
    const auto w = apply_decay(prev, pred, 0.7, 1);
    CHECK(std::fabs(w[0] - 0.7 / 1.7) <= 1e-12);
    CHECK(std::fabs(w[1] - 1.0 / 1.7) <= 1e-12);
    CHECK(apply_decay({}, pred, 0.7, 1) == pred);
    CHECK(apply_decay(prev, pred, 0.0, 1) == pred);
    // Two terms: (a^1 p1 + a^2 p2 + pred) / (1 + a + a^2).
    const std::vector<WeightVector> two{{1.0, 0.0}, {0.5, 0.5}};
    const auto w2 = apply_decay(two, pred, 0.5, 2);
    CHECK(w2[0] == doctest::Approx((0.5 + 0.125) / 1.75));
    CHECK(w2[1] == doctest::Approx((0.125 + 1.0) / 1.75));
    // Length caps the number of terms used.
    CHECK(apply_decay(two, pred, 0.5, 1) == apply_decay(prev, pred, 0.5, 1));
}

TEST_CASE("drift, turnover and cost") {
    const auto d = drifted_weights(std::vector<double>{0.5, 0.5}, std::vector<double>{0.2, -0.2});
    CHECK(d[0] == doctest::Approx(0.6));
    CHECK(turnover({}, std::vector<double>{0.3, 0.7}) == doctest::Approx(1.0));
    CHECK(turnover(d, std::vector<double>{0.5, 0.5}) == doctest::Approx(0.2));
    CHECK(transaction_cost(d, std::vector<double>{0.5, 0.5}, 0.001) == doctest::Approx(0.0002));
}

TEST_CASE("trading window starts after lookback plus feature window") {
    const PriceMatrix p = test::random_prices(200, 3, 1);
    BacktestConfig cfg;
    const auto w = resolve_trading_window(p, cfg);
    CHECK(w.first == 100);
    CHECK(w.last == 198);
    cfg.start = p.dates()[150];
    cfg.end = p.dates()[170];
    const auto w2 = resolve_trading_window(p, cfg);
    CHECK(w2.first == 150);
    CHECK(w2.last == 170);
    cfg.start = p.dates()[50];
    CHECK_THROWS_AS(resolve_trading_window(p, cfg), std::out_of_range);
    CHECK_THROWS_AS(resolve_trading_window(test::random_prices(101, 3, 1), BacktestConfig{}), std::out_of_range);
}

TEST_CASE("strategy ids") {
    const BacktestConfig cfg;
    CHECK(canonical_strategy_id("mlp", cfg) == "mlp:2");
    CHECK(canonical_strategy_id("knn:return", cfg) == "knn:return");
    CHECK(canonical_strategy_id("olmar", cfg) == "olmar");
    CHECK(is_known_strategy("mlp:4"));
    CHECK_FALSE(is_known_strategy("mlp:x"));
    CHECK_FALSE(is_known_strategy("nosuch"));
    CHECK_THROWS_WITH_AS(make_strategy("nosuch", cfg), doctest::Contains("unknown strategy"), std::invalid_argument);
}

TEST_CASE("recorded accounting replays from weights and prices") {
    const PriceMatrix p = test::random_prices(120, 4, 3);
    for (const std::string id : {"mlp", "knn", "olmar", "bah", "up"}) {
        auto cfg = small_config();
        cfg.fee = 0.001;
        const auto res = run_backtest(p, id, cfg);
        CHECK(res.window.first == 40);
        CHECK(res.days.size() == res.window.size());
        CHECK(res.days.front().turnover == doctest::Approx(1.0));
        check_replay(p, res, 0.001);
    }
}

TEST_CASE("learners are smoothed by default and classic strategies are not") {
    const PriceMatrix p = test::random_prices(90, 3, 4);
    auto cfg = small_config();
    const auto mlp = run_backtest(p, "mlp", cfg);
    CHECK(mlp.days[0].weights == mlp.days[0].predicted);
    for (std::size_t i = 1; i < mlp.days.size(); ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            const double expect = (0.7 * mlp.days[i - 1].weights[j] + mlp.days[i].predicted[j]) / 1.7;
            CHECK(mlp.days[i].weights[j] == doctest::Approx(expect).epsilon(1e-14));
        }
    }
    const auto eg = run_backtest(p, "eg", cfg);
    for (const auto& d : eg.days) CHECK(d.weights == d.predicted);
    cfg.decay_mode = BacktestConfig::DecayMode::Off;
    for (const auto& d : run_backtest(p, "mlp", cfg).days) CHECK(d.weights == d.predicted);
    cfg.decay_mode = BacktestConfig::DecayMode::On;
    const auto eg_on = run_backtest(p, "eg", cfg);
    CHECK_FALSE(eg_on.days[3].weights == eg_on.days[3].predicted);
}

TEST_CASE("refits happen every m trading days") {
    const PriceMatrix p = test::random_prices(90, 3, 5);
    const auto res = run_backtest(p, "mlp", small_config());
    for (const auto& d : res.days) CHECK(d.refit == ((d.day - res.window.first) % 5 == 0));
}

TEST_CASE("fees only ever lower net returns") {
    const PriceMatrix p = test::random_prices(120, 4, 6);
    auto cfg = small_config();
    const auto free = run_backtest(p, "mlp", cfg);
    for (const auto& d : free.days) CHECK(d.net == d.gross);
    cfg.fee = 0.002;
    const auto paid = run_backtest(p, "mlp", cfg);
    for (std::size_t i = 0; i < paid.days.size(); ++i) {
        CHECK(paid.days[i].gross == free.days[i].gross);
        CHECK(paid.days[i].net <= free.days[i].net);
    }
    CHECK(paid.net_metrics.annualized_return < free.net_metrics.annualized_return);
}

TEST_CASE("benchmark reflexivity and information ratio") {
    const PriceMatrix p = test::random_prices(120, 4, 7);
    const auto cfg = small_config();
    const auto ucrp = run_backtest(p, "ucrp", cfg);
    CHECK_FALSE(ucrp.net_metrics.information_ratio.has_value());
    const auto eg = run_backtest(p, "eg", cfg);
    CHECK(eg.benchmark_net == ucrp.net_returns());
    CHECK(eg.net_metrics.information_ratio.has_value());
    auto nob = cfg;
    nob.benchmark.clear();
    CHECK_FALSE(run_backtest(p, "eg", nob).net_metrics.information_ratio.has_value());
}

TEST_CASE("outputs up to day t do not depend on prices after t+1") {
    const PriceMatrix p = test::random_prices(110, 3, 8);
    const auto cfg = small_config();
    for (const std::string id : {"mlp", "knn", "up", "anticor", "cwmr", "rmr", "bnn", "corn"}) {
        const auto full = run_backtest(p, id, cfg);
        for (std::size_t cut : {45u, 70u, 101u}) {
            const auto part = run_backtest(p.slice(0, cut + 1), id, cfg);
            REQUIRE(part.days.back().day == cut);
            for (std::size_t i = 0; i < part.days.size(); ++i) {
                CHECK(part.days[i].weights == full.days[i].weights);
                CHECK(part.days[i].net == full.days[i].net);
            }
        }
    }
}

TEST_CASE("runs are deterministic") {
    const PriceMatrix p = test::random_prices(100, 3, 9);
    const auto cfg = small_config();
    for (const std::string id : {"mlp", "up"}) {
        const auto a = run_backtest(p, id, cfg);
        const auto b = run_backtest(p, id, cfg);
        CHECK(format_weights_csv(a) == format_weights_csv(b));
        CHECK(format_returns_csv(a) == format_returns_csv(b));
    }
}

TEST_CASE("csv writers") {
    const PriceMatrix p = test::random_prices(50, 2, 10);
    auto cfg = small_config();
    const auto res = run_backtest(p, "ucrp", cfg);
    const auto w = format_weights_csv(res);
    CHECK(w.rfind("date,A0,A1\n" + p.dates()[40].to_string() + ",0.5,0.5\n", 0) == 0);
    const auto r = format_returns_csv(res);
    CHECK(r.rfind("date,gross,cost,net,wealth\n", 0) == 0);
    CHECK(std::count(r.begin(), r.end(), '\n') == static_cast<long>(res.days.size() + 1));
}

TEST_CASE("config validation rejects bad values") {
    BacktestConfig cfg;
    cfg.fee = -0.1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.decay_alpha = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.refit_interval = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
