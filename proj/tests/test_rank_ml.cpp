#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rankfolio/features.h"
#include "rankfolio/knn.h"
#include "rankfolio/mlp.h"
#include "rankfolio/rank_learner.h"
#include "support.h"

using namespace rankfolio;

namespace {

std::vector<double> uniform_vec(std::size_t n, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

// Straight-line forward pass: ReLU hidden layers, identity output.
std::vector<double> forward_oracle(const Mlp& m, std::vector<double> x) {
    const auto& sizes = m.layer_sizes();
    std::size_t off = 0;
    const auto p = m.parameters();
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const std::size_t in = sizes[l], out = sizes[l + 1];
        std::vector<double> y(out);
        for (std::size_t o = 0; o < out; ++o) {
            double s = p[off + in * out + o];
            for (std::size_t i = 0; i < in; ++i) s += p[off + o * in + i] * x[i];
            y[o] = (l + 2 < sizes.size()) ? std::max(0.0, s) : s;
        }
        off += in * out + out;
        x = y;
    }
    return x;
}

// Mean of the k nearest target rows, by full sort on (distance, index).
std::vector<double> knn_oracle(const std::vector<double>& f, const std::vector<double>& y, std::size_t rows,
                               std::size_t dim, const std::vector<double>& q, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (std::size_t i = 0; i < dim; ++i) s += (f[r * dim + i] - q[i]) * (f[r * dim + i] - q[i]);
        d.emplace_back(s, r);
    }
    std::sort(d.begin(), d.end());
    const std::size_t out = y.size() / rows;
    std::vector<double> res(out, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t o = 0; o < out; ++o) res[o] += y[d[i].second * out + o];
    }
    for (double& v : res) v /= static_cast<double>(k);
    return res;
}

}  // namespace

TEST_CASE("rank transform reproduces the published prediction-target table") {
    // LINK, BNB, EOS, ETC, BCH, TRX, ADA, XRP, BTC, ETH
    const std::vector<double> r{0.0863, -0.0196, -0.0076, -0.0025, -0.0151, 0.0036, -0.0056, -0.0208, -0.0048, -0.0047};
    const std::vector<double> rank{10, 2, 4, 8, 3, 9, 5, 1, 6, 7};
    const std::vector<double> rank2{100, 4, 16, 64, 9, 81, 25, 1, 36, 49};
    CHECK(rank_transform(r, 1) == rank);
    CHECK(rank_transform(r, 2) == rank2);
    CHECK(make_target(r, TargetSpec{TargetSpec::Mode::Rank, 2}) == rank2);
    CHECK(make_target(r, TargetSpec{TargetSpec::Mode::Return, 1}) == r);
}

TEST_CASE("rank ties are broken by asset index") {
    const std::vector<double> r{0.1, -0.2, 0.1, 0.1};
    CHECK(rank_transform(r, 1) == std::vector<double>{2, 1, 3, 4});
    CHECK(rank_transform(r, 3) == std::vector<double>{8, 1, 27, 64});
    CHECK_THROWS_AS(rank_transform(r, 0), std::invalid_argument);
}

TEST_CASE("target spec parsing") {
    CHECK(TargetSpec::parse("return").mode == TargetSpec::Mode::Return);
    CHECK(TargetSpec::parse("3") == TargetSpec{TargetSpec::Mode::Rank, 3});
    CHECK(TargetSpec::parse("2").to_string() == "2");
    CHECK(TargetSpec::parse("return").to_string() == "return");
    CHECK_THROWS_AS(TargetSpec::parse("0"), std::invalid_argument);
    CHECK_THROWS_AS(TargetSpec::parse("2x"), std::invalid_argument);
    CHECK_THROWS_AS(TargetSpec::parse(""), std::invalid_argument);
}

TEST_CASE("spearman with average ranks") {
    const std::vector<double> t{1, 2, 3, 4};
    CHECK(spearman(t, std::vector<double>{10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman(t, std::vector<double>{4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman(t, std::vector<double>{5, 5, 5, 5}) == 0.0);
    CHECK(spearman(t, std::vector<double>{1, 2, 2, 3}) == doctest::Approx(4.5 / std::sqrt(22.5)));
    // Monotone transforms leave it unchanged.
    CHECK(spearman(t, std::vector<double>{1, 8, 27, 1000}) == doctest::Approx(1.0));
}

TEST_CASE("features are last return, volatility, sharpe and trend") {
    const PriceMatrix p = parse_csv(
        "date,A,B\n2020-01-01,100,5\n2020-01-02,110,5\n2020-01-03,99,5\n2020-01-04,108.9,5\n2020-01-05,120,5\n");
    FeatureOptions opt;
    opt.window = 3;
    const auto f = compute_features(p, 3, opt);
    REQUIRE(f.size() == 8);
    const std::vector<double> r{0.1, -0.1, 0.1};
    const double mean = 0.1 / 3.0;
    double ss = 0.0;
    for (double v : r) ss += (v - mean) * (v - mean);
    const double vol = std::sqrt(ss / 2.0);
    CHECK(f[0] == doctest::Approx(0.1));
    CHECK(f[2] == doctest::Approx(vol));
    CHECK(f[4] == doctest::Approx(mean / vol));
    // prices 110, 99, 108.9 against time 1, 2, 3: ranks (3, 1, 2)
    CHECK(f[6] == doctest::Approx(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{3, 1, 2})));
    CHECK(f[1] == 0.0);
    CHECK(f[3] == 0.0);
    CHECK(f[5] == 0.0);
    CHECK(f[7] == 0.0);
    opt.trend = TrendMeasure::ReturnSpearman;
    CHECK(compute_features(p, 3, opt)[6] == doctest::Approx(spearman(std::vector<double>{1, 2, 3}, r)));
    CHECK_THROWS_AS(compute_features(p, 2, opt), std::out_of_range);
}

TEST_CASE("features at day t never read later prices") {
    const PriceMatrix p = test::random_prices(60, 4, 2);
    for (std::size_t t : {20u, 33u, 58u}) {
        CHECK(compute_features(p, t) == compute_features(p.slice(0, t), t));
    }
}

TEST_CASE("training rows pair day-s features with the s to s+1 target") {
    const PriceMatrix p = test::random_prices(140, 5, 4);
    const std::size_t t = 120, lookback = 80;
    const TargetSpec spec{TargetSpec::Mode::Rank, 2};
    const auto ts = build_training_set(p, t, lookback, spec);
    CHECK(ts.rows == lookback);
    CHECK(ts.first_day == t - lookback);
    CHECK(ts.feature_dim == 20);
    CHECK(ts.target_dim == 5);
    for (std::size_t r = 0; r < ts.rows; ++r) {
        const std::size_t s = ts.first_day + r;
        const auto f = compute_features(p, s);
        CHECK(std::vector<double>(ts.feature_row(r).begin(), ts.feature_row(r).end()) == f);
        const auto y = rank_transform(returns_at(p, s), 2);
        CHECK(std::vector<double>(ts.target_row(r).begin(), ts.target_row(r).end()) == y);
    }
    const auto cut = build_training_set(p.slice(0, t), t, lookback, spec);
    CHECK(cut.features == ts.features);
    CHECK(cut.targets == ts.targets);
    CHECK_THROWS_AS(build_training_set(p, 99, lookback, spec), std::out_of_range);
}

TEST_CASE("normalizer uses the population std with a floor") {
    const std::vector<double> rows{1, 5, 3, 5, 5, 5};
    const auto nz = Normalizer::fit(rows, 2);
    CHECK(nz.mean[0] == doctest::Approx(3.0));
    CHECK(nz.std[0] == doctest::Approx(std::sqrt(8.0 / 3.0)));
    CHECK(nz.std[1] == Normalizer::kStdFloor);
    const auto z = nz.transform(std::vector<double>{3, 5});
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.0);
    const auto all = nz.transform_rows(rows);
    CHECK(all[0] == doctest::Approx(-2.0 / std::sqrt(8.0 / 3.0)));
}

TEST_CASE("mlp initialization follows the glorot bound and the seed") {
    const auto m = Mlp::initialized({4, 3, 2}, 10);
    CHECK(m.parameters().size() == 4 * 3 + 3 + 3 * 2 + 2);
    const double b0 = std::sqrt(6.0 / 7.0), b1 = std::sqrt(6.0 / 5.0);
    for (std::size_t k = 0; k < 15; ++k) CHECK(std::fabs(m.parameters()[k]) <= b0);
    for (std::size_t k = 15; k < 23; ++k) CHECK(std::fabs(m.parameters()[k]) <= b1);
    CHECK(Mlp::initialized({4, 3, 2}, 10) == m);
    CHECK_FALSE(Mlp::initialized({4, 3, 2}, 11) == m);
    std::mt19937_64 rng(10);
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    CHECK(m.parameters()[0] == b0 * (2.0 * u - 1.0));
}

TEST_CASE("mlp forward pass matches a straight-line oracle") {
    std::mt19937_64 rng(2);
    auto m = Mlp::initialized({5, 4, 3, 2}, 3);
    for (int q = 0; q < 20; ++q) {
        const auto x = uniform_vec(5, -2, 2, rng);
        const auto y = m.predict(x);
        const auto o = forward_oracle(m, x);
        for (std::size_t i = 0; i < 2; ++i) CHECK(y[i] == doctest::Approx(o[i]).epsilon(1e-14));
    }
}

TEST_CASE("mlp gradient agrees with central differences") {
    std::mt19937_64 rng(99);
    const std::size_t batch = 6;
    for (int draw = 0; draw < 5; ++draw) {
        auto m = Mlp::initialized({4, 3, 3, 2}, static_cast<std::uint64_t>(draw));
        const auto x = uniform_vec(batch * 4, -1, 1, rng);
        const auto y = uniform_vec(batch * 2, -1, 1, rng);
        std::vector<double> g(m.parameters().size());
        const double l = m.loss_and_gradient(x, y, batch, g);
        CHECK(l == doctest::Approx(m.loss(x, y, batch)).epsilon(1e-14));
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double keep = m.parameters()[k];
            m.parameters()[k] = keep + 1e-5;
            const double up = m.loss(x, y, batch);
            m.parameters()[k] = keep - 1e-5;
            const double dn = m.loss(x, y, batch);
            m.parameters()[k] = keep;
            const double num = (up - dn) / 2e-5;
            CHECK(std::fabs(num - g[k]) <= 1e-7 + 1e-5 * std::fabs(g[k]));
        }
    }
}

TEST_CASE("adam training reduces the loss and is reproducible") {
    std::mt19937_64 rng(4);
    const std::size_t rows = 60;
    const auto x = uniform_vec(rows * 3, -1, 1, rng);
    std::vector<double> y(rows * 2);
    for (std::size_t r = 0; r < rows; ++r) {
        y[r * 2] = x[r * 3] - 0.5 * x[r * 3 + 1];
        y[r * 2 + 1] = x[r * 3 + 2] * x[r * 3 + 2];
    }
    MlpTrainOptions opt;
    opt.epochs = 300;
    opt.learning_rate = 1e-2;
    MlpTrainReport rep;
    const auto a = mlp_train(x, y, rows, {3, 8, 2}, opt, &rep);
    REQUIRE(rep.loss_history.size() == 301);
    CHECK(rep.loss_history.back() < 0.25 * rep.loss_history.front());
    CHECK(mlp_train(x, y, rows, {3, 8, 2}, opt) == a);
    opt.epochs = 0;
    CHECK(mlp_train(x, y, rows, {3, 8, 2}, opt) == Mlp::initialized({3, 8, 2}, opt.seed));
}

TEST_CASE("adam diverges loudly on non-finite data") {
    std::vector<double> x{1.0, 2.0};
    std::vector<double> y{1.0, std::nan("")};
    CHECK_THROWS_AS(mlp_train(x, y, 2, {1, 2, 1}), TrainingDiverged);
}

TEST_CASE("model snapshots round-trip bit for bit") {
    const auto m = Mlp::initialized({6, 5, 3}, 42);
    Normalizer nz;
    nz.mean = {0.1, -0.2, 1.0 / 3.0, 4, 5, 6};
    nz.std = {1, 2, 3, 1e-12, 0.5, 7.0 / 9.0};
    const auto snap = parse_model(format_model(m, &nz));
    CHECK(snap.model == m);
    REQUIRE(snap.normalizer.has_value());
    CHECK(*snap.normalizer == nz);
    CHECK_FALSE(parse_model(format_model(m)).normalizer.has_value());
    const auto dir = test::temp_dir("model");
    save_model(dir / "m.txt", m, &nz);
    CHECK(load_model(dir / "m.txt").model == m);
    CHECK_THROWS(parse_model("not a model"));
}

TEST_CASE("knn predictions equal an exhaustive-sort oracle") {
    std::mt19937_64 rng(8);
    const std::size_t rows = 80, dim = 6;
    auto f = uniform_vec(rows * dim, -1, 1, rng);
    for (std::size_t i = 0; i < dim; ++i) f[5 * dim + i] = f[2 * dim + i];  // duplicate row
    const auto y = uniform_vec(rows * 3, 0, 10, rng);
    for (const std::size_t k : {1u, 5u, 15u}) {
        for (int q = 0; q < 30; ++q) {
            auto query = uniform_vec(dim, -1, 1, rng);
            if (q == 0) query.assign(f.begin() + 2 * dim, f.begin() + 3 * dim);
            CHECK(knn_predict(f, y, rows, query, k) == knn_oracle(f, y, rows, dim, query, k));
        }
    }
    CHECK_THROWS_AS(knn_predict(f, y, rows, std::vector<double>(dim), 0), std::invalid_argument);
    CHECK_THROWS_AS(knn_predict(f, y, rows, std::vector<double>(dim), rows + 1), std::invalid_argument);
    CHECK_THROWS_AS(knn_predict({}, {}, 0, std::vector<double>(dim), 1), std::invalid_argument);
}

TEST_CASE("scores become long-only weights") {
    CHECK(scores_to_weights(std::vector<double>{1, 3}) == std::vector<double>{0.25, 0.75});
    CHECK(scores_to_weights(std::vector<double>{-1, 2, 2}) == std::vector<double>{0, 0.5, 0.5});
    CHECK(scores_to_weights(std::vector<double>{-1, -2}) == std::vector<double>{0.5, 0.5});
    CHECK(scores_to_weights(std::vector<double>{0, 1e-13}) == std::vector<double>{0.5, 0.5});
}

TEST_CASE("rank learner refits on schedule and stays on the simplex") {
    const PriceMatrix p = test::random_prices(150, 4, 5);
    for (const auto kind : {LearnerConfig::Kind::Mlp, LearnerConfig::Kind::Knn}) {
        LearnerConfig cfg;
        cfg.kind = kind;
        cfg.lookback = 40;
        cfg.refit_interval = 7;
        cfg.training.epochs = 30;
        RankLearnerStrategy s(cfg);
        CHECK_THROWS_AS(s.next(HistoryView(p, 59)), std::out_of_range);
        RankLearnerStrategy fresh(cfg);
        for (std::size_t t = 60; t < 149; ++t) {
            const auto w = fresh.next(HistoryView(p, t));
            CHECK(on_simplex(w));
            CHECK(w == scores_to_weights(fresh.last_scores()));
        }
        const auto& days = fresh.refit_days();
        REQUIRE(!days.empty());
        for (std::size_t i = 0; i < days.size(); ++i) CHECK(days[i] == 60 + 7 * i);
        CHECK(days.size() == (149 - 60 + 6) / 7);
    }
}

TEST_CASE("knn learner predicts from the normalized training block") {
    const PriceMatrix p = test::random_prices(120, 3, 9);
    LearnerConfig cfg;
    cfg.kind = LearnerConfig::Kind::Knn;
    cfg.lookback = 50;
    cfg.knn_k = 5;
    RankLearnerStrategy s(cfg);
    const HistoryView h(p, 100);
    s.next(h);
    const auto ts = build_training_set(h, 50, cfg.target);
    const auto nz = Normalizer::fit(ts.features, ts.feature_dim);
    const auto expect = knn_predict(nz.transform_rows(ts.features), ts.targets, ts.rows,
                                    nz.transform(compute_features(h, 100)), 5);
    CHECK(s.last_scores() == expect);
    CHECK(s.name() == "knn:2");
}
