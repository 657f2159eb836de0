#include "rankfolio/engine.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace rankfolio {

void BacktestConfig::validate() const {
    if (lookback < 1) throw std::invalid_argument("lookback must be >= 1");
    if (refit_interval < 1) throw std::invalid_argument("refit interval must be >= 1");
    if (!(decay_alpha >= 0.0 && decay_alpha < 1.0)) throw std::invalid_argument("decay alpha must be in [0, 1)");
    if (!(fee >= 0.0) || !std::isfinite(fee)) throw std::invalid_argument("fee must be >= 0");
    if (feature_window < 2) throw std::invalid_argument("feature window must be >= 2");
    if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
    if (knn_k < 1) throw std::invalid_argument("knn k must be >= 1");
    if (start && end && *end < *start) throw std::invalid_argument("end date precedes start date");
}

TradingWindow resolve_trading_window(const PriceMatrix& prices, const BacktestConfig& cfg) {
    const std::size_t min_first = cfg.lookback + cfg.feature_window;
    if (prices.days() < min_first + 2) {
        throw std::out_of_range("insufficient history: " + std::to_string(prices.days()) + " days, need at least " +
                                std::to_string(min_first + 2) + " for lookback " + std::to_string(cfg.lookback) +
                                " and feature window " + std::to_string(cfg.feature_window));
    }
    const auto& dates = prices.dates();
    TradingWindow w{min_first, prices.days() - 2};
    if (cfg.start) {
        const auto it = std::lower_bound(dates.begin(), dates.end(), *cfg.start);
        const auto idx = static_cast<std::size_t>(it - dates.begin());
        if (idx < min_first) {
            throw std::out_of_range("insufficient history before start " + cfg.start->to_string() + ": need " +
                                    std::to_string(min_first) + " prior days");
        }
        w.first = idx;
    }
    if (cfg.end) {
        const auto it = std::upper_bound(dates.begin(), dates.end(), *cfg.end);
        const auto idx = static_cast<std::size_t>(it - dates.begin());
        if (idx == 0) throw std::out_of_range("end date precedes all data");
        w.last = std::min(w.last, idx - 1);
    }
    if (w.first > w.last) throw std::out_of_range("empty trading window");
    return w;
}

WeightVector apply_decay(std::span<const WeightVector> previous, std::span<const double> prediction, double alpha,
                         std::size_t length) {
    WeightVector out(prediction.begin(), prediction.end());
    double divisor = 1.0, factor = 1.0;
    const std::size_t terms = std::min(length, previous.size());
    for (std::size_t i = 0; i < terms; ++i) {
        factor *= alpha;
        const auto& past = previous[i];
        if (past.size() != out.size()) throw std::invalid_argument("apply_decay: dimension mismatch");
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += factor * past[j];
        divisor += factor;
    }
    for (double& v : out) v /= divisor;
    return out;
}

WeightVector drifted_weights(std::span<const double> w, std::span<const double> r) {
    if (w.size() != r.size()) throw std::invalid_argument("drifted_weights: dimension mismatch");
    WeightVector out(w.size());
    double total = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        out[j] = w[j] * (1.0 + r[j]);
        total += out[j];
    }
    if (!(total > 0.0)) throw std::domain_error("drifted_weights: portfolio value wiped out");
    for (double& v : out) v /= total;
    return out;
}

double turnover(std::span<const double> previous_drifted, std::span<const double> target) {
    double s = 0.0;
    if (previous_drifted.empty()) {
        for (double v : target) s += std::fabs(v);
        return s;
    }
    if (previous_drifted.size() != target.size()) throw std::invalid_argument("turnover: dimension mismatch");
    for (std::size_t j = 0; j < target.size(); ++j) s += std::fabs(target[j] - previous_drifted[j]);
    return s;
}

double transaction_cost(std::span<const double> previous_drifted, std::span<const double> target, double fee) {
    return fee * turnover(previous_drifted, target);
}

std::vector<double> BacktestResult::gross_returns() const {
    std::vector<double> out;
    out.reserve(days.size());
    for (const auto& d : days) out.push_back(d.gross);
    return out;
}

std::vector<double> BacktestResult::net_returns() const {
    std::vector<double> out;
    out.reserve(days.size());
    for (const auto& d : days) out.push_back(d.net);
    return out;
}

namespace {

struct LearnerId {
    LearnerConfig::Kind kind;
    std::optional<TargetSpec> target;
};

std::optional<LearnerId> parse_learner_id(const std::string& id) {
    const auto colon = id.find(':');
    const std::string head = id.substr(0, colon);
    LearnerId out;
    if (head == "mlp") {
        out.kind = LearnerConfig::Kind::Mlp;
    } else if (head == "knn") {
        out.kind = LearnerConfig::Kind::Knn;
    } else {
        return std::nullopt;
    }
    if (colon != std::string::npos) {
        try {
            out.target = TargetSpec::parse(id.substr(colon + 1));
        } catch (const std::invalid_argument&) {
            return std::nullopt;
        }
    }
    return out;
}

}  // namespace

bool is_known_strategy(const std::string& id) { return is_classic_strategy(id) || parse_learner_id(id).has_value(); }

std::string canonical_strategy_id(const std::string& id, const BacktestConfig& cfg) {
    if (auto l = parse_learner_id(id)) {
        return std::string(l->kind == LearnerConfig::Kind::Mlp ? "mlp" : "knn") + ":" +
               l->target.value_or(cfg.target).to_string();
    }
    if (!is_classic_strategy(id)) throw std::invalid_argument("unknown strategy '" + id + "'");
    return id;
}

std::unique_ptr<Strategy> make_strategy(const std::string& id, const BacktestConfig& cfg) {
    if (auto l = parse_learner_id(id)) {
        LearnerConfig lc;
        lc.kind = l->kind;
        lc.target = l->target.value_or(cfg.target);
        lc.lookback = cfg.lookback;
        lc.refit_interval = cfg.refit_interval;
        lc.features = FeatureOptions{cfg.feature_window, cfg.trend};
        lc.hidden = cfg.hidden;
        lc.training.epochs = cfg.epochs;
        lc.training.learning_rate = cfg.learning_rate;
        lc.training.seed = cfg.seed;
        lc.knn_k = cfg.knn_k;
        return std::make_unique<RankLearnerStrategy>(std::move(lc));
    }
    ClassicParams p = cfg.classic;
    p.seed = cfg.seed;
    return make_classic_strategy(id, p);
}

BacktestResult run_backtest(const PriceMatrix& prices, const std::string& strategy_id, const BacktestConfig& cfg,
                            const std::vector<double>* benchmark_net) {
    cfg.validate();
    const std::string label = canonical_strategy_id(strategy_id, cfg);
    auto strategy = make_strategy(strategy_id, cfg);
    const TradingWindow win = resolve_trading_window(prices, cfg);
    const bool decay = cfg.decay_mode == BacktestConfig::DecayMode::On ||
                       (cfg.decay_mode == BacktestConfig::DecayMode::Auto && strategy->decays_by_default());
    if (strategy->lookahead()) strategy->observe_trading_period(prices, win.first, win.last);
    const auto* learner = dynamic_cast<const RankLearnerStrategy*>(strategy.get());

    BacktestResult res;
    res.strategy = label;
    res.assets = prices.symbols();
    res.window = win;
    res.days.reserve(win.size());

    std::vector<WeightVector> smoothed;  // most recent first, at most decay_length entries
    WeightVector held_drifted;          // empty before the first trade
    double wealth = 1.0;
    for (std::size_t t = win.first; t <= win.last; ++t) {
        const HistoryView view(prices, t);
        DayRecord rec;
        rec.day = t;
        rec.date = prices.dates()[t];
        rec.predicted = strategy->next(view);
        if (rec.predicted.size() != prices.assets()) throw std::logic_error(label + ": wrong weight dimension");
        rec.refit = learner && !learner->refit_days().empty() && learner->refit_days().back() == t;

        if (decay && cfg.decay_length > 0 && cfg.decay_alpha > 0.0) {
            rec.weights = apply_decay(smoothed, rec.predicted, cfg.decay_alpha, cfg.decay_length);
            smoothed.insert(smoothed.begin(), rec.weights);
            if (smoothed.size() > cfg.decay_length) smoothed.pop_back();
        } else {
            rec.weights = rec.predicted;
        }

        const auto r = returns_at(prices, t);
        rec.gross = dot(rec.weights, r);
        rec.turnover = turnover(held_drifted, rec.weights);
        rec.cost = cfg.fee * rec.turnover;
        rec.net = rec.gross - rec.cost;
        wealth *= 1.0 + rec.net;
        rec.wealth = wealth;
        held_drifted = drifted_weights(rec.weights, r);
        res.days.push_back(std::move(rec));
    }

    const auto gross = res.gross_returns();
    const auto net = res.net_returns();
    if (benchmark_net) {
        res.benchmark_net = *benchmark_net;
    } else if (!cfg.benchmark.empty() && canonical_strategy_id(cfg.benchmark, cfg) != label) {
        static const std::vector<double> kNoBenchmark;
        res.benchmark_net = run_backtest(prices, cfg.benchmark, cfg, &kNoBenchmark).net_returns();
    }
    if (!res.benchmark_net.empty() && res.benchmark_net.size() != net.size()) {
        throw std::logic_error("benchmark series length mismatch");
    }
    const bool self_benchmark = !cfg.benchmark.empty() && canonical_strategy_id(cfg.benchmark, cfg) == label;
    std::span<const double> bench = self_benchmark ? std::span<const double>{} : std::span<const double>(res.benchmark_net);
    if (net.size() >= 2) {
        res.gross_metrics = compute_metrics(gross, bench, cfg.metrics);
        res.net_metrics = compute_metrics(net, bench, cfg.metrics);
    }
    return res;
}

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string format_weights_csv(const BacktestResult& result) {
    std::string out = "date";
    for (const auto& a : result.assets) out += "," + a;
    out += "\n";
    for (const auto& d : result.days) {
        out += d.date.to_string();
        for (double w : d.weights) out += "," + g17(w);
        out += "\n";
    }
    return out;
}

std::string format_returns_csv(const BacktestResult& result) {
    std::string out = "date,gross,cost,net,wealth\n";
    for (const auto& d : result.days) {
        out += d.date.to_string() + "," + g17(d.gross) + "," + g17(d.cost) + "," + g17(d.net) + "," + g17(d.wealth) +
               "\n";
    }
    return out;
}

}  // namespace rankfolio
