#include "rankfolio/rank_learner.h"

#include <stdexcept>

#include "rankfolio/knn.h"

namespace rankfolio {

WeightVector scores_to_weights(std::span<const double> scores) {
    if (scores.empty()) throw std::invalid_argument("scores_to_weights: empty scores");
    WeightVector w(scores.size());
    double total = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] = scores[j] > 0.0 ? scores[j] : 0.0;
        total += w[j];
    }
    if (!(total >= 1e-12)) return uniform_weights(w.size());
    for (double& v : w) v /= total;
    return w;
}

std::string RankLearnerStrategy::name() const {
    return std::string(cfg_.kind == LearnerConfig::Kind::Mlp ? "mlp" : "knn") + ":" + cfg_.target.to_string();
}

void RankLearnerStrategy::refit(const HistoryView& h) {
    const auto ts = build_training_set(h, cfg_.lookback, cfg_.target, cfg_.features);
    normalizer_ = Normalizer::fit(ts.features, ts.feature_dim);
    auto inputs = normalizer_->transform_rows(ts.features);
    if (cfg_.kind == LearnerConfig::Kind::Mlp) {
        std::vector<std::size_t> sizes{ts.feature_dim};
        sizes.insert(sizes.end(), cfg_.hidden.begin(), cfg_.hidden.end());
        sizes.push_back(ts.target_dim);
        mlp_ = mlp_train(inputs, ts.targets, ts.rows, sizes, cfg_.training);
    } else {
        knn_features_ = std::move(inputs);
        knn_targets_ = ts.targets;
        knn_rows_ = ts.rows;
    }
    refit_days_.push_back(h.last());
}

std::vector<double> RankLearnerStrategy::predict(const HistoryView& h) const {
    const auto f = normalizer_->transform(compute_features(h, h.last(), cfg_.features));
    if (cfg_.kind == LearnerConfig::Kind::Mlp) return mlp_->predict(f);
    return knn_predict(knn_features_, knn_targets_, knn_rows_, f, cfg_.knn_k);
}

WeightVector RankLearnerStrategy::next(const HistoryView& h) {
    const std::size_t t = h.last();
    if (t < cfg_.lookback + cfg_.features.window) {
        throw std::out_of_range(name() + ": day " + std::to_string(t) + " has insufficient history (needs " +
                                std::to_string(cfg_.lookback + cfg_.features.window) + " prior days)");
    }
    if (cfg_.refit_interval == 0) throw std::invalid_argument(name() + ": refit interval must be >= 1");
    if (!first_day_) first_day_ = t;
    if ((t - *first_day_) % cfg_.refit_interval == 0) refit(h);
    scores_ = predict(h);
    return scores_to_weights(scores_);
}

}  // namespace rankfolio
