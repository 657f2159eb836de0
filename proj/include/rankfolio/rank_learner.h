#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rankfolio/features.h"
#include "rankfolio/mlp.h"
#include "rankfolio/strategy.h"

namespace rankfolio {

// Clips negative scores to zero and normalizes to the simplex; uniform when
// the clipped scores sum below 1e-12.
WeightVector scores_to_weights(std::span<const double> scores);

struct LearnerConfig {
    enum class Kind { Mlp, Knn };
    Kind kind = Kind::Mlp;
    TargetSpec target;
    std::size_t lookback = 80;
    std::size_t refit_interval = 10;
    FeatureOptions features;
    std::vector<std::size_t> hidden = {20, 20};
    MlpTrainOptions training;
    std::size_t knn_k = 15;
};

// Rolling-refit rank predictor: every `refit_interval` trading days it
// rebuilds the training block from the last `lookback` days, refits, and
// turns its prediction for today's features into weights.
class RankLearnerStrategy final : public Strategy {
public:
    explicit RankLearnerStrategy(LearnerConfig cfg) : cfg_(std::move(cfg)) {}

    std::string name() const override;
    WeightVector next(const HistoryView& h) override;
    bool decays_by_default() const override { return true; }

    // Raw scores behind the most recent weights.
    const std::vector<double>& last_scores() const { return scores_; }
    const std::vector<std::size_t>& refit_days() const { return refit_days_; }
    const std::optional<Mlp>& model() const { return mlp_; }
    const std::optional<Normalizer>& normalizer() const { return normalizer_; }

private:
    void refit(const HistoryView& h);
    std::vector<double> predict(const HistoryView& h) const;

    LearnerConfig cfg_;
    std::optional<std::size_t> first_day_;
    std::vector<std::size_t> refit_days_;
    std::optional<Normalizer> normalizer_;
    std::optional<Mlp> mlp_;
    std::vector<double> knn_features_, knn_targets_;
    std::size_t knn_rows_ = 0;
    std::vector<double> scores_;
};

}  // namespace rankfolio
