#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rankfolio/price_matrix.h"
#include "rankfolio/simplex.h"

namespace rankfolio {

// A stateful online allocator. The engine calls next() once per trading day
// in increasing day order; the view exposes rows [0, day] only.
class Strategy {
public:
    virtual ~Strategy() = default;

    virtual std::string name() const = 0;
    virtual WeightVector next(const HistoryView& history) = 0;

    // Strategies that legitimately need the whole trading period (BCRP) say
    // so here; the engine then calls observe_trading_period() first.
    virtual bool lookahead() const { return false; }
    // Trading days are [first_day, last_day]; day t earns p[t+1]/p[t].
    virtual void observe_trading_period(const PriceMatrix& /*prices*/, std::size_t /*first_day*/,
                                        std::size_t /*last_day*/) {}

    // Learners smooth their raw predictions by default; classic rules do not.
    virtual bool decays_by_default() const { return false; }
};

// Hyperparameters of the classic strategies; defaults follow the original
// publications of each method.
struct ClassicParams {
    double eg_eta = 0.05;
    std::size_t anticor_window = 5;
    double pamr_epsilon = 0.5;
    double cwmr_phi = 1.6448536269514722;  // standard normal quantile at 0.95
    double cwmr_epsilon = 0.5;
    std::size_t olmar_window = 5;
    double olmar_epsilon = 10.0;
    std::size_t rmr_window = 5;
    double rmr_epsilon = 5.0;
    std::size_t bnn_neighbors = 10;
    std::size_t bnn_window = 5;
    double corn_rho = 0.1;
    std::size_t corn_window = 5;
    std::size_t up_samples = 10000;
    std::uint64_t seed = 10;
};

// Canonical registry order: bah, ucrp, bcrp, up, eg, anticor, pamr, cwmr,
// olmar, rmr, bnn, corn.
const std::vector<std::string>& classic_strategy_names();
bool is_classic_strategy(const std::string& name);
// Throws std::invalid_argument("unknown strategy ...") for other names.
std::unique_ptr<Strategy> make_classic_strategy(const std::string& name, const ClassicParams& params = {});

}  // namespace rankfolio
