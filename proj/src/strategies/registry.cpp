#include <algorithm>
#include <stdexcept>

#include "rankfolio/classic.h"

namespace rankfolio {

const std::vector<std::string>& classic_strategy_names() {
    static const std::vector<std::string> names = {"bah",  "ucrp", "bcrp",  "up",  "eg",  "anticor",
                                                   "pamr", "cwmr", "olmar", "rmr", "bnn", "corn"};
    return names;
}

bool is_classic_strategy(const std::string& name) {
    const auto& names = classic_strategy_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::unique_ptr<Strategy> make_classic_strategy(const std::string& name, const ClassicParams& p) {
    if (name == "bah") return std::make_unique<BuyAndHold>();
    if (name == "ucrp") return std::make_unique<UniformCrp>();
    if (name == "bcrp") return std::make_unique<BestCrp>();
    if (name == "up") return std::make_unique<UniversalPortfolio>(p.up_samples, p.seed);
    if (name == "eg") return std::make_unique<ExponentialGradient>(p.eg_eta);
    if (name == "anticor") return std::make_unique<Anticor>(p.anticor_window);
    if (name == "pamr") return std::make_unique<PassiveAggressiveMeanReversion>(p.pamr_epsilon);
    if (name == "cwmr") return std::make_unique<ConfidenceWeightedMeanReversion>(p.cwmr_phi, p.cwmr_epsilon);
    if (name == "olmar") return std::make_unique<MovingAverageReversion>(p.olmar_window, p.olmar_epsilon);
    if (name == "rmr") return std::make_unique<RobustMedianReversion>(p.rmr_window, p.rmr_epsilon);
    if (name == "bnn") return std::make_unique<NearestNeighborLogOptimal>(p.bnn_neighbors, p.bnn_window);
    if (name == "corn") return std::make_unique<CorrelationDrivenLogOptimal>(p.corn_rho, p.corn_window);
    throw std::invalid_argument("unknown strategy '" + name + "'");
}

}  // namespace rankfolio
