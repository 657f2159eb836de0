#pragma once

// Concrete classic strategies. Every one returns uniform weights until it
// has the history it needs.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "rankfolio/log_optimal.h"
#include "rankfolio/strategy.h"

namespace rankfolio {

// Buy and hold from uniform weights at the first trading day.
class BuyAndHold final : public Strategy {
public:
    std::string name() const override { return "bah"; }
    WeightVector next(const HistoryView& h) override;

private:
    std::vector<double> start_prices_;
};

class UniformCrp final : public Strategy {
public:
    std::string name() const override { return "ucrp"; }
    WeightVector next(const HistoryView& h) override { return uniform_weights(h.assets()); }
};

// Best constant rebalanced portfolio in hindsight over the trading period.
class BestCrp final : public Strategy {
public:
    explicit BestCrp(LogOptimalOptions opt = {}) : opt_(opt) {}
    std::string name() const override { return "bcrp"; }
    bool lookahead() const override { return true; }
    void observe_trading_period(const PriceMatrix& prices, std::size_t first_day, std::size_t last_day) override;
    WeightVector next(const HistoryView& h) override;

private:
    LogOptimalOptions opt_;
    std::optional<WeightVector> weights_;
};

// Throws SolverError if the solver does not converge.
WeightVector bcrp_hindsight(const PriceMatrix& prices, std::size_t first_day, std::size_t last_day,
                            const LogOptimalOptions& opt = {});

// Draws one point uniformly from the simplex: e_j = -log(u_j) with
// u_j = ((rng() >> 11) + 1) * 2^-53, normalized by the sum.
WeightVector sample_simplex_uniform(std::mt19937_64& rng, std::size_t n);

// Cover's universal portfolio, Monte-Carlo approximated: a wealth-weighted
// average of `samples` CRPs drawn once at the first trading day.
class UniversalPortfolio final : public Strategy {
public:
    UniversalPortfolio(std::size_t samples, std::uint64_t seed) : samples_(samples), seed_(seed) {}
    std::string name() const override { return "up"; }
    WeightVector next(const HistoryView& h) override;

private:
    std::size_t samples_;
    std::uint64_t seed_;
    std::size_t n_ = 0;
    std::vector<double> portfolios_;  // samples_ x n_
    std::vector<double> log_wealth_;
};

// Exponentiated gradient.
class ExponentialGradient final : public Strategy {
public:
    explicit ExponentialGradient(double eta) : eta_(eta) {}
    std::string name() const override { return "eg"; }
    WeightVector next(const HistoryView& h) override;

private:
    double eta_;
    std::optional<WeightVector> last_;
};

class Anticor final : public Strategy {
public:
    explicit Anticor(std::size_t window) : window_(window) {}
    std::string name() const override { return "anticor"; }
    WeightVector next(const HistoryView& h) override;

private:
    std::size_t window_;
    std::optional<WeightVector> last_;
};

// One Anticor rebalance of `current` (already drifted) given log relatives
// of two consecutive windows (each window x n, row-major, oldest first).
WeightVector anticor_rebalance(std::span<const double> current, std::span<const double> older,
                               std::span<const double> recent, std::size_t window);

class PassiveAggressiveMeanReversion final : public Strategy {
public:
    explicit PassiveAggressiveMeanReversion(double epsilon) : epsilon_(epsilon) {}
    std::string name() const override { return "pamr"; }
    WeightVector next(const HistoryView& h) override;

private:
    double epsilon_;
    std::optional<WeightVector> last_;
};

// PAMR update of `b` after observing relatives `x`.
WeightVector pamr_update(std::span<const double> b, std::span<const double> x, double epsilon);

struct CwmrState {
    std::vector<double> mean;
    std::vector<double> variance;  // diagonal covariance
};

// Confidence-weighted mean reversion, variance form, diagonal covariance.
class ConfidenceWeightedMeanReversion final : public Strategy {
public:
    ConfidenceWeightedMeanReversion(double phi, double epsilon) : phi_(phi), epsilon_(epsilon) {}
    std::string name() const override { return "cwmr"; }
    WeightVector next(const HistoryView& h) override;
    const std::optional<CwmrState>& state() const { return state_; }

private:
    double phi_, epsilon_;
    std::optional<CwmrState> state_;
};

CwmrState cwmr_initial_state(std::size_t n);
// Returns true when the constraint was violated and the state changed.
bool cwmr_update(CwmrState& state, std::span<const double> x, double phi, double epsilon);

// Shared passive-aggressive step toward b . x_hat >= epsilon.
WeightVector reversion_update(std::span<const double> b, std::span<const double> predicted, double epsilon);

class MovingAverageReversion final : public Strategy {
public:
    MovingAverageReversion(std::size_t window, double epsilon) : window_(window), epsilon_(epsilon) {}
    std::string name() const override { return "olmar"; }
    WeightVector next(const HistoryView& h) override;

private:
    std::size_t window_;
    double epsilon_;
    std::optional<WeightVector> last_;
};

// x_hat_j = (1/w) sum_{k<w} p[t-k, j] / p[t, j]; requires t + 1 >= w.
std::vector<double> moving_average_prediction(const HistoryView& h, std::size_t window);
// L1-median of the price vectors p[t-k] / p[t], k < w.
std::vector<double> l1_median_prediction(const HistoryView& h, std::size_t window);

class RobustMedianReversion final : public Strategy {
public:
    RobustMedianReversion(std::size_t window, double epsilon) : window_(window), epsilon_(epsilon) {}
    std::string name() const override { return "rmr"; }
    WeightVector next(const HistoryView& h) override;

private:
    std::size_t window_;
    double epsilon_;
    std::optional<WeightVector> last_;
};

// A candidate pattern: the window of relatives ending at `end_day` and the
// relatives realized on the following day.
struct PatternMatch {
    std::size_t end_day;
    double score;
};

// k nearest windows of `window` price relatives to the most recent one.
// Ties resolve to the earliest window. Requires h.last() >= k + window.
std::vector<PatternMatch> nearest_patterns(const HistoryView& h, std::size_t window, std::size_t k);
// All windows whose correlation with the most recent one is >= rho, oldest first.
std::vector<PatternMatch> correlated_patterns(const HistoryView& h, std::size_t window, double rho);
// Log-optimal portfolio over the successors of the matched windows.
WeightVector successor_log_optimal(const HistoryView& h, const std::vector<PatternMatch>& matches);

class NearestNeighborLogOptimal final : public Strategy {
public:
    NearestNeighborLogOptimal(std::size_t k, std::size_t window) : k_(k), window_(window) {}
    std::string name() const override { return "bnn"; }
    WeightVector next(const HistoryView& h) override;

private:
    std::size_t k_, window_;
};

class CorrelationDrivenLogOptimal final : public Strategy {
public:
    CorrelationDrivenLogOptimal(double rho, std::size_t window) : rho_(rho), window_(window) {}
    std::string name() const override { return "corn"; }
    WeightVector next(const HistoryView& h) override;

private:
    double rho_;
    std::size_t window_;
};

}  // namespace rankfolio
