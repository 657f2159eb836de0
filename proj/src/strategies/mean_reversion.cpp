#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankfolio/classic.h"
#include "rankfolio/geometric_median.h"

namespace rankfolio {

namespace {

std::vector<double> drift(std::span<const double> b, std::span<const double> x) {
    std::vector<double> out(b.size());
    const double g = dot(b, x);
    for (std::size_t j = 0; j < b.size(); ++j) out[j] = b[j] * x[j] / g;
    return out;
}

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

}  // namespace

// --- Anticor ---

WeightVector anticor_rebalance(std::span<const double> current, std::span<const double> older,
                               std::span<const double> recent, std::size_t window) {
    const std::size_t n = current.size();
    const double denom = static_cast<double>(window - 1);
    std::vector<double> mu1(n, 0.0), mu2(n, 0.0), sd1(n, 0.0), sd2(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < window; ++k) {
            mu1[j] += older[k * n + j];
            mu2[j] += recent[k * n + j];
        }
        mu1[j] /= static_cast<double>(window);
        mu2[j] /= static_cast<double>(window);
        for (std::size_t k = 0; k < window; ++k) {
            sd1[j] += (older[k * n + j] - mu1[j]) * (older[k * n + j] - mu1[j]);
            sd2[j] += (recent[k * n + j] - mu2[j]) * (recent[k * n + j] - mu2[j]);
        }
        sd1[j] = std::sqrt(sd1[j] / denom);
        sd2[j] = std::sqrt(sd2[j] / denom);
    }
    // corr(i, j) between asset i in the older window and asset j in the recent one.
    std::vector<double> corr(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (sd1[i] == 0.0 || sd2[j] == 0.0) continue;
            double cov = 0.0;
            for (std::size_t k = 0; k < window; ++k) {
                cov += (older[k * n + i] - mu1[i]) * (recent[k * n + j] - mu2[j]);
            }
            corr[i * n + j] = cov / denom / (sd1[i] * sd2[j]);
        }
    }
    std::vector<double> claim(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (mu2[i] >= mu2[j] && corr[i * n + j] > 0.0) {
                claim[i * n + j] = corr[i * n + j] + std::max(-corr[i * n + i], 0.0) + std::max(-corr[j * n + j], 0.0);
            }
        }
    }
    WeightVector out(current.begin(), current.end());
    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) total += claim[i * n + j];
        if (total <= 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            const double moved = current[i] * claim[i * n + j] / total;
            out[i] -= moved;
            out[j] += moved;
        }
    }
    return clean_simplex(out);
}

WeightVector Anticor::next(const HistoryView& h) {
    const std::size_t t = h.last();
    const std::size_t n = h.assets();
    if (window_ < 2 || t < 2 * window_) {
        last_ = uniform_weights(n);
        return *last_;
    }
    std::vector<double> older(window_ * n), recent(window_ * n);
    for (std::size_t k = 0; k < window_; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            older[k * n + j] = std::log(h.relative(t - 2 * window_ + 1 + k, j));
            recent[k * n + j] = std::log(h.relative(t - window_ + 1 + k, j));
        }
    }
    const WeightVector current = last_ ? drift(*last_, h.relatives(t)) : uniform_weights(n);
    last_ = anticor_rebalance(current, older, recent, window_);
    return *last_;
}

// --- Passive-aggressive family ---

WeightVector pamr_update(std::span<const double> b, std::span<const double> x, double epsilon) {
    const double loss = std::max(0.0, dot(b, x) - epsilon);
    const double xbar = mean(x);
    double norm2 = 0.0;
    for (double v : x) norm2 += (v - xbar) * (v - xbar);
    if (loss == 0.0 || norm2 == 0.0) return WeightVector(b.begin(), b.end());
    const double tau = loss / norm2;
    std::vector<double> v(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) v[j] = b[j] - tau * (x[j] - xbar);
    return project_to_simplex(v);
}

WeightVector PassiveAggressiveMeanReversion::next(const HistoryView& h) {
    if (!last_) {
        last_ = uniform_weights(h.assets());
        return *last_;
    }
    last_ = pamr_update(*last_, h.relatives(h.last()), epsilon_);
    return *last_;
}

WeightVector reversion_update(std::span<const double> b, std::span<const double> predicted, double epsilon) {
    const double xbar = mean(predicted);
    double norm2 = 0.0;
    for (double v : predicted) norm2 += (v - xbar) * (v - xbar);
    const double gap = epsilon - dot(b, predicted);
    if (norm2 == 0.0 || gap <= 0.0) return WeightVector(b.begin(), b.end());
    const double lambda = gap / norm2;
    std::vector<double> v(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) v[j] = b[j] + lambda * (predicted[j] - xbar);
    return project_to_simplex(v);
}

std::vector<double> moving_average_prediction(const HistoryView& h, std::size_t window) {
    const std::size_t t = h.last();
    if (window == 0 || t + 1 < window) throw std::out_of_range("olmar: not enough history for the window");
    std::vector<double> xhat(h.assets(), 0.0);
    for (std::size_t j = 0; j < xhat.size(); ++j) {
        for (std::size_t k = 0; k < window; ++k) xhat[j] += h.price(t - k, j) / h.price(t, j);
        xhat[j] /= static_cast<double>(window);
    }
    return xhat;
}

std::vector<double> l1_median_prediction(const HistoryView& h, std::size_t window) {
    const std::size_t t = h.last();
    const std::size_t n = h.assets();
    if (window == 0 || t + 1 < window) throw std::out_of_range("rmr: not enough history for the window");
    std::vector<double> points(window * n);
    for (std::size_t k = 0; k < window; ++k) {
        for (std::size_t j = 0; j < n; ++j) points[k * n + j] = h.price(t - k, j) / h.price(t, j);
    }
    return geometric_median(points, n);
}

WeightVector MovingAverageReversion::next(const HistoryView& h) {
    if (!last_) last_ = uniform_weights(h.assets());
    if (h.last() + 1 < window_) return *last_;
    last_ = reversion_update(*last_, moving_average_prediction(h, window_), epsilon_);
    return *last_;
}

WeightVector RobustMedianReversion::next(const HistoryView& h) {
    if (!last_) last_ = uniform_weights(h.assets());
    if (h.last() + 1 < window_) return *last_;
    last_ = reversion_update(*last_, l1_median_prediction(h, window_), epsilon_);
    return *last_;
}

// --- CWMR ---

CwmrState cwmr_initial_state(std::size_t n) {
    const double nn = static_cast<double>(n);
    return CwmrState{uniform_weights(n), std::vector<double>(n, 1.0 / (nn * nn))};
}

bool cwmr_update(CwmrState& s, std::span<const double> x, double phi, double epsilon) {
    const std::size_t n = x.size();
    double m = 0.0, v = 0.0, sx = 0.0, trace = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        m += s.mean[j] * x[j];
        v += s.variance[j] * x[j] * x[j];
        sx += s.variance[j] * x[j];
        trace += s.variance[j];
    }
    const double c = epsilon - m - phi * v;
    if (c >= 0.0) return false;  // constraint already satisfied

    const double x_upper = sx / trace;
    const double a = 2.0 * phi * v * v - 2.0 * phi * v * x_upper * sx;
    const double b = 2.0 * phi * epsilon * v - 2.0 * phi * v * m + v - x_upper * sx;
    double lambda = 0.0;
    if (a != 0.0) {
        const double disc = b * b - 4.0 * a * c;
        if (disc > 0.0) {
            const double root = std::sqrt(disc);
            lambda = std::max({(-b + root) / (2.0 * a), (-b - root) / (2.0 * a), 0.0});
        }
    } else if (b != 0.0) {
        lambda = std::max(-c / b, 0.0);
    }
    if (lambda == 0.0) return false;

    std::vector<double> mu(n);
    for (std::size_t j = 0; j < n; ++j) mu[j] = s.mean[j] - lambda * s.variance[j] * (x[j] - x_upper);
    for (std::size_t j = 0; j < n; ++j) s.variance[j] = 1.0 / (1.0 / s.variance[j] + 2.0 * lambda * phi * x[j] * x[j]);
    s.mean = project_to_simplex(mu);
    double tr = 0.0;
    for (double var : s.variance) tr += var;
    for (double& var : s.variance) var /= tr * static_cast<double>(n);
    return true;
}

WeightVector ConfidenceWeightedMeanReversion::next(const HistoryView& h) {
    if (!state_) {
        state_ = cwmr_initial_state(h.assets());
        return state_->mean;
    }
    cwmr_update(*state_, h.relatives(h.last()), phi_, epsilon_);
    return state_->mean;
}

}  // namespace rankfolio
