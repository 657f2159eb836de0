#include "rankfolio/log_optimal.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rankfolio {

double log_growth_objective(std::span<const double> relatives, std::size_t n, std::span<const double> w,
                            double growth_floor) {
    const std::size_t m = relatives.size() / n;
    double f = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        f += std::log(std::max(dot(w, relatives.subspan(i * n, n)), growth_floor));
    }
    return f;
}

LogOptimalResult log_optimal_portfolio(std::span<const double> relatives, std::size_t n,
                                       const LogOptimalOptions& opt) {
    if (n == 0 || relatives.empty() || relatives.size() % n != 0) {
        throw std::invalid_argument("log_optimal_portfolio: relatives must be a non-empty m x n matrix");
    }
    const std::size_t m = relatives.size() / n;
    const double inv_m = 1.0 / static_cast<double>(m);

    LogOptimalResult res;
    WeightVector w = uniform_weights(n);
    // Averaged objective keeps the step scale independent of m.
    double f = log_growth_objective(relatives, n, w, opt.growth_floor) * inv_m;
    std::vector<double> grad(n), trial(n);
    double step = 1.0;

    for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const auto x = relatives.subspan(i * n, n);
            const double g = std::max(dot(w, x), opt.growth_floor);
            for (std::size_t j = 0; j < n; ++j) grad[j] += x[j] / g;
        }
        for (double& g : grad) g *= inv_m;

        bool accepted = false;
        WeightVector next;
        double f_next = 0.0;
        while (step > 1e-30) {
            for (std::size_t j = 0; j < n; ++j) trial[j] = w[j] + step * grad[j];
            next = project_to_simplex(trial);
            double ascent = 0.0;
            double moved = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                ascent += grad[j] * (next[j] - w[j]);
                moved += (next[j] - w[j]) * (next[j] - w[j]);
            }
            moved = std::sqrt(moved);
            if (moved < opt.step_tolerance) break;
            f_next = log_growth_objective(relatives, n, next, opt.growth_floor) * inv_m;
            if (f_next >= f + 1e-4 * ascent) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            res.converged = true;
            break;
        }
        w = std::move(next);
        f = f_next;
        step = std::min(step * 2.0, 1e8);
    }

    res.weights = clean_simplex(w);
    res.objective = log_growth_objective(relatives, n, res.weights, opt.growth_floor);
    for (std::size_t i = 0; i < m; ++i) {
        if (dot(res.weights, relatives.subspan(i * n, n)) <= opt.growth_floor) res.floor_binding = true;
    }
    return res;
}

}  // namespace rankfolio
