#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

#include "rankfolio/simplex.h"

namespace rankfolio {

struct LogOptimalOptions {
    double step_tolerance = 1e-10;
    int max_iterations = 10000;
    // w.x is floored here inside the logarithm.
    double growth_floor = 1e-12;
};

struct LogOptimalResult {
    WeightVector weights;
    double objective = 0.0;  // sum_i log(w . x_i)
    int iterations = 0;
    bool converged = false;
    bool floor_binding = false;  // some w . x_i <= growth_floor at the end
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Maximizes sum_i log(w . x_i) over the simplex by projected gradient ascent
// with backtracking, starting from uniform weights. `relatives` is an m x n
// row-major matrix of price relatives.
LogOptimalResult log_optimal_portfolio(std::span<const double> relatives, std::size_t n,
                                       const LogOptimalOptions& opt = {});

double log_growth_objective(std::span<const double> relatives, std::size_t n, std::span<const double> w,
                            double growth_floor = 1e-12);

}  // namespace rankfolio
