#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rankfolio {

struct GeometricMedianOptions {
    double tolerance = 1e-9;
    int max_iterations = 200;
};

// L1-median of k points (row-major k x dim) by the Vardi-Zhang modified
// Weiszfeld iteration, started at the centroid. Iterates that land on a data
// point are handled without dividing by zero, and a data point that is
// already optimal is returned exactly. For two points every point of
// the segment is optimal and the centroid (midpoint) is returned.
std::vector<double> geometric_median(std::span<const double> points, std::size_t dim,
                                     const GeometricMedianOptions& opt = {});

// sum_k ||y - p_k||
double sum_of_distances(std::span<const double> points, std::size_t dim, std::span<const double> y);

}  // namespace rankfolio
