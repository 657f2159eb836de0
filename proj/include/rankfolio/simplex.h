#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rankfolio {

// Long-only allocation: entries >= 0, summing to 1.
using WeightVector = std::vector<double>;

WeightVector uniform_weights(std::size_t n);

// Euclidean projection onto {w >= 0, sum w = 1} (sort and threshold).
WeightVector project_to_simplex(std::span<const double> v);

bool on_simplex(std::span<const double> w, double tolerance = 1e-9);

// Clips round-off negatives and renormalizes; falls back to uniform when
// nothing positive is left.
WeightVector clean_simplex(std::span<const double> w);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace rankfolio
