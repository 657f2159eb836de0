#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rankfolio {

// Mean of the target rows of the k training rows nearest to `query`
// (Euclidean). Distance ties go to the earliest row; the mean is accumulated
// nearest first. Features are used as given, so standardize beforehand.
std::vector<double> knn_predict(std::span<const double> train_features, std::span<const double> train_targets,
                                std::size_t rows, std::span<const double> query, std::size_t k);

}  // namespace rankfolio
