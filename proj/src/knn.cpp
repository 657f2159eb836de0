#include "rankfolio/knn.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "rankfolio/kernels.h"

namespace rankfolio {

std::vector<double> knn_predict(std::span<const double> train_features, std::span<const double> train_targets,
                                std::size_t rows, std::span<const double> query, std::size_t k) {
    if (rows == 0) throw std::invalid_argument("knn_predict: empty training set");
    if (k == 0) throw std::invalid_argument("knn_predict: k must be positive");
    if (k > rows) throw std::invalid_argument("knn_predict: k exceeds the number of training rows");
    const std::size_t dim = query.size();
    if (train_features.size() != rows * dim) throw std::invalid_argument("knn_predict: feature dimension mismatch");
    if (train_targets.size() % rows != 0) throw std::invalid_argument("knn_predict: target shape mismatch");
    const std::size_t out_dim = train_targets.size() / rows;

    std::vector<double> dist(rows);
    kernels::squared_distances(train_features, dim, query, dist);
    std::vector<std::size_t> order(rows);
    std::iota(order.begin(), order.end(), 0);
    auto nearer = [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), nearer);

    std::vector<double> out(out_dim, 0.0);
    for (std::size_t q = 0; q < k; ++q) {
        const std::size_t r = order[q];
        for (std::size_t o = 0; o < out_dim; ++o) out[o] += train_targets[r * out_dim + o];
    }
    for (double& v : out) v /= static_cast<double>(k);
    return out;
}

}  // namespace rankfolio
