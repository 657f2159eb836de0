#include "rankfolio/geometric_median.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rankfolio {

double sum_of_distances(std::span<const double> points, std::size_t dim, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < points.size() / dim; ++k) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double d = points[k * dim + i] - y[i];
            d2 += d * d;
        }
        s += std::sqrt(d2);
    }
    return s;
}

std::vector<double> geometric_median(std::span<const double> points, std::size_t dim,
                                     const GeometricMedianOptions& opt) {
    if (dim == 0 || points.empty() || points.size() % dim != 0) {
        throw std::invalid_argument("geometric_median: points must be a non-empty k x dim matrix");
    }
    const std::size_t k = points.size() / dim;
    std::vector<double> y(dim, 0.0);
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t i = 0; i < dim; ++i) y[i] += points[p * dim + i];
    }
    for (double& v : y) v /= static_cast<double>(k);
    if (k <= 2) return y;

    // A data point p_m is the median iff || sum_{p != p_m} unit(p - p_m) || <= multiplicity(p_m);
    // Weiszfeld only approaches such points asymptotically.
    {
        std::vector<double> pull(dim);
        for (std::size_t m = 0; m < k; ++m) {
            std::fill(pull.begin(), pull.end(), 0.0);
            std::size_t same = 0;
            for (std::size_t p = 0; p < k; ++p) {
                double d2 = 0.0;
                for (std::size_t i = 0; i < dim; ++i) {
                    const double d = points[p * dim + i] - points[m * dim + i];
                    d2 += d * d;
                }
                if (d2 == 0.0) {
                    ++same;
                    continue;
                }
                const double d = std::sqrt(d2);
                for (std::size_t i = 0; i < dim; ++i) pull[i] += (points[p * dim + i] - points[m * dim + i]) / d;
            }
            double r = 0.0;
            for (double v : pull) r += v * v;
            if (std::sqrt(r) <= static_cast<double>(same)) {
                return {points.begin() + static_cast<std::ptrdiff_t>(m * dim),
                        points.begin() + static_cast<std::ptrdiff_t>((m + 1) * dim)};
            }
        }
    }

    std::vector<double> num(dim), resid(dim), next(dim);
    for (int it = 0; it < opt.max_iterations; ++it) {
        std::fill(num.begin(), num.end(), 0.0);
        std::fill(resid.begin(), resid.end(), 0.0);
        double denom = 0.0;
        std::size_t coincident = 0;
        for (std::size_t p = 0; p < k; ++p) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                const double d = points[p * dim + i] - y[i];
                d2 += d * d;
            }
            const double d = std::sqrt(d2);
            if (d == 0.0) {
                ++coincident;
                continue;
            }
            denom += 1.0 / d;
            for (std::size_t i = 0; i < dim; ++i) {
                num[i] += points[p * dim + i] / d;
                resid[i] += (points[p * dim + i] - y[i]) / d;
            }
        }
        if (denom == 0.0) return y;  // every point coincides with y

        double r = 0.0;
        for (double v : resid) r += v * v;
        r = std::sqrt(r);
        const double eta = static_cast<double>(coincident);
        if (coincident > 0 && r <= eta) return y;  // y is a data point satisfying optimality

        const double keep = coincident > 0 ? std::min(1.0, eta / r) : 0.0;
        double moved = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double t = num[i] / denom;
            next[i] = (1.0 - keep) * t + keep * y[i];
            moved += (next[i] - y[i]) * (next[i] - y[i]);
        }
        y.swap(next);
        if (std::sqrt(moved) <= opt.tolerance) break;
    }
    return y;
}

}  // namespace rankfolio
