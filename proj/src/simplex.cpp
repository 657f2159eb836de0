#include "rankfolio/simplex.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace rankfolio {

WeightVector uniform_weights(std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_weights: zero assets");
    return WeightVector(n, 1.0 / static_cast<double>(n));
}

WeightVector project_to_simplex(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("project_to_simplex: empty vector");
    std::vector<double> u(v.begin(), v.end());
    std::sort(u.begin(), u.end(), std::greater<double>());

    double cumsum = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumsum += u[j];
        const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) theta = t;
    }
    WeightVector w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = std::max(v[i] - theta, 0.0);
    return w;
}

bool on_simplex(std::span<const double> w, double tolerance) {
    double sum = 0.0;
    for (double x : w) {
        if (!(x >= -1e-12) || !std::isfinite(x)) return false;
        sum += x;
    }
    return !w.empty() && std::fabs(sum - 1.0) <= tolerance;
}

WeightVector clean_simplex(std::span<const double> w) {
    WeightVector out(w.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        out[i] = std::isfinite(w[i]) && w[i] > 0.0 ? w[i] : 0.0;
        sum += out[i];
    }
    if (!(sum > 1e-300)) return uniform_weights(w.size());
    for (double& x : out) x /= sum;
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace rankfolio
