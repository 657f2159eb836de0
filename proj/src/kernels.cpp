#include "rankfolio/kernels.h"

#include <cmath>
#include <limits>

#include <omp.h>

namespace rankfolio::kernels {

namespace {

// Below this much work the fork/join cost dominates.
constexpr std::size_t kParallelWork = 1 << 14;

inline double sq_dist(const double* row, const double* q, std::size_t dim) {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double d = row[i] - q[i];
        s += d * d;
    }
    return s;
}

inline double growth(const double* sample, const double* x, std::size_t n) {
    double g = 0.0;
    for (std::size_t j = 0; j < n; ++j) g += sample[j] * x[j];
    return g;
}

inline double pearson(const double* a, const double* b, std::size_t dim) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(dim);
    mb /= static_cast<double>(dim);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return sab / std::sqrt(saa * sbb);
}

inline void dense_row(const double* in, std::size_t in_dim, const double* w, const double* b, std::size_t out_dim,
                      double* out) {
    for (std::size_t o = 0; o < out_dim; ++o) {
        double s = b[o];
        const double* wo = w + o * in_dim;
        for (std::size_t i = 0; i < in_dim; ++i) s += in[i] * wo[i];
        out[o] = s;
    }
}

inline void weight_grad_unit(const double* in, const double* delta, std::size_t batch, std::size_t in_dim,
                             std::size_t out_dim, std::size_t o, double* gw, double* gb) {
    double bsum = 0.0;
    for (std::size_t i = 0; i < in_dim; ++i) gw[o * in_dim + i] = 0.0;
    for (std::size_t r = 0; r < batch; ++r) {
        const double d = delta[r * out_dim + o];
        bsum += d;
        const double* x = in + r * in_dim;
        for (std::size_t i = 0; i < in_dim; ++i) gw[o * in_dim + i] += d * x[i];
    }
    gb[o] = bsum;
}

inline void input_grad_row(const double* delta, std::size_t out_dim, const double* w, std::size_t in_dim,
                           double* out) {
    for (std::size_t i = 0; i < in_dim; ++i) out[i] = 0.0;
    for (std::size_t o = 0; o < out_dim; ++o) {
        const double d = delta[o];
        const double* wo = w + o * in_dim;
        for (std::size_t i = 0; i < in_dim; ++i) out[i] += d * wo[i];
    }
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

void squared_distances_serial(std::span<const double> rows, std::size_t dim, std::span<const double> query,
                              std::span<double> out) {
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = sq_dist(rows.data() + r * dim, query.data(), dim);
}

void squared_distances(std::span<const double> rows, std::size_t dim, std::span<const double> query,
                       std::span<double> out) {
    const auto count = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (out.size() * dim >= kParallelWork)
    for (std::ptrdiff_t r = 0; r < count; ++r) {
        out[static_cast<std::size_t>(r)] =
            sq_dist(rows.data() + static_cast<std::size_t>(r) * dim, query.data(), dim);
    }
}

void accumulate_log_growth_serial(std::span<const double> samples, std::span<const double> x,
                                  std::span<double> log_wealth) {
    const std::size_t n = x.size();
    for (std::size_t k = 0; k < log_wealth.size(); ++k) {
        log_wealth[k] += std::log(growth(samples.data() + k * n, x.data(), n));
    }
}

void accumulate_log_growth(std::span<const double> samples, std::span<const double> x,
                           std::span<double> log_wealth) {
    const std::size_t n = x.size();
    const auto count = static_cast<std::ptrdiff_t>(log_wealth.size());
#pragma omp parallel for schedule(static) if (log_wealth.size() * n >= kParallelWork)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        const auto u = static_cast<std::size_t>(k);
        log_wealth[u] += std::log(growth(samples.data() + u * n, x.data(), n));
    }
}

void row_correlations_serial(std::span<const double> rows, std::size_t dim, std::span<const double> query,
                             std::span<double> out) {
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = pearson(rows.data() + r * dim, query.data(), dim);
}

void row_correlations(std::span<const double> rows, std::size_t dim, std::span<const double> query,
                      std::span<double> out) {
    const auto count = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (out.size() * dim >= kParallelWork)
    for (std::ptrdiff_t r = 0; r < count; ++r) {
        out[static_cast<std::size_t>(r)] =
            pearson(rows.data() + static_cast<std::size_t>(r) * dim, query.data(), dim);
    }
}

void dense_forward_serial(std::span<const double> in, std::size_t batch, std::size_t in_dim,
                          std::span<const double> weight, std::span<const double> bias, std::size_t out_dim,
                          std::span<double> out) {
    for (std::size_t r = 0; r < batch; ++r) {
        dense_row(in.data() + r * in_dim, in_dim, weight.data(), bias.data(), out_dim, out.data() + r * out_dim);
    }
}

void dense_forward(std::span<const double> in, std::size_t batch, std::size_t in_dim,
                   std::span<const double> weight, std::span<const double> bias, std::size_t out_dim,
                   std::span<double> out) {
    const auto count = static_cast<std::ptrdiff_t>(batch);
#pragma omp parallel for schedule(static) if (batch * in_dim * out_dim >= kParallelWork)
    for (std::ptrdiff_t r = 0; r < count; ++r) {
        const auto u = static_cast<std::size_t>(r);
        dense_row(in.data() + u * in_dim, in_dim, weight.data(), bias.data(), out_dim, out.data() + u * out_dim);
    }
}

void dense_weight_grad_serial(std::span<const double> in, std::span<const double> delta, std::size_t batch,
                              std::size_t in_dim, std::size_t out_dim, std::span<double> grad_weight,
                              std::span<double> grad_bias) {
    for (std::size_t o = 0; o < out_dim; ++o) {
        weight_grad_unit(in.data(), delta.data(), batch, in_dim, out_dim, o, grad_weight.data(), grad_bias.data());
    }
}

void dense_weight_grad(std::span<const double> in, std::span<const double> delta, std::size_t batch,
                       std::size_t in_dim, std::size_t out_dim, std::span<double> grad_weight,
                       std::span<double> grad_bias) {
    const auto count = static_cast<std::ptrdiff_t>(out_dim);
#pragma omp parallel for schedule(static) if (batch * in_dim * out_dim >= kParallelWork)
    for (std::ptrdiff_t o = 0; o < count; ++o) {
        weight_grad_unit(in.data(), delta.data(), batch, in_dim, out_dim, static_cast<std::size_t>(o),
                         grad_weight.data(), grad_bias.data());
    }
}

void dense_input_grad_serial(std::span<const double> delta, std::size_t batch, std::size_t out_dim,
                             std::span<const double> weight, std::size_t in_dim, std::span<double> out) {
    for (std::size_t r = 0; r < batch; ++r) {
        input_grad_row(delta.data() + r * out_dim, out_dim, weight.data(), in_dim, out.data() + r * in_dim);
    }
}

void dense_input_grad(std::span<const double> delta, std::size_t batch, std::size_t out_dim,
                      std::span<const double> weight, std::size_t in_dim, std::span<double> out) {
    const auto count = static_cast<std::ptrdiff_t>(batch);
#pragma omp parallel for schedule(static) if (batch * in_dim * out_dim >= kParallelWork)
    for (std::ptrdiff_t r = 0; r < count; ++r) {
        const auto u = static_cast<std::size_t>(r);
        input_grad_row(delta.data() + u * out_dim, out_dim, weight.data(), in_dim, out.data() + u * in_dim);
    }
}

}  // namespace rankfolio::kernels
