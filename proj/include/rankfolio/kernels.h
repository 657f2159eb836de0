#pragma once

// Data-parallel inner loops. Each kernel has a `_serial` reference kept for
// tests and benchmarks; the default version uses OpenMP. Every output element
// is produced by exactly one thread with the same summation order as the
// serial loop, so both versions agree bit for bit.

#include <cstddef>
#include <span>

namespace rankfolio::kernels {

// out[r] = sum_i (rows[r, i] - query[i])^2 for a row-major (out.size() x dim) matrix.
void squared_distances_serial(std::span<const double> rows, std::size_t dim, std::span<const double> query,
                              std::span<double> out);
void squared_distances(std::span<const double> rows, std::size_t dim, std::span<const double> query,
                       std::span<double> out);

// log_wealth[k] += log(samples[k, :] . x) for a row-major (log_wealth.size() x n) sample matrix.
void accumulate_log_growth_serial(std::span<const double> samples, std::span<const double> x,
                                  std::span<double> log_wealth);
void accumulate_log_growth(std::span<const double> samples, std::span<const double> x,
                           std::span<double> log_wealth);

// Pearson correlation between `query` (length dim) and each row of `rows`.
// Rows (or a query) with zero variance produce NaN.
void row_correlations_serial(std::span<const double> rows, std::size_t dim, std::span<const double> query,
                             std::span<double> out);
void row_correlations(std::span<const double> rows, std::size_t dim, std::span<const double> query,
                      std::span<double> out);

// Dense layer on a batch: out[r, o] = bias[o] + sum_i in[r, i] * weight[o, i].
void dense_forward_serial(std::span<const double> in, std::size_t batch, std::size_t in_dim,
                          std::span<const double> weight, std::span<const double> bias, std::size_t out_dim,
                          std::span<double> out);
void dense_forward(std::span<const double> in, std::size_t batch, std::size_t in_dim,
                   std::span<const double> weight, std::span<const double> bias, std::size_t out_dim,
                   std::span<double> out);

// Weight gradient: grad[o, i] = sum_r delta[r, o] * in[r, i]; bias: sum_r delta[r, o].
void dense_weight_grad_serial(std::span<const double> in, std::span<const double> delta, std::size_t batch,
                              std::size_t in_dim, std::size_t out_dim, std::span<double> grad_weight,
                              std::span<double> grad_bias);
void dense_weight_grad(std::span<const double> in, std::span<const double> delta, std::size_t batch,
                       std::size_t in_dim, std::size_t out_dim, std::span<double> grad_weight,
                       std::span<double> grad_bias);

// Backpropagated delta: out[r, i] = sum_o delta[r, o] * weight[o, i].
void dense_input_grad_serial(std::span<const double> delta, std::size_t batch, std::size_t out_dim,
                             std::span<const double> weight, std::size_t in_dim, std::span<double> out);
void dense_input_grad(std::span<const double> delta, std::size_t batch, std::size_t out_dim,
                      std::span<const double> weight, std::size_t in_dim, std::span<double> out);

int max_threads();

}  // namespace rankfolio::kernels
