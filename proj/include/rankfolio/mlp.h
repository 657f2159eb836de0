#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rankfolio/features.h"

namespace rankfolio {

class TrainingDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Fully connected network: ReLU on hidden layers, identity output.
// Parameters are stored flat, layer by layer: weights (out x in, row-major)
// followed by biases.
class Mlp {
public:
    Mlp() = default;
    explicit Mlp(std::vector<std::size_t> layer_sizes, std::uint64_t seed = 0);

    // Glorot-uniform weights and biases, bound sqrt(6 / (fan_in + fan_out)),
    // drawn in parameter order from mt19937_64(seed).
    static Mlp initialized(std::vector<std::size_t> layer_sizes, std::uint64_t seed);

    const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
    std::size_t input_dim() const { return sizes_.front(); }
    std::size_t output_dim() const { return sizes_.back(); }
    std::uint64_t seed() const { return seed_; }

    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }
    std::span<double> weights(std::size_t layer);
    std::span<double> biases(std::size_t layer);

    std::vector<double> predict(std::span<const double> input) const;
    std::vector<double> predict_batch(std::span<const double> inputs, std::size_t batch) const;

    // Half mean squared error over all batch x output entries.
    double loss(std::span<const double> inputs, std::span<const double> targets, std::size_t batch) const;
    // Same loss; `grad` receives d loss / d parameters.
    double loss_and_gradient(std::span<const double> inputs, std::span<const double> targets, std::size_t batch,
                             std::span<double> grad) const;

    bool operator==(const Mlp&) const = default;

private:
    std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
    std::size_t bias_offset(std::size_t layer) const {
        return offsets_[layer] + sizes_[layer] * sizes_[layer + 1];
    }

    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
    std::uint64_t seed_ = 0;
};

struct MlpTrainOptions {
    int epochs = 200;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 10;
};

struct MlpTrainReport {
    std::vector<double> loss_history;  // loss before each epoch's update, plus the final loss
};

// Full-batch Adam on the half-MSE loss from a fresh seeded initialization.
// `inputs` should already be standardized. Throws TrainingDiverged on a
// non-finite loss.
Mlp mlp_train(std::span<const double> inputs, std::span<const double> targets, std::size_t rows,
              std::vector<std::size_t> layer_sizes, const MlpTrainOptions& opt = {},
              MlpTrainReport* report = nullptr);

// Text snapshot; parameters are hex floats, so save/load is bit exact.
//   rankfolio-mlp 1
//   layers <n0> <n1> ...
//   seed <seed>
//   params <count>
//   <one hex float per line>
//   normalizer <dim>          (dim 0 when absent)
//   <mean hex floats, one line> / <std hex floats, one line>
void save_model(const std::filesystem::path& path, const Mlp& model, const Normalizer* normalizer = nullptr);
std::string format_model(const Mlp& model, const Normalizer* normalizer = nullptr);
struct ModelSnapshot {
    Mlp model;
    std::optional<Normalizer> normalizer;
};
ModelSnapshot load_model(const std::filesystem::path& path);
ModelSnapshot parse_model(const std::string& text);

}  // namespace rankfolio
