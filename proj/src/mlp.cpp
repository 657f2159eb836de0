#include "rankfolio/mlp.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "rankfolio/kernels.h"

namespace rankfolio {

Mlp::Mlp(std::vector<std::size_t> layer_sizes, std::uint64_t seed) : sizes_(std::move(layer_sizes)), seed_(seed) {
    if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output layers");
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        if (sizes_[l] == 0 || sizes_[l + 1] == 0) throw std::invalid_argument("Mlp: empty layer");
        offsets_.push_back(total);
        total += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
    }
    params_.assign(total, 0.0);
}

Mlp Mlp::initialized(std::vector<std::size_t> layer_sizes, std::uint64_t seed) {
    Mlp m(std::move(layer_sizes), seed);
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < m.sizes_.size(); ++l) {
        const double bound = std::sqrt(6.0 / static_cast<double>(m.sizes_[l] + m.sizes_[l + 1]));
        const std::size_t count = m.sizes_[l] * m.sizes_[l + 1] + m.sizes_[l + 1];
        for (std::size_t k = 0; k < count; ++k) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            m.params_[m.offsets_[l] + k] = bound * (2.0 * u - 1.0);
        }
    }
    return m;
}

std::span<double> Mlp::weights(std::size_t layer) {
    return {params_.data() + weight_offset(layer), sizes_[layer] * sizes_[layer + 1]};
}

std::span<double> Mlp::biases(std::size_t layer) { return {params_.data() + bias_offset(layer), sizes_[layer + 1]}; }

std::vector<double> Mlp::predict_batch(std::span<const double> inputs, std::size_t batch) const {
    if (inputs.size() != batch * input_dim()) throw std::invalid_argument("Mlp::predict: input dimension mismatch");
    std::vector<double> act(inputs.begin(), inputs.end()), next;
    const std::size_t layers = sizes_.size() - 1;
    for (std::size_t l = 0; l < layers; ++l) {
        next.assign(batch * sizes_[l + 1], 0.0);
        kernels::dense_forward(act, batch, sizes_[l], std::span(params_).subspan(weight_offset(l)),
                               std::span(params_).subspan(bias_offset(l)), sizes_[l + 1], next);
        if (l + 1 < layers) {
            for (double& v : next) v = v > 0.0 ? v : 0.0;
        }
        act.swap(next);
    }
    return act;
}

std::vector<double> Mlp::predict(std::span<const double> input) const { return predict_batch(input, 1); }

double Mlp::loss(std::span<const double> inputs, std::span<const double> targets, std::size_t batch) const {
    const auto out = predict_batch(inputs, batch);
    if (targets.size() != out.size()) throw std::invalid_argument("Mlp::loss: target dimension mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) s += (out[k] - targets[k]) * (out[k] - targets[k]);
    return 0.5 * s / static_cast<double>(out.size());
}

double Mlp::loss_and_gradient(std::span<const double> inputs, std::span<const double> targets, std::size_t batch,
                              std::span<double> grad) const {
    if (inputs.size() != batch * input_dim()) throw std::invalid_argument("Mlp: input dimension mismatch");
    if (targets.size() != batch * output_dim()) throw std::invalid_argument("Mlp: target dimension mismatch");
    if (grad.size() != params_.size()) throw std::invalid_argument("Mlp: gradient buffer size mismatch");
    const std::size_t layers = sizes_.size() - 1;

    // activations[l] is the input to layer l; activations[layers] is the output.
    std::vector<std::vector<double>> acts(layers + 1);
    acts[0].assign(inputs.begin(), inputs.end());
    for (std::size_t l = 0; l < layers; ++l) {
        acts[l + 1].assign(batch * sizes_[l + 1], 0.0);
        kernels::dense_forward(acts[l], batch, sizes_[l], std::span(params_).subspan(weight_offset(l)),
                               std::span(params_).subspan(bias_offset(l)), sizes_[l + 1], acts[l + 1]);
        if (l + 1 < layers) {
            for (double& v : acts[l + 1]) v = v > 0.0 ? v : 0.0;
        }
    }

    const auto& out = acts[layers];
    const double scale = 1.0 / static_cast<double>(out.size());
    double s = 0.0;
    std::vector<double> delta(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double e = out[k] - targets[k];
        s += e * e;
        delta[k] = e * scale;
    }

    std::vector<double> prev;
    for (std::size_t l = layers; l-- > 0;) {
        kernels::dense_weight_grad(acts[l], delta, batch, sizes_[l], sizes_[l + 1], grad.subspan(weight_offset(l)),
                                   grad.subspan(bias_offset(l)));
        if (l == 0) break;
        prev.assign(batch * sizes_[l], 0.0);
        kernels::dense_input_grad(delta, batch, sizes_[l + 1], std::span(params_).subspan(weight_offset(l)), sizes_[l],
                                  prev);
        // ReLU derivative, taken as 0 at the kink.
        for (std::size_t k = 0; k < prev.size(); ++k) {
            if (!(acts[l][k] > 0.0)) prev[k] = 0.0;
        }
        delta.swap(prev);
    }
    return 0.5 * s * scale;
}

Mlp mlp_train(std::span<const double> inputs, std::span<const double> targets, std::size_t rows,
              std::vector<std::size_t> layer_sizes, const MlpTrainOptions& opt, MlpTrainReport* report) {
    if (rows == 0) throw std::invalid_argument("mlp_train: empty training set");
    Mlp model = Mlp::initialized(std::move(layer_sizes), opt.seed);
    const std::size_t p = model.parameters().size();
    std::vector<double> grad(p), m1(p, 0.0), m2(p, 0.0);
    double b1t = 1.0, b2t = 1.0;
    auto params = model.parameters();

    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        const double loss = model.loss_and_gradient(inputs, targets, rows, grad);
        if (!std::isfinite(loss)) {
            throw TrainingDiverged("mlp_train: non-finite loss at epoch " + std::to_string(epoch));
        }
        if (report) report->loss_history.push_back(loss);
        b1t *= opt.beta1;
        b2t *= opt.beta2;
        const double step = opt.learning_rate * std::sqrt(1.0 - b2t) / (1.0 - b1t);
        for (std::size_t k = 0; k < p; ++k) {
            m1[k] = opt.beta1 * m1[k] + (1.0 - opt.beta1) * grad[k];
            m2[k] = opt.beta2 * m2[k] + (1.0 - opt.beta2) * grad[k] * grad[k];
            params[k] -= step * m1[k] / (std::sqrt(m2[k]) + opt.epsilon);
        }
    }
    const double final_loss = model.loss(inputs, targets, rows);
    if (!std::isfinite(final_loss)) throw TrainingDiverged("mlp_train: non-finite loss after training");
    if (report) report->loss_history.push_back(final_loss);
    return model;
}

namespace {

std::string hex(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_hex(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw std::runtime_error("model file: bad number '" + s + "'");
    return v;
}

void expect(std::istream& in, const std::string& keyword) {
    std::string word;
    if (!(in >> word) || word != keyword) {
        throw std::runtime_error("model file: expected '" + keyword + "', found '" + word + "'");
    }
}

}  // namespace

std::string format_model(const Mlp& model, const Normalizer* normalizer) {
    std::ostringstream out;
    out << "rankfolio-mlp 1\nlayers";
    for (auto s : model.layer_sizes()) out << ' ' << s;
    out << "\nseed " << model.seed() << "\nparams " << model.parameters().size() << '\n';
    for (double v : model.parameters()) out << hex(v) << '\n';
    if (normalizer) {
        out << "normalizer " << normalizer->mean.size() << '\n';
        for (std::size_t i = 0; i < normalizer->mean.size(); ++i) out << (i ? " " : "") << hex(normalizer->mean[i]);
        out << '\n';
        for (std::size_t i = 0; i < normalizer->std.size(); ++i) out << (i ? " " : "") << hex(normalizer->std[i]);
        out << '\n';
    } else {
        out << "normalizer 0\n";
    }
    return out.str();
}

void save_model(const std::filesystem::path& path, const Mlp& model, const Normalizer* normalizer) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write model file '" + path.string() + "'");
    out << format_model(model, normalizer);
}

ModelSnapshot parse_model(const std::string& text) {
    std::istringstream in(text);
    expect(in, "rankfolio-mlp");
    int version = 0;
    if (!(in >> version) || version != 1) throw std::runtime_error("model file: unsupported version");
    expect(in, "layers");
    std::string line;
    std::getline(in, line);
    std::istringstream ls(line);
    std::vector<std::size_t> sizes;
    for (std::size_t s; ls >> s;) sizes.push_back(s);
    expect(in, "seed");
    std::uint64_t seed = 0;
    in >> seed;
    expect(in, "params");
    std::size_t count = 0;
    in >> count;
    ModelSnapshot snap{Mlp(sizes, seed), std::nullopt};
    if (count != snap.model.parameters().size()) throw std::runtime_error("model file: parameter count mismatch");
    std::string word;
    for (auto& v : snap.model.parameters()) {
        in >> word;
        v = parse_hex(word);
    }
    expect(in, "normalizer");
    std::size_t dim = 0;
    in >> dim;
    if (dim > 0) {
        Normalizer nz;
        nz.mean.resize(dim);
        nz.std.resize(dim);
        for (auto& v : nz.mean) {
            in >> word;
            v = parse_hex(word);
        }
        for (auto& v : nz.std) {
            in >> word;
            v = parse_hex(word);
        }
        snap.normalizer = std::move(nz);
    }
    if (!in) throw std::runtime_error("model file: truncated");
    return snap;
}

ModelSnapshot load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

}  // namespace rankfolio
