#include "mixlab/mlp.hpp"

#include <cmath>
#include <string>

#include "mixlab/errors.hpp"

namespace mixlab {

void MlpParams::validate() const {
    if (layers.empty()) throw DimensionError("mlp has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const MlpLayer& layer = layers[i];
        if (layer.bias.size() != layer.weight.rows()) {
            throw DimensionError("mlp layer " + std::to_string(i) +
                                 ": bias/weight row mismatch");
        }
        if (i > 0 && layer.weight.cols() != layers[i - 1].weight.rows()) {
            throw DimensionError("mlp layer " + std::to_string(i) +
                                 ": input width does not chain");
        }
        if (!layer.weight.allFinite() || !layer.bias.allFinite()) {
            throw NumericalOverflow("mlp layer " + std::to_string(i) +
                                    ": non-finite parameter");
        }
    }
}

MlpParams make_mlp(int input_dim, const std::vector<int>& hidden_dims,
                   int output_dim, RandomStream& stream) {
    std::vector<int> widths;
    widths.push_back(input_dim);
    widths.insert(widths.end(), hidden_dims.begin(), hidden_dims.end());
    widths.push_back(output_dim);

    MlpParams params;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        const int fan_in = widths[i];
        const int fan_out = widths[i + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        MlpLayer layer;
        layer.weight.resize(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r) {
            for (int c = 0; c < fan_in; ++c) {
                layer.weight(r, c) = bound * (2.0 * stream.next_double() - 1.0);
            }
        }
        layer.bias.resize(fan_out);
        for (int r = 0; r < fan_out; ++r) {
            layer.bias(r) = bound * (2.0 * stream.next_double() - 1.0);
        }
        params.layers.push_back(std::move(layer));
    }
    return params;
}

MlpParams zeros_like(const MlpParams& shape) {
    MlpParams out;
    out.layers.reserve(shape.layers.size());
    for (const auto& layer : shape.layers) {
        out.layers.push_back(
            MlpLayer{Eigen::MatrixXd::Zero(layer.weight.rows(),
                                           layer.weight.cols()),
                     Eigen::VectorXd::Zero(layer.bias.size())});
    }
    return out;
}

void add_scaled(MlpParams& target, const MlpParams& delta, double scale) {
    if (target.layers.size() != delta.layers.size()) {
        throw DimensionError("add_scaled: layer count mismatch");
    }
    for (std::size_t i = 0; i < target.layers.size(); ++i) {
        target.layers[i].weight += scale * delta.layers[i].weight;
        target.layers[i].bias += scale * delta.layers[i].bias;
    }
}

Eigen::VectorXd mlp_forward(const MlpParams& params, const Eigen::VectorXd& x,
                            MlpForwardCache* cache) {
    if (x.size() != params.input_dim()) {
        throw DimensionError("mlp_forward: input dimension mismatch");
    }
    if (cache) {
        cache->activations.clear();
        cache->activations.push_back(x);
    }
    Eigen::VectorXd activation = x;
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        Eigen::VectorXd pre =
            params.layers[i].weight * activation + params.layers[i].bias;
        const bool is_output = (i + 1 == params.layers.size());
        activation = is_output ? pre : pre.array().tanh().matrix();
        if (!activation.allFinite()) {
            throw NumericalOverflow("mlp_forward: non-finite activation at layer " +
                                    std::to_string(i));
        }
        if (cache) cache->activations.push_back(activation);
    }
    return activation;
}

Eigen::VectorXd mlp_backward(const MlpParams& params,
                             const MlpForwardCache& cache,
                             const Eigen::VectorXd& grad_output,
                             MlpParams& grads) {
    if (cache.activations.size() != params.layers.size() + 1) {
        throw DimensionError("mlp_backward: cache does not match network");
    }
    Eigen::VectorXd grad = grad_output;
    for (std::size_t i = params.layers.size(); i-- > 0;) {
        const Eigen::VectorXd& input = cache.activations[i];
        const Eigen::VectorXd& output = cache.activations[i + 1];
        // identity output layer; tanh elsewhere: d tanh(u) = 1 - tanh(u)^2
        Eigen::VectorXd grad_pre =
            (i + 1 == params.layers.size())
                ? grad
                : (grad.array() * (1.0 - output.array().square())).matrix();
        grads.layers[i].weight.noalias() += grad_pre * input.transpose();
        grads.layers[i].bias += grad_pre;
        grad = params.layers[i].weight.transpose() * grad_pre;
    }
    return grad;
}

} // namespace mixlab
