#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mixlab/rng.hpp"

namespace mixlab {

struct MlpLayer {
    Eigen::MatrixXd weight; // rows = outputs, cols = inputs
    Eigen::VectorXd bias;
};

/// Layered perceptron parameters: tanh on every hidden layer, identity at
/// the output layer.
struct MlpParams {
    std::vector<MlpLayer> layers;

    int input_dim() const {
        return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols());
    }
    int output_dim() const {
        return layers.empty() ? 0 : static_cast<int>(layers.back().weight.rows());
    }
    void validate() const; // dimension chaining + finiteness
};

/// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)]; per layer the weight
/// entries are drawn row-major, then the bias entries.
MlpParams make_mlp(int input_dim, const std::vector<int>& hidden_dims,
                   int output_dim, RandomStream& stream);

MlpParams zeros_like(const MlpParams& shape);

/// target += scale * delta (shapes must match).
void add_scaled(MlpParams& target, const MlpParams& delta, double scale);

/// Post-activation values per layer; activations[0] is the input.
struct MlpForwardCache {
    std::vector<Eigen::VectorXd> activations;
};

/// Forward pass. Throws NumericalOverflow (with the layer index) if any
/// activation goes non-finite.
Eigen::VectorXd mlp_forward(const MlpParams& params, const Eigen::VectorXd& x,
                            MlpForwardCache* cache = nullptr);

/// Reverse pass: accumulates parameter gradients into `grads` (shaped like
/// `params`) and returns the gradient with respect to the input.
Eigen::VectorXd mlp_backward(const MlpParams& params,
                             const MlpForwardCache& cache,
                             const Eigen::VectorXd& grad_output,
                             MlpParams& grads);

} // namespace mixlab
