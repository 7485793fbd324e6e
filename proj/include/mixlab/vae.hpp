#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "mixlab/gaussian.hpp"
#include "mixlab/mlp.hpp"
#include "mixlab/rng.hpp"

namespace mixlab {

/// Variational posterior heads for one datapoint; the induced covariance is
/// diag(sigma_z * sigma_z) with sigma_z = exp(log_var_z / 2).
struct EncoderOutput {
    Eigen::VectorXd mu_z;
    Eigen::VectorXd log_var_z;

    int n_z() const { return static_cast<int>(mu_z.size()); }
};

/// Diagonal-Gaussian likelihood heads over x-space.
struct DecoderOutput {
    Eigen::VectorXd mu_x;
    Eigen::VectorXd log_var_x;
};

enum class EstimatorKind { A, B };

struct ElboEstimate {
    double value = 0.0;
    double reconstruction = 0.0;
    /// Kind A: mean of log p(z) - log q(z|x) over the draws.
    /// Kind B: the closed-form KL(q || prior); value = reconstruction - kl.
    double kl_or_entropy = 0.0;
    EstimatorKind kind = EstimatorKind::A;
};

struct VaeConfig {
    int n_x = 2;
    int n_z = 2;
    std::vector<int> encoder_hidden{8};
    std::vector<int> decoder_hidden{8};
    int mc_samples = 1;      // L, per-datapoint draws during training
    int batch_size = 100;    // M
    double learning_rate = 1e-3;
    int epochs = 1;
    Seed seed;

    void validate(int dataset_size) const;
};

/// N(0, I) over the latent space, the default prior.
GaussianParams standard_normal_prior(int dim);

EncoderOutput encode(const Eigen::VectorXd& x, const MlpParams& phi);

/// mu_z + exp(log_var_z / 2) . eps
Eigen::VectorXd reparam_sample(const EncoderOutput& enc,
                               const Eigen::VectorXd& eps);

/// Diagonal Gaussian over x-space from the decoder heads.
GaussianParams decode(const Eigen::VectorXd& z, const MlpParams& theta);

/// (1/L) sum_l [log p(x, z_l) - log q(z_l | x)], z_l reparametrised.
ElboEstimate elbo_a(const Eigen::VectorXd& x, const MlpParams& phi,
                    const MlpParams& theta, const GaussianParams& prior,
                    int n_draws, Seed seed);

/// (1/L) sum_l log p(x | z_l) - KL(q(z|x) || prior), KL in closed form.
ElboEstimate elbo_b(const Eigen::VectorXd& x, const MlpParams& phi,
                    const MlpParams& theta, const GaussianParams& prior,
                    int n_draws, Seed seed);

/// Deterministic cores taking explicit noise, one vector per draw.
ElboEstimate elbo_a_with_noise(const Eigen::VectorXd& x, const MlpParams& phi,
                               const MlpParams& theta,
                               const GaussianParams& prior,
                               std::span<const Eigen::VectorXd> eps);
ElboEstimate elbo_b_with_noise(const Eigen::VectorXd& x, const MlpParams& phi,
                               const MlpParams& theta,
                               const GaussianParams& prior,
                               std::span<const Eigen::VectorXd> eps);

struct VaeGradients {
    MlpParams phi;
    MlpParams theta;
    ElboEstimate estimate;
};

/// Exact reverse-mode gradient of the chosen estimator with respect to every
/// encoder and decoder parameter, holding the noise draws fixed.
VaeGradients grad_elbo(const Eigen::VectorXd& x, const MlpParams& phi,
                       const MlpParams& theta, const GaussianParams& prior,
                       int n_draws, Seed seed, EstimatorKind kind);
VaeGradients grad_elbo_with_noise(const Eigen::VectorXd& x,
                                  const MlpParams& phi, const MlpParams& theta,
                                  const GaussianParams& prior,
                                  std::span<const Eigen::VectorXd> eps,
                                  EstimatorKind kind);

/// Fresh encoder/decoder pair for a config; encoder first, then decoder,
/// from one stream seeded by config.seed.
std::pair<MlpParams, MlpParams> make_vae_params(const VaeConfig& config);

struct VaeTrainResult {
    MlpParams phi;
    MlpParams theta;
    std::vector<double> epoch_bound; // mean minibatch bound per epoch
};

/// Minibatch SGD ascent on the chosen estimator against the N(0,I) prior.
/// Shuffling is per-epoch seeded; the noise stream for a datapoint is keyed
/// by (seed, epoch, batch, index).
VaeTrainResult train_vae(const std::vector<Eigen::VectorXd>& dataset,
                         const VaeConfig& config, EstimatorKind kind);

} // namespace mixlab
