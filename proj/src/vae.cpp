#include "mixlab/vae.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mixlab/errors.hpp"
#include "mixlab/variational.hpp"

namespace mixlab {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

/// Split a head vector [mu; log_var] of even length.
void split_heads(const Eigen::VectorXd& out, Eigen::VectorXd& mu,
                 Eigen::VectorXd& log_var) {
    if (out.size() % 2 != 0) {
        throw DimensionError("head layer width must be even (mu and log-var)");
    }
    const Eigen::Index half = out.size() / 2;
    mu = out.head(half);
    log_var = out.tail(half);
}

/// sum_j log N(v_j; mu_j, exp(log_var_j))
double diag_log_density(const Eigen::VectorXd& v, const Eigen::VectorXd& mu,
                        const Eigen::VectorXd& log_var) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        const double centered = v(j) - mu(j);
        acc += -0.5 * (kLog2Pi + log_var(j) +
                       centered * centered * std::exp(-log_var(j)));
    }
    return acc;
}

struct PriorInfo {
    const GaussianParams* params;
    CholeskyFactor factor;
    Eigen::MatrixXd inverse;
    double log_det;

    explicit PriorInfo(const GaussianParams& prior)
        : params(&prior),
          factor(prior.cov),
          inverse(factor.inverse()),
          log_det(factor.log_det()) {}

    double log_density(const Eigen::VectorXd& z) const {
        const Eigen::VectorXd centered = z - params->mean;
        return -0.5 * (params->dim() * kLog2Pi + log_det +
                       centered.dot(inverse * centered));
    }
};

/// Single core for both estimators: computes the estimate and, when `grads`
/// is non-null, accumulates the exact reverse-mode gradient (noise fixed).
ElboEstimate evaluate_elbo(const Eigen::VectorXd& x, const MlpParams& phi,
                           const MlpParams& theta, const GaussianParams& prior,
                           std::span<const Eigen::VectorXd> eps,
                           EstimatorKind kind, VaeGradients* grads) {
    if (eps.empty()) throw InvalidArgument("elbo needs at least one draw");
    if (x.size() != phi.input_dim()) {
        throw DimensionError("elbo: x does not match encoder input width");
    }

    MlpForwardCache enc_cache;
    const Eigen::VectorXd enc_out = mlp_forward(phi, x, &enc_cache);
    EncoderOutput enc;
    split_heads(enc_out, enc.mu_z, enc.log_var_z);
    const int n_z = enc.n_z();
    if (prior.dim() != n_z) {
        throw DimensionError("elbo: prior dimension does not match n_z");
    }
    const PriorInfo prior_info(prior);
    const Eigen::VectorXd sigma_z = (0.5 * enc.log_var_z).array().exp();
    const double inv_l = 1.0 / static_cast<double>(eps.size());

    double recon_mean = 0.0;
    double prior_minus_q_mean = 0.0;
    Eigen::VectorXd grad_mu_z = Eigen::VectorXd::Zero(n_z);
    Eigen::VectorXd grad_lv_z = Eigen::VectorXd::Zero(n_z);

    for (std::size_t l = 0; l < eps.size(); ++l) {
        if (eps[l].size() != n_z) {
            throw DimensionError("elbo: noise draw " + std::to_string(l) +
                                 " has wrong dimension");
        }
        try {
            const Eigen::VectorXd z = enc.mu_z + sigma_z.cwiseProduct(eps[l]);
            MlpForwardCache dec_cache;
            const Eigen::VectorXd dec_out =
                mlp_forward(theta, z, grads ? &dec_cache : nullptr);
            DecoderOutput dec;
            split_heads(dec_out, dec.mu_x, dec.log_var_x);
            if (dec.mu_x.size() != x.size()) {
                throw DimensionError("elbo: decoder output does not match x");
            }

            const double draw_recon =
                diag_log_density(x, dec.mu_x, dec.log_var_x);
            if (!std::isfinite(draw_recon)) {
                throw NumericalOverflow("non-finite reconstruction term");
            }
            recon_mean += inv_l * draw_recon;
            if (kind == EstimatorKind::A) {
                // log q(z_l|x) with z_l - mu substituted by sigma*eps
                double log_q = 0.0;
                for (int j = 0; j < n_z; ++j) {
                    log_q += -0.5 * (kLog2Pi + enc.log_var_z(j) +
                                     eps[l](j) * eps[l](j));
                }
                prior_minus_q_mean +=
                    inv_l * (prior_info.log_density(z) - log_q);
            }

            if (grads) {
                const Eigen::VectorXd inv_var_x =
                    (-dec.log_var_x).array().exp();
                const Eigen::VectorXd residual = x - dec.mu_x;
                Eigen::VectorXd head_grad(dec_out.size());
                head_grad.head(residual.size()) =
                    inv_l * residual.cwiseProduct(inv_var_x);
                head_grad.tail(residual.size()) =
                    inv_l *
                    (0.5 * residual.cwiseAbs2().cwiseProduct(inv_var_x) -
                     Eigen::VectorXd::Constant(residual.size(), 0.5));
                Eigen::VectorXd grad_z =
                    mlp_backward(theta, dec_cache, head_grad, grads->theta);
                if (kind == EstimatorKind::A) {
                    // d log p(z) / dz
                    grad_z += inv_l * (-prior_info.inverse * (z - prior.mean));
                }
                grad_mu_z += grad_z;
                grad_lv_z +=
                    0.5 * grad_z.cwiseProduct(sigma_z).cwiseProduct(eps[l]);
                if (kind == EstimatorKind::A) {
                    // d(-log q)/d log_var_z = +1/2 per coordinate
                    grad_lv_z.array() += inv_l * 0.5;
                }
            }
        } catch (const NumericalOverflow& e) {
            throw NumericalOverflow(std::string(e.what()) + " (draw " +
                                    std::to_string(l) + ")");
        }
    }

    ElboEstimate estimate;
    estimate.kind = kind;
    estimate.reconstruction = recon_mean;
    if (kind == EstimatorKind::A) {
        estimate.kl_or_entropy = prior_minus_q_mean;
        estimate.value = recon_mean + prior_minus_q_mean;
    } else {
        GaussianParams q;
        q.mean = enc.mu_z;
        q.cov = sigma_z.cwiseAbs2().asDiagonal();
        const double kl = kl_gaussian(q, prior);
        estimate.kl_or_entropy = kl;
        estimate.value = recon_mean - kl;
        if (grads) {
            grad_mu_z -= prior_info.inverse * (enc.mu_z - prior.mean);
            for (int j = 0; j < n_z; ++j) {
                grad_lv_z(j) -= 0.5 * (prior_info.inverse(j, j) *
                                           sigma_z(j) * sigma_z(j) -
                                       1.0);
            }
        }
    }

    if (grads) {
        Eigen::VectorXd enc_head_grad(enc_out.size());
        enc_head_grad.head(n_z) = grad_mu_z;
        enc_head_grad.tail(n_z) = grad_lv_z;
        mlp_backward(phi, enc_cache, enc_head_grad, grads->phi);
        grads->estimate = estimate;
    }
    return estimate;
}

std::vector<Eigen::VectorXd> draw_noise(int n_draws, int n_z, Seed seed) {
    RandomStream stream(seed);
    std::vector<Eigen::VectorXd> eps;
    eps.reserve(static_cast<std::size_t>(n_draws));
    for (int l = 0; l < n_draws; ++l) {
        Eigen::VectorXd e(n_z);
        for (int j = 0; j < n_z; ++j) e(j) = stream.next_normal();
        eps.push_back(std::move(e));
    }
    return eps;
}

int encoder_n_z(const MlpParams& phi) {
    const int out = phi.output_dim();
    if (out % 2 != 0) {
        throw DimensionError("encoder output width must be even");
    }
    return out / 2;
}

} // namespace

void VaeConfig::validate(int dataset_size) const {
    if (n_x < 1 || n_z < 1) throw InvalidArgument("n_x and n_z must be >= 1");
    if (mc_samples < 1) throw InvalidArgument("mc_samples must be >= 1");
    if (batch_size < 1 || batch_size > dataset_size) {
        throw InvalidArgument("batch size must satisfy 1 <= M <= N");
    }
    if (learning_rate < 0.0) {
        throw InvalidArgument("learning rate must be non-negative");
    }
    if (epochs < 0) throw InvalidArgument("epochs must be >= 0");
}

GaussianParams standard_normal_prior(int dim) {
    return GaussianParams{Eigen::VectorXd::Zero(dim),
                          Eigen::MatrixXd::Identity(dim, dim)};
}

EncoderOutput encode(const Eigen::VectorXd& x, const MlpParams& phi) {
    if (x.size() != phi.input_dim()) {
        throw DimensionError("encode: input dimension mismatch");
    }
    const Eigen::VectorXd out = mlp_forward(phi, x);
    EncoderOutput enc;
    split_heads(out, enc.mu_z, enc.log_var_z);
    return enc;
}

Eigen::VectorXd reparam_sample(const EncoderOutput& enc,
                               const Eigen::VectorXd& eps) {
    if (eps.size() != enc.mu_z.size()) {
        throw DimensionError("reparam_sample: eps dimension mismatch");
    }
    const Eigen::VectorXd sigma = (0.5 * enc.log_var_z).array().exp();
    return enc.mu_z + sigma.cwiseProduct(eps);
}

GaussianParams decode(const Eigen::VectorXd& z, const MlpParams& theta) {
    if (z.size() != theta.input_dim()) {
        throw DimensionError("decode: latent dimension mismatch");
    }
    const Eigen::VectorXd out = mlp_forward(theta, z);
    Eigen::VectorXd mu_x;
    Eigen::VectorXd log_var_x;
    split_heads(out, mu_x, log_var_x);
    GaussianParams g;
    g.cov = log_var_x.array().exp().matrix().asDiagonal();
    g.mean = std::move(mu_x);
    return g;
}

ElboEstimate elbo_a_with_noise(const Eigen::VectorXd& x, const MlpParams& phi,
                               const MlpParams& theta,
                               const GaussianParams& prior,
                               std::span<const Eigen::VectorXd> eps) {
    return evaluate_elbo(x, phi, theta, prior, eps, EstimatorKind::A, nullptr);
}

ElboEstimate elbo_b_with_noise(const Eigen::VectorXd& x, const MlpParams& phi,
                               const MlpParams& theta,
                               const GaussianParams& prior,
                               std::span<const Eigen::VectorXd> eps) {
    return evaluate_elbo(x, phi, theta, prior, eps, EstimatorKind::B, nullptr);
}

ElboEstimate elbo_a(const Eigen::VectorXd& x, const MlpParams& phi,
                    const MlpParams& theta, const GaussianParams& prior,
                    int n_draws, Seed seed) {
    const auto eps = draw_noise(n_draws, encoder_n_z(phi), seed);
    return elbo_a_with_noise(x, phi, theta, prior, eps);
}

ElboEstimate elbo_b(const Eigen::VectorXd& x, const MlpParams& phi,
                    const MlpParams& theta, const GaussianParams& prior,
                    int n_draws, Seed seed) {
    const auto eps = draw_noise(n_draws, encoder_n_z(phi), seed);
    return elbo_b_with_noise(x, phi, theta, prior, eps);
}

VaeGradients grad_elbo_with_noise(const Eigen::VectorXd& x,
                                  const MlpParams& phi, const MlpParams& theta,
                                  const GaussianParams& prior,
                                  std::span<const Eigen::VectorXd> eps,
                                  EstimatorKind kind) {
    VaeGradients grads;
    grads.phi = zeros_like(phi);
    grads.theta = zeros_like(theta);
    evaluate_elbo(x, phi, theta, prior, eps, kind, &grads);
    return grads;
}

VaeGradients grad_elbo(const Eigen::VectorXd& x, const MlpParams& phi,
                       const MlpParams& theta, const GaussianParams& prior,
                       int n_draws, Seed seed, EstimatorKind kind) {
    const auto eps = draw_noise(n_draws, encoder_n_z(phi), seed);
    return grad_elbo_with_noise(x, phi, theta, prior, eps, kind);
}

std::pair<MlpParams, MlpParams> make_vae_params(const VaeConfig& config) {
    RandomStream stream(derive_seed(config.seed, 0));
    MlpParams phi =
        make_mlp(config.n_x, config.encoder_hidden, 2 * config.n_z, stream);
    MlpParams theta =
        make_mlp(config.n_z, config.decoder_hidden, 2 * config.n_x, stream);
    return {std::move(phi), std::move(theta)};
}

VaeTrainResult train_vae(const std::vector<Eigen::VectorXd>& dataset,
                         const VaeConfig& config, EstimatorKind kind) {
    config.validate(static_cast<int>(dataset.size()));
    for (const auto& x : dataset) {
        if (x.size() != config.n_x) {
            throw DimensionError("train_vae: datapoint dimension mismatch");
        }
    }
    auto [phi, theta] = make_vae_params(config);
    const GaussianParams prior = standard_normal_prior(config.n_z);
    const int n = static_cast<int>(dataset.size());

    VaeTrainResult result;
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        RandomStream shuffle_stream(derive_seed(config.seed, 1, epoch));
        for (int i = n - 1; i > 0; --i) {
            const auto j = static_cast<int>(shuffle_stream.next_below(
                static_cast<std::uint64_t>(i) + 1));
            std::swap(order[static_cast<std::size_t>(i)],
                      order[static_cast<std::size_t>(j)]);
        }

        double epoch_bound_sum = 0.0;
        int batch_count = 0;
        for (int begin = 0; begin < n; begin += config.batch_size) {
            const int end = std::min(begin + config.batch_size, n);
            const int batch = begin / config.batch_size;
            MlpParams grad_phi = zeros_like(phi);
            MlpParams grad_theta = zeros_like(theta);
            double batch_bound = 0.0;
            for (int pos = begin; pos < end; ++pos) {
                const auto eps = draw_noise(
                    config.mc_samples, config.n_z,
                    derive_seed(config.seed, 2, epoch, batch, pos - begin));
                VaeGradients grads;
                try {
                    grads = grad_elbo_with_noise(
                        dataset[static_cast<std::size_t>(
                            order[static_cast<std::size_t>(pos)])],
                        phi, theta, prior, eps, kind);
                } catch (const NumericalOverflow& e) {
                    throw NumericalOverflow(
                        std::string(e.what()) + " (epoch " +
                        std::to_string(epoch) + ", batch " +
                        std::to_string(batch) + ")");
                }
                add_scaled(grad_phi, grads.phi, 1.0);
                add_scaled(grad_theta, grads.theta, 1.0);
                batch_bound += grads.estimate.value;
            }
            const double inv_batch = 1.0 / static_cast<double>(end - begin);
            add_scaled(phi, grad_phi, config.learning_rate * inv_batch);
            add_scaled(theta, grad_theta, config.learning_rate * inv_batch);
            epoch_bound_sum += batch_bound * inv_batch;
            ++batch_count;
        }
        result.epoch_bound.push_back(epoch_bound_sum / batch_count);
    }

    result.phi = std::move(phi);
    result.theta = std::move(theta);
    return result;
}

} // namespace mixlab
