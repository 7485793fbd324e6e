#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "mixlab/gaussian.hpp"
#include "mixlab/rng.hpp"

namespace mixlab {

/// One factor q_i(Z_i) of a product-form variational density.
struct GaussianFactor {
    GaussianParams params;
};

/// log p(X,z) = constant + linear . z - 0.5 * z^T precision z, the family
/// for which every closed-form path (posterior, evidence, mean-field
/// moments, analytic bound) is available.
struct QuadraticForm {
    double constant = 0.0;
    Eigen::VectorXd linear;
    Eigen::MatrixXd precision;

    int dim() const { return static_cast<int>(linear.size()); }
    double evaluate(const Eigen::VectorXd& z) const;
};

/// Latent-variable model with the data X baked into the joint density.
/// Tractable (quadratic) models carry their exact evidence and posterior.
struct LatentModel {
    std::function<double(const Eigen::VectorXd&)> joint_log_density;
    int latent_dim = 0;
    std::optional<double> exact_log_evidence;
    std::optional<GaussianParams> exact_posterior;
    std::optional<QuadraticForm> quadratic;

    static LatentModel from_quadratic(QuadraticForm form);
};

/// Contiguous block of latent coordinates.
struct Block {
    int start = 0;
    int size = 0;
};

/// Factorized variational state over a disjoint partition of 0..latent_dim.
struct MeanFieldState {
    std::vector<GaussianFactor> factors;
    std::vector<Block> partition;
    std::vector<double> vlb_trace;

    /// Singleton-coordinate partition with unit-variance zero-mean factors.
    static MeanFieldState fully_factorized(int latent_dim);

    Eigen::VectorXd stacked_mean() const;
};

/// KL(q || p) for Gaussians, 0.5 * [tr(Pp^-1 Pq) + dm^T Pp^-1 dm - n
/// + log det Pp - log det Pq].
double kl_gaussian(const GaussianParams& q, const GaussianParams& p);

/// Monte Carlo estimate of E_q[log p(X,Z) - log q(Z)] with n_mc draws.
double vlb_gaussian_q(const LatentModel& model, const GaussianParams& q,
                      int n_mc, Seed seed);

/// Closed-form L[q] for a Gaussian q on a quadratic model:
/// E_q[log p] + entropy(q).
double analytic_vlb(const QuadraticForm& form, const GaussianParams& q);
double analytic_vlb(const QuadraticForm& form, const MeanFieldState& state);

/// exact_log_evidence - (analytic L[q] + KL(q || exact posterior)); zero
/// within rounding for every valid q.
double evidence_gap(const LatentModel& model, const GaussianParams& q);

/// Coordinate update q_j* with moments from the current other-block means.
GaussianFactor mean_field_update(const LatentModel& model,
                                 const MeanFieldState& state, int block_index);

/// Gauss-Seidel sweeps of mean_field_update until the largest factor
/// mean/covariance change is below tol or max_sweeps is hit. Appends an
/// analytic VLB value per sweep.
MeanFieldState mean_field_fit(const LatentModel& model, MeanFieldState init,
                              int max_sweeps, double tol);

/// Parameterized model family with quadratic-in-Z joints and a closed-form
/// M-step (argmax_theta of E_q[log p(X,Z|theta)] for Gaussian q).
struct QuadraticFamily {
    int latent_dim = 0;
    std::function<QuadraticForm(const Eigen::VectorXd& theta)> joint_for;
    std::function<Eigen::VectorXd(const GaussianParams& q)> m_step;
};

/// One generalized EM pass: q' = exact posterior at theta (the KL-zero
/// maximizer of L over q), theta' = family M-step at q'.
std::pair<GaussianParams, Eigen::VectorXd> generalized_em_step(
    const QuadraticFamily& family, const GaussianParams& q,
    const Eigen::VectorXd& theta);

/// Built-in linear-Gaussian demo family: x_i = z + theta + noise,
/// noise ~ N(0, R), z ~ N(0, P0), theta the observation offset.
QuadraticFamily mean_offset_family(std::vector<Eigen::VectorXd> data,
                                   Eigen::MatrixXd noise_cov,
                                   Eigen::MatrixXd prior_cov);

} // namespace mixlab
