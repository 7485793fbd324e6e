#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mixlab/gaussian.hpp"
#include "mixlab/rng.hpp"

namespace mixlab {

/// K-component Gaussian mixture: weights plus one GaussianParams per
/// component. Weights are non-negative and sum to 1 within 1e-12; all
/// components share one dimension.
struct MixtureParams {
    Eigen::VectorXd weights;
    std::vector<GaussianParams> components;

    int k() const { return static_cast<int>(components.size()); }
    int dim() const { return components.empty() ? 0 : components.front().dim(); }
    void validate() const;
};

/// N x K matrix of posterior component probabilities; rows sum to 1.
struct Responsibilities {
    Eigen::MatrixXd w;
};

enum class StopReason { Converged, MaxPasses };

struct StoppingRule {
    int max_passes = 50;
    double loglik_tol = 1e-3;
};

struct EmPass {
    int pass = 0; // 0 is the initial parameter set
    MixtureParams theta;
    double loglik = 0.0;
};

/// Per-pass record of an EM run. The log-likelihood entries are
/// non-decreasing within 1e-9 absolute slack.
struct EmTrace {
    std::vector<EmPass> passes;
    StopReason stop_reason = StopReason::MaxPasses;

    const MixtureParams& final_params() const { return passes.back().theta; }
    double final_loglik() const { return passes.back().loglik; }
    /// Number of E+M passes executed (excludes the initial entry).
    int passes_run() const { return static_cast<int>(passes.size()) - 1; }
};

/// Incomplete-data log-likelihood sum_n log sum_k pi_k N(x_n; mu_k, P_k),
/// evaluated with log-sum-exp over k.
double mixture_log_likelihood(const std::vector<Eigen::VectorXd>& data,
                              const MixtureParams& theta);

/// Posterior component weights w_nk, computed in log space then normalized.
Responsibilities responsibilities(const std::vector<Eigen::VectorXd>& data,
                                  const MixtureParams& theta);

/// Hard assignment per row: argmax component, ties toward the lowest index.
std::vector<int> map_labels(const Responsibilities& resp);

/// Baum's auxiliary function sum_n sum_k w_nk (log pi_k + log N(x_n)).
/// Entries with w_nk == 0 contribute zero even when the log term is -inf.
double baum_q(const std::vector<Eigen::VectorXd>& data,
              const MixtureParams& theta, const Responsibilities& resp);

/// Weighted-statistics M-step. Covariances get lambda_reg * I added, with
/// lambda_reg = 1e-6 * trace(global sample covariance) / dim.
MixtureParams m_step(const std::vector<Eigen::VectorXd>& data,
                     const Responsibilities& resp);

/// Grid initialization for 2-D data: ceil(sqrt(K))^2 equal cells over the
/// data bounding box, K distinct cells chosen without replacement, means at
/// cell centres, shared diagonal covariance from the box extents / 6.
MixtureParams init_grid(const std::vector<Eigen::VectorXd>& data, int k_hat,
                        Seed seed);

/// Alternates responsibilities / m_step until |delta loglik| < tol or
/// max_passes. The returned trace starts with the initial parameters.
EmTrace fit_em(const std::vector<Eigen::VectorXd>& data,
               const StoppingRule& stop, const MixtureParams& init);

/// Draws n labelled samples: z_i categorical on weights, x_i from component
/// z_i. Labels are 0-based component indices.
struct GmmSample {
    std::vector<Eigen::VectorXd> points;
    std::vector<int> labels;
};
GmmSample generate_gmm_data(const MixtureParams& theta_true, int n, Seed seed);

} // namespace mixlab
