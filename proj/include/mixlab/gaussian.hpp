#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mixlab/rng.hpp"

namespace mixlab {

/// Mean/covariance parameter pair of a multivariate Gaussian.
/// The covariance must be symmetric (1e-12 absolute) and positive definite.
struct GaussianParams {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    int dim() const { return static_cast<int>(mean.size()); }

    /// Throws DimensionError / NotPositiveDefinite if the invariants fail.
    void validate() const;
};

/// Lower-triangular symmetric factorization P = L*L^T. The single canonical
/// decomposition for densities, sampling and KL terms; log det comes from
/// the factor diagonal, never from a determinant expansion.
class CholeskyFactor {
public:
    /// Factorizes; a pivot at or below 1e-12 * max diagonal entry of the
    /// input throws NotPositiveDefinite.
    explicit CholeskyFactor(const Eigen::MatrixXd& matrix);

    const Eigen::MatrixXd& matrix_l() const { return lower_; }
    int dim() const { return static_cast<int>(lower_.rows()); }

    /// log det P = 2 * sum(log diag(L)).
    double log_det() const;

    /// Solves L y = rhs (forward substitution). ||y||^2 is then the
    /// Mahalanobis form rhs^T P^-1 rhs.
    Eigen::VectorXd solve_lower(const Eigen::VectorXd& rhs) const;

    /// Solves P x = rhs.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

    /// P^-1, symmetrized against rounding drift.
    Eigen::MatrixXd inverse() const;

private:
    Eigen::MatrixXd lower_;
};

/// log N(x; mean, cov) via the symmetric factorization.
double log_density(const Eigen::VectorXd& x, const GaussianParams& g);

/// As above with a prebuilt factor of g.cov (hot loops).
double log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                   const CholeskyFactor& factor);

/// `count` draws of mean + L*eps, eps standard normal; deterministic per seed.
std::vector<Eigen::VectorXd> sample_gaussian(const GaussianParams& g,
                                             int count, Seed seed);

/// As above drawing from a caller-owned stream (interleaved sampling).
Eigen::VectorXd sample_gaussian_one(const Eigen::VectorXd& mean,
                                    const CholeskyFactor& factor,
                                    RandomStream& stream);

/// n_points on the 1-sigma ellipse { mean + L*[cos t, sin t] } of a
/// 2-D Gaussian, t uniform on [0, 2*pi).
std::vector<Eigen::Vector2d> sigma_ellipse(const GaussianParams& g,
                                           int n_points);

} // namespace mixlab
