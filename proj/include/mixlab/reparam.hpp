#pragma once

#include <Eigen/Dense>
#include <functional>

#include "mixlab/gaussian.hpp"
#include "mixlab/rng.hpp"

namespace mixlab {

/// Injective change of variables z = forward(y) with the log |det Jacobian|
/// of forward supplied at the base-space point y.
struct InvertibleMap {
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> forward;
    std::function<double(const Eigen::VectorXd&)> jacobian_log_abs_det;
    int dim = 0;

    /// Affine map z = A y + offset.
    static InvertibleMap affine(Eigen::MatrixXd a, Eigen::VectorXd offset);
    static InvertibleMap identity(int dim);
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    int n_samples = 0;
};

/// Log-density of Z = forward(Y), Y ~ base, evaluated at the image of the
/// supplied base-space point: log p_base(y) - log |det d forward / dy|.
double pushforward_log_density(const GaussianParams& base,
                               const InvertibleMap& map,
                               const Eigen::VectorXd& y);

/// (1/L) sum f(forward(Y_i)) with Y_i ~ base, plus the sample standard
/// error of the mean (infinite sentinel for a single sample).
McEstimate mc_expectation(const std::function<double(const Eigen::VectorXd&)>& f,
                          const GaussianParams& base, const InvertibleMap& map,
                          int n_samples, Seed seed);

} // namespace mixlab
