#include "mixlab/reparam.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mixlab/errors.hpp"

namespace mixlab {

InvertibleMap InvertibleMap::affine(Eigen::MatrixXd a, Eigen::VectorXd offset) {
    if (a.rows() != a.cols() || a.rows() != offset.size()) {
        throw DimensionError("affine map needs a square matrix matching offset");
    }
    const double log_abs_det = std::log(std::abs(a.determinant()));
    InvertibleMap map;
    map.dim = static_cast<int>(a.rows());
    map.forward = [a, offset](const Eigen::VectorXd& y) {
        return (a * y + offset).eval();
    };
    map.jacobian_log_abs_det = [log_abs_det](const Eigen::VectorXd&) {
        return log_abs_det;
    };
    return map;
}

InvertibleMap InvertibleMap::identity(int dim) {
    InvertibleMap map;
    map.dim = dim;
    map.forward = [](const Eigen::VectorXd& y) { return y; };
    map.jacobian_log_abs_det = [](const Eigen::VectorXd&) { return 0.0; };
    return map;
}

double pushforward_log_density(const GaussianParams& base,
                               const InvertibleMap& map,
                               const Eigen::VectorXd& y) {
    if (y.size() != base.dim() || map.dim != base.dim()) {
        throw DimensionError("pushforward_log_density: dimension mismatch");
    }
    const double jacobian = map.jacobian_log_abs_det(y);
    if (!std::isfinite(jacobian)) {
        throw SingularMap("Jacobian log|det| is not finite at the query point");
    }
    return log_density(y, base) - jacobian;
}

McEstimate mc_expectation(const std::function<double(const Eigen::VectorXd&)>& f,
                          const GaussianParams& base, const InvertibleMap& map,
                          int n_samples, Seed seed) {
    if (n_samples < 1) {
        throw InvalidArgument("mc_expectation: n_samples must be >= 1");
    }
    if (map.dim != base.dim()) {
        throw DimensionError("mc_expectation: map/base dimension mismatch");
    }
    CholeskyFactor factor(base.cov);
    RandomStream stream(seed);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const Eigen::VectorXd y = sample_gaussian_one(base.mean, factor, stream);
        const double value = f(map.forward(y));
        if (!std::isfinite(value)) {
            throw NonFiniteIntegrand("integrand not finite at sample " +
                                     std::to_string(i));
        }
        sum += value;
        sum_sq += value * value;
    }
    McEstimate estimate;
    estimate.n_samples = n_samples;
    estimate.value = sum / n_samples;
    if (n_samples == 1) {
        estimate.std_error = std::numeric_limits<double>::infinity();
    } else {
        const double variance =
            std::max(0.0, (sum_sq - sum * sum / n_samples) / (n_samples - 1));
        estimate.std_error = std::sqrt(variance / n_samples);
    }
    return estimate;
}

} // namespace mixlab
