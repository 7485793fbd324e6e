#include "mixlab/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mixlab/errors.hpp"

namespace mixlab {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kSymmetryTol = 1e-12;
constexpr double kPivotRelTol = 1e-12;
} // namespace

double RandomStream::next_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double u1 = next_double_open();
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

void GaussianParams::validate() const {
    if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
        throw DimensionError("covariance shape does not match mean length");
    }
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < cov.cols(); ++j) {
            if (std::abs(cov(i, j) - cov(j, i)) > kSymmetryTol) {
                throw NotPositiveDefinite("covariance is not symmetric");
            }
        }
    }
    CholeskyFactor check(cov); // throws NotPositiveDefinite when indefinite
}

CholeskyFactor::CholeskyFactor(const Eigen::MatrixXd& matrix) {
    const Eigen::Index n = matrix.rows();
    if (matrix.cols() != n) {
        throw DimensionError("factorization requires a square matrix");
    }
    const double pivot_floor = kPivotRelTol * matrix.diagonal().maxCoeff();
    lower_ = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double diag = matrix(j, j);
        for (Eigen::Index k = 0; k < j; ++k) diag -= lower_(j, k) * lower_(j, k);
        if (!(diag > pivot_floor)) {
            throw NotPositiveDefinite("pivot " + std::to_string(diag) +
                                      " at column " + std::to_string(j));
        }
        lower_(j, j) = std::sqrt(diag);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double sum = matrix(i, j);
            for (Eigen::Index k = 0; k < j; ++k) sum -= lower_(i, k) * lower_(j, k);
            lower_(i, j) = sum / lower_(j, j);
        }
    }
}

double CholeskyFactor::log_det() const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < lower_.rows(); ++i) acc += std::log(lower_(i, i));
    return 2.0 * acc;
}

Eigen::VectorXd CholeskyFactor::solve_lower(const Eigen::VectorXd& rhs) const {
    return lower_.triangularView<Eigen::Lower>().solve(rhs);
}

Eigen::VectorXd CholeskyFactor::solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd y = lower_.triangularView<Eigen::Lower>().solve(rhs);
    return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Eigen::MatrixXd CholeskyFactor::solve(const Eigen::MatrixXd& rhs) const {
    Eigen::MatrixXd y = lower_.triangularView<Eigen::Lower>().solve(rhs);
    return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Eigen::MatrixXd CholeskyFactor::inverse() const {
    const Eigen::MatrixXd identity =
        Eigen::MatrixXd::Identity(lower_.rows(), lower_.cols());
    Eigen::MatrixXd inv = solve(identity);
    return 0.5 * (inv + inv.transpose());
}

double log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                   const CholeskyFactor& factor) {
    if (x.size() != mean.size() || x.size() != factor.dim()) {
        throw DimensionError("log_density: point dimension mismatch");
    }
    const Eigen::VectorXd whitened = factor.solve_lower(x - mean);
    const double n = static_cast<double>(x.size());
    return -0.5 * (n * kLog2Pi + factor.log_det() + whitened.squaredNorm());
}

double log_density(const Eigen::VectorXd& x, const GaussianParams& g) {
    if (x.size() != g.mean.size()) {
        throw DimensionError("log_density: point dimension mismatch");
    }
    return log_density(x, g.mean, CholeskyFactor(g.cov));
}

Eigen::VectorXd sample_gaussian_one(const Eigen::VectorXd& mean,
                                    const CholeskyFactor& factor,
                                    RandomStream& stream) {
    Eigen::VectorXd eps(mean.size());
    for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = stream.next_normal();
    return mean + factor.matrix_l() * eps;
}

std::vector<Eigen::VectorXd> sample_gaussian(const GaussianParams& g,
                                             int count, Seed seed) {
    if (count < 1) throw InvalidArgument("sample_gaussian: count must be >= 1");
    CholeskyFactor factor(g.cov);
    RandomStream stream(seed);
    std::vector<Eigen::VectorXd> draws;
    draws.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        draws.push_back(sample_gaussian_one(g.mean, factor, stream));
    }
    return draws;
}

std::vector<Eigen::Vector2d> sigma_ellipse(const GaussianParams& g,
                                           int n_points) {
    if (g.dim() != 2) throw DimensionError("sigma_ellipse: 2-D Gaussians only");
    if (n_points < 3) throw InvalidArgument("sigma_ellipse: need >= 3 points");
    CholeskyFactor factor(g.cov);
    std::vector<Eigen::Vector2d> points;
    points.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n_points;
        const Eigen::Vector2d unit(std::cos(t), std::sin(t));
        points.emplace_back(g.mean + factor.matrix_l() * unit);
    }
    return points;
}

} // namespace mixlab
