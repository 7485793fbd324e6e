#include "mixlab/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mixlab/errors.hpp"

namespace mixlab {

namespace {

constexpr double kWeightSumTol = 1e-12;
constexpr double kEmptyColumnRelTol = 1e-10;

/// log-weighted densities per component for one point; shared by the
/// likelihood, responsibility and Q computations.
void log_weighted_terms(const Eigen::VectorXd& x, const MixtureParams& theta,
                        const std::vector<CholeskyFactor>& factors,
                        Eigen::VectorXd& out) {
    for (int k = 0; k < theta.k(); ++k) {
        const double pi_k = theta.weights(k);
        out(k) = pi_k > 0.0
                     ? std::log(pi_k) +
                           log_density(x, theta.components[k].mean, factors[k])
                     : -std::numeric_limits<double>::infinity();
    }
}

double log_sum_exp(const Eigen::VectorXd& terms) {
    const double hi = terms.maxCoeff();
    if (!std::isfinite(hi)) return hi; // all -inf (or a NaN poisoned the row)
    double acc = 0.0;
    for (Eigen::Index k = 0; k < terms.size(); ++k) acc += std::exp(terms(k) - hi);
    return hi + std::log(acc);
}

std::vector<CholeskyFactor> factorize_components(const MixtureParams& theta) {
    std::vector<CholeskyFactor> factors;
    factors.reserve(theta.components.size());
    for (const auto& comp : theta.components) factors.emplace_back(comp.cov);
    return factors;
}

void check_data(const std::vector<Eigen::VectorXd>& data,
                const MixtureParams& theta) {
    if (data.empty()) throw InvalidArgument("empty data set");
    for (const auto& x : data) {
        if (x.size() != theta.dim()) {
            throw DimensionError("data point dimension does not match mixture");
        }
    }
}

/// Global biased sample covariance trace, for M-step regularization.
double regularization_lambda(const std::vector<Eigen::VectorXd>& data) {
    const int dim = static_cast<int>(data.front().size());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (const auto& x : data) mean += x;
    mean /= static_cast<double>(data.size());
    double trace = 0.0;
    for (const auto& x : data) trace += (x - mean).squaredNorm();
    trace /= static_cast<double>(data.size());
    return 1e-6 * trace / dim;
}

} // namespace

void MixtureParams::validate() const {
    if (components.empty() || weights.size() != k()) {
        throw DimensionError("mixture weight/component count mismatch");
    }
    if (weights.minCoeff() < 0.0) {
        throw InvalidArgument("mixture weights must be non-negative");
    }
    if (std::abs(weights.sum() - 1.0) > kWeightSumTol) {
        throw InvalidArgument("mixture weights must sum to 1");
    }
    for (const auto& comp : components) {
        if (comp.dim() != dim()) {
            throw DimensionError("mixture components must share one dimension");
        }
        comp.validate();
    }
}

double mixture_log_likelihood(const std::vector<Eigen::VectorXd>& data,
                              const MixtureParams& theta) {
    check_data(data, theta);
    const auto factors = factorize_components(theta);
    Eigen::VectorXd terms(theta.k());
    double total = 0.0;
    for (const auto& x : data) {
        log_weighted_terms(x, theta, factors, terms);
        total += log_sum_exp(terms);
    }
    return total;
}

Responsibilities responsibilities(const std::vector<Eigen::VectorXd>& data,
                                  const MixtureParams& theta) {
    check_data(data, theta);
    const auto factors = factorize_components(theta);
    const int n = static_cast<int>(data.size());
    Eigen::MatrixXd w(n, theta.k());
    Eigen::VectorXd terms(theta.k());
    for (int i = 0; i < n; ++i) {
        log_weighted_terms(data[static_cast<std::size_t>(i)], theta, factors,
                           terms);
        const double denom = log_sum_exp(terms);
        if (!std::isfinite(denom)) {
            throw DegenerateResponsibility("row " + std::to_string(i) +
                                           " lost all mass");
        }
        for (int k = 0; k < theta.k(); ++k) w(i, k) = std::exp(terms(k) - denom);
    }
    return Responsibilities{std::move(w)};
}

std::vector<int> map_labels(const Responsibilities& resp) {
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(resp.w.rows()));
    for (Eigen::Index i = 0; i < resp.w.rows(); ++i) {
        int best = 0;
        for (Eigen::Index k = 1; k < resp.w.cols(); ++k) {
            if (resp.w(i, k) > resp.w(i, best)) best = static_cast<int>(k);
        }
        labels.push_back(best);
    }
    return labels;
}

double baum_q(const std::vector<Eigen::VectorXd>& data,
              const MixtureParams& theta, const Responsibilities& resp) {
    check_data(data, theta);
    if (resp.w.rows() != static_cast<Eigen::Index>(data.size()) ||
        resp.w.cols() != theta.k()) {
        throw DimensionError("responsibility matrix shape mismatch");
    }
    const auto factors = factorize_components(theta);
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (int k = 0; k < theta.k(); ++k) {
            const double w = resp.w(static_cast<Eigen::Index>(i), k);
            if (w == 0.0) continue;
            const double pi_k = theta.weights(k);
            const double log_pi =
                pi_k > 0.0 ? std::log(pi_k)
                           : -std::numeric_limits<double>::infinity();
            total += w * (log_pi + log_density(data[i], theta.components[k].mean,
                                               factors[k]));
        }
    }
    return total;
}

MixtureParams m_step(const std::vector<Eigen::VectorXd>& data,
                     const Responsibilities& resp) {
    if (data.empty()) throw InvalidArgument("empty data set");
    const int n = static_cast<int>(data.size());
    const int k = static_cast<int>(resp.w.cols());
    const int dim = static_cast<int>(data.front().size());
    if (resp.w.rows() != n) {
        throw DimensionError("responsibility rows do not match data size");
    }
    const double lambda_reg = regularization_lambda(data);

    MixtureParams theta;
    theta.weights.resize(k);
    theta.components.resize(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        const double column_sum = resp.w.col(j).sum();
        if (column_sum < kEmptyColumnRelTol * n) {
            throw EmptyComponent("component " + std::to_string(j) +
                                 " column sum " + std::to_string(column_sum));
        }
        theta.weights(j) = column_sum / n;

        Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
        for (int i = 0; i < n; ++i) {
            mean += resp.w(i, j) * data[static_cast<std::size_t>(i)];
        }
        mean /= column_sum;

        Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(dim, dim);
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd centered =
                data[static_cast<std::size_t>(i)] - mean;
            scatter.noalias() += resp.w(i, j) * (centered * centered.transpose());
        }
        scatter /= column_sum;
        scatter += lambda_reg * Eigen::MatrixXd::Identity(dim, dim);

        theta.components[static_cast<std::size_t>(j)] =
            GaussianParams{std::move(mean), std::move(scatter)};
    }
    return theta;
}

MixtureParams init_grid(const std::vector<Eigen::VectorXd>& data, int k_hat,
                        Seed seed) {
    if (data.empty()) throw InvalidArgument("empty data set");
    if (k_hat < 1) throw InvalidArgument("k_hat must be >= 1");
    if (data.front().size() != 2) {
        throw DimensionError("init_grid expects 2-D data");
    }
    double x_min = data.front()(0), x_max = x_min;
    double y_min = data.front()(1), y_max = y_min;
    for (const auto& p : data) {
        x_min = std::min(x_min, p(0));
        x_max = std::max(x_max, p(0));
        y_min = std::min(y_min, p(1));
        y_max = std::max(y_max, p(1));
    }
    if (!(x_max > x_min) || !(y_max > y_min)) {
        throw DegenerateData("data bounding box has zero width or height");
    }

    const int r = static_cast<int>(
        std::ceil(std::sqrt(static_cast<double>(k_hat))));
    const double cell_w = (x_max - x_min) / r;
    const double cell_h = (y_max - y_min) / r;

    // choose k_hat distinct cells: partial Fisher-Yates over cell indices
    std::vector<int> cells(static_cast<std::size_t>(r) * r);
    std::iota(cells.begin(), cells.end(), 0);
    RandomStream stream(seed);
    for (int i = 0; i < k_hat; ++i) {
        const auto j = i + static_cast<int>(stream.next_below(
                               static_cast<std::uint64_t>(cells.size()) - i));
        std::swap(cells[static_cast<std::size_t>(i)],
                  cells[static_cast<std::size_t>(j)]);
    }

    const double sigma_x = (x_max - x_min) / 6.0;
    const double sigma_y = (y_max - y_min) / 6.0;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
    cov(0, 0) = sigma_x * sigma_x;
    cov(1, 1) = sigma_y * sigma_y;

    MixtureParams theta;
    theta.weights = Eigen::VectorXd::Constant(k_hat, 1.0 / k_hat);
    theta.components.reserve(static_cast<std::size_t>(k_hat));
    for (int i = 0; i < k_hat; ++i) {
        const int cell = cells[static_cast<std::size_t>(i)];
        const int col = cell % r;
        const int row = cell / r;
        Eigen::VectorXd mean(2);
        mean << x_min + (col + 0.5) * cell_w, y_min + (row + 0.5) * cell_h;
        theta.components.push_back(GaussianParams{std::move(mean), cov});
    }
    return theta;
}

EmTrace fit_em(const std::vector<Eigen::VectorXd>& data,
               const StoppingRule& stop, const MixtureParams& init) {
    if (stop.max_passes < 1) throw InvalidArgument("max_passes must be >= 1");
    if (!(stop.loglik_tol > 0.0)) throw InvalidArgument("loglik_tol must be > 0");
    init.validate();
    check_data(data, init);

    EmTrace trace;
    trace.passes.push_back(EmPass{0, init, mixture_log_likelihood(data, init)});
    trace.stop_reason = StopReason::MaxPasses;

    for (int pass = 1; pass <= stop.max_passes; ++pass) {
        const MixtureParams& current = trace.passes.back().theta;
        MixtureParams next;
        try {
            Responsibilities resp = responsibilities(data, current);
            next = m_step(data, resp);
        } catch (const EmptyComponent& e) {
            throw EmptyComponent(std::string(e.what()) + " (pass " +
                                 std::to_string(pass) + ")");
        } catch (const DegenerateResponsibility& e) {
            throw DegenerateResponsibility(std::string(e.what()) + " (pass " +
                                           std::to_string(pass) + ")");
        }
        const double loglik = mixture_log_likelihood(data, next);
        const double previous = trace.passes.back().loglik;
        trace.passes.push_back(EmPass{pass, std::move(next), loglik});
        if (std::abs(loglik - previous) < stop.loglik_tol) {
            trace.stop_reason = StopReason::Converged;
            break;
        }
    }
    return trace;
}

GmmSample generate_gmm_data(const MixtureParams& theta_true, int n, Seed seed) {
    theta_true.validate();
    if (n < 1) throw InvalidArgument("sample count must be >= 1");
    const auto factors = factorize_components(theta_true);

    GmmSample sample;
    sample.points.reserve(static_cast<std::size_t>(n));
    sample.labels.reserve(static_cast<std::size_t>(n));
    RandomStream stream(seed);
    for (int i = 0; i < n; ++i) {
        const double u = stream.next_double();
        int label = theta_true.k() - 1;
        double cum = 0.0;
        for (int k = 0; k < theta_true.k(); ++k) {
            cum += theta_true.weights(k);
            if (u < cum) {
                label = k;
                break;
            }
        }
        sample.labels.push_back(label);
        sample.points.push_back(sample_gaussian_one(
            theta_true.components[static_cast<std::size_t>(label)].mean,
            factors[static_cast<std::size_t>(label)], stream));
    }
    return sample;
}

} // namespace mixlab
