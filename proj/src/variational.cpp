#include "mixlab/variational.hpp"

#include <cmath>
#include <string>

#include "mixlab/errors.hpp"

namespace mixlab {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void check_same_dim(const GaussianParams& a, const GaussianParams& b,
                    const char* what) {
    if (a.dim() != b.dim()) {
        throw DimensionError(std::string(what) + ": dimension mismatch");
    }
}

void check_symmetric(const Eigen::MatrixXd& m, const char* what) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
            if (std::abs(m(i, j) - m(j, i)) > 1e-12) {
                throw NotPositiveDefinite(std::string(what) +
                                          ": matrix is not symmetric");
            }
        }
    }
}

/// 0.5 * (n log(2 pi e) + log det cov)
double gaussian_entropy(const CholeskyFactor& factor) {
    const double n = factor.dim();
    return 0.5 * (n * (kLog2Pi + 1.0) + factor.log_det());
}

} // namespace

double QuadraticForm::evaluate(const Eigen::VectorXd& z) const {
    if (z.size() != linear.size()) {
        throw DimensionError("quadratic form: point dimension mismatch");
    }
    return constant + linear.dot(z) - 0.5 * z.dot(precision * z);
}

LatentModel LatentModel::from_quadratic(QuadraticForm form) {
    check_symmetric(form.precision, "quadratic joint");
    CholeskyFactor factor(form.precision);
    const int n = form.dim();

    GaussianParams posterior;
    posterior.mean = factor.solve(form.linear);
    posterior.cov = factor.inverse();

    // log int exp(b.z - z'Az/2) dz = b'A^-1 b / 2 + n/2 log 2pi - log det A / 2
    const double log_evidence = form.constant +
                                0.5 * form.linear.dot(posterior.mean) +
                                0.5 * n * kLog2Pi - 0.5 * factor.log_det();

    LatentModel model;
    model.latent_dim = n;
    model.exact_log_evidence = log_evidence;
    model.exact_posterior = posterior;
    model.joint_log_density = [form](const Eigen::VectorXd& z) {
        return form.evaluate(z);
    };
    model.quadratic = std::move(form);
    return model;
}

MeanFieldState MeanFieldState::fully_factorized(int latent_dim) {
    MeanFieldState state;
    for (int i = 0; i < latent_dim; ++i) {
        state.partition.push_back(Block{i, 1});
        GaussianParams params;
        params.mean = Eigen::VectorXd::Zero(1);
        params.cov = Eigen::MatrixXd::Identity(1, 1);
        state.factors.push_back(GaussianFactor{std::move(params)});
    }
    return state;
}

Eigen::VectorXd MeanFieldState::stacked_mean() const {
    int dim = 0;
    for (const auto& block : partition) dim += block.size;
    Eigen::VectorXd mean(dim);
    for (std::size_t j = 0; j < partition.size(); ++j) {
        mean.segment(partition[j].start, partition[j].size) =
            factors[j].params.mean;
    }
    return mean;
}

double kl_gaussian(const GaussianParams& q, const GaussianParams& p) {
    check_same_dim(q, p, "kl_gaussian");
    check_symmetric(q.cov, "kl_gaussian q");
    check_symmetric(p.cov, "kl_gaussian p");
    CholeskyFactor factor_p(p.cov);
    CholeskyFactor factor_q(q.cov);
    const double trace_term = factor_p.solve(q.cov).trace();
    const double quad_term =
        factor_p.solve_lower(p.mean - q.mean).squaredNorm();
    const double n = q.dim();
    return 0.5 * (trace_term + quad_term - n + factor_p.log_det() -
                  factor_q.log_det());
}

double vlb_gaussian_q(const LatentModel& model, const GaussianParams& q,
                      int n_mc, Seed seed) {
    if (q.dim() != model.latent_dim) {
        throw DimensionError("vlb_gaussian_q: q dimension mismatch");
    }
    if (n_mc < 1) throw InvalidArgument("vlb_gaussian_q: n_mc must be >= 1");
    CholeskyFactor factor(q.cov);
    RandomStream stream(seed);
    double acc = 0.0;
    for (int i = 0; i < n_mc; ++i) {
        const Eigen::VectorXd z = sample_gaussian_one(q.mean, factor, stream);
        acc += model.joint_log_density(z) - log_density(z, q.mean, factor);
    }
    return acc / n_mc;
}

double analytic_vlb(const QuadraticForm& form, const GaussianParams& q) {
    if (q.dim() != form.dim()) {
        throw DimensionError("analytic_vlb: q dimension mismatch");
    }
    CholeskyFactor factor_q(q.cov);
    const double expected_log_joint =
        form.constant + form.linear.dot(q.mean) -
        0.5 * (q.mean.dot(form.precision * q.mean) +
               (form.precision * q.cov).trace());
    return expected_log_joint + gaussian_entropy(factor_q);
}

double analytic_vlb(const QuadraticForm& form, const MeanFieldState& state) {
    const Eigen::VectorXd mean = state.stacked_mean();
    if (mean.size() != form.dim()) {
        throw DimensionError("analytic_vlb: state dimension mismatch");
    }
    double trace_term = 0.0;
    double entropy = 0.0;
    for (std::size_t j = 0; j < state.partition.size(); ++j) {
        const Block& block = state.partition[j];
        const Eigen::MatrixXd precision_jj =
            form.precision.block(block.start, block.start, block.size,
                                 block.size);
        trace_term += (precision_jj * state.factors[j].params.cov).trace();
        entropy += gaussian_entropy(CholeskyFactor(state.factors[j].params.cov));
    }
    const double expected_log_joint =
        form.constant + form.linear.dot(mean) -
        0.5 * (mean.dot(form.precision * mean) + trace_term);
    return expected_log_joint + entropy;
}

double evidence_gap(const LatentModel& model, const GaussianParams& q) {
    if (!model.exact_log_evidence || !model.exact_posterior ||
        !model.quadratic) {
        throw UnsupportedModel("evidence_gap needs a tractable model");
    }
    return *model.exact_log_evidence -
           (analytic_vlb(*model.quadratic, q) +
            kl_gaussian(q, *model.exact_posterior));
}

GaussianFactor mean_field_update(const LatentModel& model,
                                 const MeanFieldState& state, int block_index) {
    if (!model.quadratic) {
        throw UnsupportedModel("mean_field_update needs a quadratic joint");
    }
    if (block_index < 0 ||
        block_index >= static_cast<int>(state.partition.size())) {
        throw InvalidArgument("mean_field_update: block index out of range");
    }
    const QuadraticForm& form = *model.quadratic;
    const Block& block = state.partition[static_cast<std::size_t>(block_index)];

    // E_{i != j}[log p] is quadratic in z_j with curvature Lambda_jj and
    // linear term b_j - Lambda_{j,other} E[z_other].
    const Eigen::VectorXd mean_all = state.stacked_mean();
    const Eigen::MatrixXd precision_jj =
        form.precision.block(block.start, block.start, block.size, block.size);
    const Eigen::VectorXd coupling =
        form.precision.middleRows(block.start, block.size) * mean_all -
        precision_jj * mean_all.segment(block.start, block.size);
    const Eigen::VectorXd rhs =
        form.linear.segment(block.start, block.size) - coupling;

    CholeskyFactor factor(precision_jj);
    GaussianParams params;
    params.mean = factor.solve(rhs);
    params.cov = factor.inverse();
    return GaussianFactor{std::move(params)};
}

MeanFieldState mean_field_fit(const LatentModel& model, MeanFieldState init,
                              int max_sweeps, double tol) {
    if (max_sweeps < 1) throw InvalidArgument("max_sweeps must be >= 1");
    if (!(tol > 0.0)) throw InvalidArgument("tol must be > 0");
    if (!model.quadratic) {
        throw UnsupportedModel("mean_field_fit needs a quadratic joint");
    }
    MeanFieldState state = std::move(init);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (std::size_t j = 0; j < state.partition.size(); ++j) {
            GaussianFactor updated =
                mean_field_update(model, state, static_cast<int>(j));
            max_change = std::max(
                max_change, (updated.params.mean - state.factors[j].params.mean)
                                .cwiseAbs()
                                .maxCoeff());
            max_change = std::max(
                max_change, (updated.params.cov - state.factors[j].params.cov)
                                .cwiseAbs()
                                .maxCoeff());
            state.factors[j] = std::move(updated);
        }
        state.vlb_trace.push_back(analytic_vlb(*model.quadratic, state));
        if (max_change < tol) break;
    }
    return state;
}

std::pair<GaussianParams, Eigen::VectorXd> generalized_em_step(
    const QuadraticFamily& family, const GaussianParams& q,
    const Eigen::VectorXd& theta) {
    if (!family.joint_for || !family.m_step) {
        throw UnsupportedModel("family must supply joint_for and m_step");
    }
    if (q.dim() != family.latent_dim) {
        throw DimensionError("generalized_em_step: q dimension mismatch");
    }
    const LatentModel model = LatentModel::from_quadratic(family.joint_for(theta));
    GaussianParams q_new = *model.exact_posterior;
    Eigen::VectorXd theta_new = family.m_step(q_new);
    return {std::move(q_new), std::move(theta_new)};
}

QuadraticFamily mean_offset_family(std::vector<Eigen::VectorXd> data,
                                   Eigen::MatrixXd noise_cov,
                                   Eigen::MatrixXd prior_cov) {
    if (data.empty()) throw InvalidArgument("mean_offset_family: empty data");
    const int dim = static_cast<int>(data.front().size());
    for (const auto& x : data) {
        if (x.size() != dim) {
            throw DimensionError("mean_offset_family: ragged data");
        }
    }
    CholeskyFactor factor_r(noise_cov);
    CholeskyFactor factor_p0(prior_cov);
    const double n = static_cast<double>(data.size());
    const Eigen::MatrixXd r_inv = factor_r.inverse();
    const Eigen::MatrixXd p0_inv = factor_p0.inverse();
    Eigen::VectorXd data_mean = Eigen::VectorXd::Zero(dim);
    for (const auto& x : data) data_mean += x;
    data_mean /= n;
    const double log_det_r = factor_r.log_det();
    const double log_det_p0 = factor_p0.log_det();

    QuadraticFamily family;
    family.latent_dim = dim;
    family.joint_for = [data = std::move(data), r_inv, p0_inv, log_det_r,
                        log_det_p0, dim, n](const Eigen::VectorXd& theta) {
        if (theta.size() != dim) {
            throw DimensionError("mean_offset_family: theta dimension mismatch");
        }
        QuadraticForm form;
        form.precision = n * r_inv + p0_inv;
        form.linear = Eigen::VectorXd::Zero(dim);
        double quad = 0.0;
        for (const auto& x : data) {
            const Eigen::VectorXd centered = x - theta;
            form.linear += r_inv * centered;
            quad += centered.dot(r_inv * centered);
        }
        form.constant = -0.5 * quad - 0.5 * (n + 1.0) * dim * kLog2Pi -
                        0.5 * n * log_det_r - 0.5 * log_det_p0;
        return form;
    };
    family.m_step = [data_mean](const GaussianParams& q) {
        return (data_mean - q.mean).eval();
    };
    return family;
}

} // namespace mixlab
