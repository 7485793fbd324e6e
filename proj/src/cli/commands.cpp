#include "mixlab/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <vector>

#include "mixlab/cli/checkpoint.hpp"
#include "mixlab/cli/report.hpp"
#include "mixlab/cli/svg.hpp"
#include "mixlab/cli/table_io.hpp"
#include "mixlab/errors.hpp"
#include "mixlab/mixture.hpp"
#include "mixlab/vae.hpp"
#include "mixlab/variational.hpp"

namespace mixlab::cli {

namespace {

std::string prepare_out_dir(const Config& config) {
    const std::string out = config.get_string("out", "out");
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory: " + out);
    return out;
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

/// The generation model of the 2-D experiment; keys k / weights / mean.<i>
/// / cov.<i> override the defaults (weights 0.25/0.40/0.35, means [0,2],
/// [3,1], [6,3], shared diag(0.5, 0.5)).
MixtureParams mixture_from_config(const Config& config) {
    MixtureParams theta;
    const int k = config.get_int("k", 3);
    if (k < 1) throw InvalidArgument("k must be >= 1");
    if (config.has("weights")) {
        const auto weights = config.get_doubles("weights");
        if (static_cast<int>(weights.size()) != k) {
            throw InvalidArgument("weights length must equal k");
        }
        theta.weights =
            Eigen::Map<const Eigen::VectorXd>(weights.data(), k);
    } else if (k == 3) {
        theta.weights = Eigen::Vector3d(0.25, 0.40, 0.35);
    } else {
        theta.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
    }

    const double default_means[3][2] = {{0.0, 2.0}, {3.0, 1.0}, {6.0, 3.0}};
    for (int i = 0; i < k; ++i) {
        GaussianParams comp;
        const std::string mean_key = "mean." + std::to_string(i + 1);
        if (config.has(mean_key)) {
            const auto mean = config.get_doubles(mean_key);
            comp.mean = Eigen::Map<const Eigen::VectorXd>(
                mean.data(), static_cast<Eigen::Index>(mean.size()));
        } else if (k == 3 && i < 3) {
            comp.mean = Eigen::Vector2d(default_means[i][0], default_means[i][1]);
        } else {
            throw InvalidArgument("missing " + mean_key +
                                  " (defaults only cover k = 3)");
        }
        const std::string cov_key = "cov." + std::to_string(i + 1);
        const auto dim = comp.mean.size();
        if (config.has(cov_key)) {
            const auto cov = config.get_doubles(cov_key);
            if (static_cast<Eigen::Index>(cov.size()) != dim * dim) {
                throw InvalidArgument(cov_key + " must hold dim*dim entries");
            }
            comp.cov = Eigen::Map<const Eigen::Matrix<
                double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                cov.data(), dim, dim);
        } else {
            comp.cov = 0.5 * Eigen::MatrixXd::Identity(dim, dim);
        }
        theta.components.push_back(std::move(comp));
    }
    theta.validate();
    return theta;
}

std::set<std::string> with_mixture_keys(std::set<std::string> base, int max_k) {
    for (int i = 1; i <= max_k; ++i) {
        base.insert("mean." + std::to_string(i));
        base.insert("cov." + std::to_string(i));
    }
    return base;
}

} // namespace

void cmd_gen_data(const Config& config, std::ostream& log) {
    config.require_known(
        with_mixture_keys({"out", "seed", "n", "k", "weights"}, 16));
    const std::string out = prepare_out_dir(config);
    const MixtureParams theta = mixture_from_config(config);
    const int n = config.get_int("n", 5000);
    const Seed seed{config.get_u64("seed", 0)};

    const GmmSample sample = generate_gmm_data(theta, n, seed);
    write_data_csv(join(out, "data.csv"), sample);
    write_params_file(join(out, "truth_params.txt"), theta);

    std::vector<int> counts(static_cast<std::size_t>(theta.k()), 0);
    for (int label : sample.labels) {
        ++counts[static_cast<std::size_t>(label)];
    }
    log << "wrote " << sample.points.size() << " samples to "
        << join(out, "data.csv") << "\n";
    for (int k = 0; k < theta.k(); ++k) {
        log << "component " << (k + 1) << ": "
            << counts[static_cast<std::size_t>(k)] << " samples\n";
    }
}

void cmd_fit_em(const Config& config, std::ostream& log) {
    config.require_known(
        {"out", "seed", "data", "k_hat", "max_passes", "loglik_tol"});
    const std::string out = prepare_out_dir(config);
    const std::string data_path = config.get_required("data");
    const int k_hat = config.get_int("k_hat", 3);
    if (k_hat < 1 || k_hat > 16) {
        throw InvalidArgument("k_hat must lie in [1, 16]");
    }
    StoppingRule stop;
    stop.max_passes = config.get_int("max_passes", 50);
    stop.loglik_tol = config.get_double("loglik_tol", 1e-3);
    const Seed seed{config.get_u64("seed", 0)};

    const LabelledData data = read_data_csv(data_path);
    const MixtureParams init = init_grid(data.points, k_hat, seed);
    const EmTrace trace = fit_em(data.points, stop, init);

    write_em_report(join(out, "em_report.txt"), trace);
    write_params_file(join(out, "em_params.txt"), trace.final_params());
    write_em_trace_csv(join(out, "em_trace.csv"), trace);
    write_em_svg(join(out, "em_ellipses.svg"), data.points, data.labels, trace);

    log << "fit " << k_hat << " components in " << trace.passes_run()
        << " passes ("
        << (trace.stop_reason == StopReason::Converged ? "converged"
                                                       : "max passes")
        << "), final log-likelihood "
        << format_real(trace.final_loglik()) << "\n";
}

void cmd_fit_vb(const Config& config, std::ostream& log) {
    config.require_known(
        {"out", "seed", "precision", "linear", "max_sweeps", "tol"});
    const std::string out = prepare_out_dir(config);

    Eigen::MatrixXd precision(2, 2);
    precision << 2.0, 1.0, 1.0, 2.0;
    if (config.has("precision")) {
        const auto entries = config.get_doubles("precision");
        const auto dim = static_cast<Eigen::Index>(
            std::llround(std::sqrt(static_cast<double>(entries.size()))));
        if (dim * dim != static_cast<Eigen::Index>(entries.size()) || dim < 1) {
            throw InvalidArgument("precision must be a square row-major matrix");
        }
        precision = Eigen::Map<const Eigen::Matrix<
            double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            entries.data(), dim, dim);
    }
    Eigen::VectorXd linear = Eigen::VectorXd::Zero(precision.rows());
    if (config.has("linear")) {
        const auto entries = config.get_doubles("linear");
        if (static_cast<Eigen::Index>(entries.size()) != precision.rows()) {
            throw InvalidArgument("linear length must match precision size");
        }
        linear = Eigen::Map<const Eigen::VectorXd>(
            entries.data(), static_cast<Eigen::Index>(entries.size()));
    }

    QuadraticForm form;
    form.constant = 0.0;
    form.linear = linear;
    form.precision = precision;
    const LatentModel model = LatentModel::from_quadratic(std::move(form));

    const int max_sweeps = config.get_int("max_sweeps", 100);
    const double tol = config.get_double("tol", 1e-10);
    const MeanFieldState state =
        mean_field_fit(model, MeanFieldState::fully_factorized(model.latent_dim),
                       max_sweeps, tol);

    std::ofstream factors(join(out, "vb_factors.txt"), std::ios::binary);
    if (!factors) throw IoError("cannot write vb_factors.txt");
    for (std::size_t j = 0; j < state.factors.size(); ++j) {
        const auto& params = state.factors[j].params;
        factors << "factor." << (j + 1) << ".mean =";
        for (Eigen::Index i = 0; i < params.mean.size(); ++i) {
            factors << ' ' << format_real(params.mean(i));
        }
        factors << '\n' << "factor." << (j + 1) << ".cov =";
        for (Eigen::Index r = 0; r < params.cov.rows(); ++r) {
            for (Eigen::Index c = 0; c < params.cov.cols(); ++c) {
                factors << ' ' << format_real(params.cov(r, c));
            }
        }
        factors << '\n';
    }
    write_scalar_trace_csv(join(out, "vb_trace.csv"), "sweep", "vlb",
                           state.vlb_trace);
    log << "mean field converged in " << state.vlb_trace.size()
        << " sweeps, final vlb " << format_real(state.vlb_trace.back())
        << "\n";
}

void cmd_train_vae(const Config& config, std::ostream& log) {
    config.require_known({"out", "seed", "data", "n_z", "hidden", "mc_samples",
                          "batch", "lr", "epochs", "estimator",
                          "eval_samples"});
    const std::string out = prepare_out_dir(config);
    const LabelledData data = read_data_csv(config.get_required("data"));

    VaeConfig vae_config;
    vae_config.n_x = static_cast<int>(data.points.front().size());
    vae_config.n_z = config.get_int("n_z", 2);
    const auto hidden = config.get_doubles("hidden");
    if (!hidden.empty()) {
        std::vector<int> widths;
        for (double w : hidden) widths.push_back(static_cast<int>(w));
        vae_config.encoder_hidden = widths;
        vae_config.decoder_hidden = widths;
    }
    vae_config.mc_samples = config.get_int("mc_samples", 1);
    vae_config.batch_size = config.get_int("batch", 100);
    vae_config.learning_rate = config.get_double("lr", 1e-3);
    vae_config.epochs = config.get_int("epochs", 50);
    vae_config.seed = Seed{config.get_u64("seed", 0)};

    const std::string estimator = config.get_string("estimator", "B");
    if (estimator != "A" && estimator != "B") {
        throw InvalidArgument("estimator must be A or B");
    }
    const EstimatorKind kind =
        estimator == "A" ? EstimatorKind::A : EstimatorKind::B;

    const VaeTrainResult result = train_vae(data.points, vae_config, kind);
    save_checkpoint(join(out, "vae_checkpoint.txt"), result.phi, result.theta);
    write_scalar_trace_csv(join(out, "vae_trace.csv"), "epoch", "bound",
                           result.epoch_bound);

    // reported bound: high-draw estimate averaged over the dataset; the
    // standard error combines the per-point MC errors of the sampled term
    const int eval_draws = config.get_int("eval_samples", 100);
    const GaussianParams prior = standard_normal_prior(vae_config.n_z);
    double bound_sum = 0.0;
    double var_sum = 0.0;
    for (std::size_t i = 0; i < data.points.size(); ++i) {
        RandomStream stream(derive_seed(vae_config.seed, 3, static_cast<int>(i)));
        double draw_sum = 0.0;
        double draw_sq_sum = 0.0;
        for (int l = 0; l < eval_draws; ++l) {
            Eigen::VectorXd eps(vae_config.n_z);
            for (int j = 0; j < vae_config.n_z; ++j) {
                eps(j) = stream.next_normal();
            }
            const ElboEstimate one = elbo_b_with_noise(
                data.points[i], result.phi, result.theta, prior, {&eps, 1});
            draw_sum += one.value;
            draw_sq_sum += one.value * one.value;
        }
        bound_sum += draw_sum / eval_draws;
        if (eval_draws > 1) {
            const double variance = std::max(
                0.0, (draw_sq_sum - draw_sum * draw_sum / eval_draws) /
                         (eval_draws - 1));
            var_sum += variance / eval_draws;
        }
    }
    const double n = static_cast<double>(data.points.size());
    const double mean_bound = bound_sum / n;
    const double std_error = std::sqrt(var_sum) / n;
    log << "trained " << vae_config.epochs << " epochs; final epoch bound "
        << format_real(result.epoch_bound.empty() ? 0.0
                                                  : result.epoch_bound.back())
        << "\n";
    log << "dataset mean elbo_B (" << eval_draws
        << " draws/point): " << format_real(mean_bound) << " +- "
        << format_real(std_error) << "\n";
}

void cmd_report(const Config& config, std::ostream& log) {
    config.require_known({"out", "seed", "estimated", "truth"});
    const std::string out = prepare_out_dir(config);
    const MixtureParams estimated =
        read_params_file(config.get_required("estimated"));
    const MixtureParams truth = read_params_file(config.get_required("truth"));
    write_comparison_report(join(out, "comparison.txt"), estimated, truth);
    log << "wrote " << join(out, "comparison.txt") << "\n";
}

} // namespace mixlab::cli
