#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "mixlab/cli/commands.hpp"
#include "mixlab/cli/config.hpp"
#include "mixlab/errors.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::string seed;
    std::string k_hat;
};

void add_common(CLI::App* sub, CommonOptions& options) {
    sub->add_option("--config", options.config_path,
                    "flat key = value configuration file");
    sub->add_option("--out", options.out_dir, "output directory");
    sub->add_option("--seed", options.seed, "seed override");
    sub->add_option("--k-hat", options.k_hat, "assumed component count");
}

mixlab::cli::Config merge(const CommonOptions& options) {
    mixlab::cli::Config config;
    if (!options.config_path.empty()) {
        config = mixlab::cli::Config::load_file(options.config_path);
    }
    if (!options.out_dir.empty()) config.set("out", options.out_dir);
    if (!options.seed.empty()) config.set("seed", options.seed);
    if (!options.k_hat.empty()) config.set("k_hat", options.k_hat);
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian mixture EM / variational Bayes / VAE workbench"};
    app.require_subcommand(1);

    CommonOptions options;
    auto* gen_data = app.add_subcommand(
        "gen-data",
        "draw a labelled mixture dataset\n"
        "config keys: out, seed, n, k, weights, mean.<i>, cov.<i>\n"
        "(defaults: the 3-component experiment, n = 5000)");
    auto* fit_em = app.add_subcommand(
        "fit-em",
        "run EM on a dataset\n"
        "config keys: out, seed, data, k_hat, max_passes, loglik_tol");
    auto* fit_vb = app.add_subcommand(
        "fit-vb",
        "mean-field fit of the built-in quadratic model\n"
        "config keys: out, seed, precision, linear, max_sweeps, tol");
    auto* train_vae = app.add_subcommand(
        "train-vae",
        "train a VAE on a dataset\n"
        "config keys: out, seed, data, n_z, hidden, mc_samples, batch, lr,\n"
        "epochs, estimator (A|B), eval_samples");
    auto* report = app.add_subcommand(
        "report",
        "compare estimated and true mixture parameters\n"
        "config keys: out, estimated, truth");
    for (auto* sub : {gen_data, fit_em, fit_vb, train_vae, report}) {
        add_common(sub, options);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const mixlab::cli::Config config = merge(options);
        if (gen_data->parsed()) {
            mixlab::cli::cmd_gen_data(config, std::cout);
        } else if (fit_em->parsed()) {
            mixlab::cli::cmd_fit_em(config, std::cout);
        } else if (fit_vb->parsed()) {
            mixlab::cli::cmd_fit_vb(config, std::cout);
        } else if (train_vae->parsed()) {
            mixlab::cli::cmd_train_vae(config, std::cout);
        } else if (report->parsed()) {
            mixlab::cli::cmd_report(config, std::cout);
        }
    } catch (const mixlab::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const mixlab::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const mixlab::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
