#include "mixlab/cli/report.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>

#include "mixlab/cli/table_io.hpp"
#include "mixlab/errors.hpp"

namespace mixlab::cli {

ComponentMatch match_components(const MixtureParams& estimated,
                                const MixtureParams& truth) {
    const int k_est = estimated.k();
    const int k_true = truth.k();
    if (k_est > 6 || k_true > 6) {
        throw InvalidArgument("component matching supports K <= 6");
    }
    if (estimated.dim() != truth.dim()) {
        throw DimensionError("matching requires equal component dimensions");
    }

    // assign each index of the smaller side to a distinct index of the
    // larger side, exhaustively over ordered selections
    const bool est_smaller = k_est <= k_true;
    const int n_small = est_smaller ? k_est : k_true;
    const int n_large = est_smaller ? k_true : k_est;

    std::vector<int> selection(static_cast<std::size_t>(n_large));
    std::iota(selection.begin(), selection.end(), 0);
    std::vector<int> best;
    double best_cost = std::numeric_limits<double>::infinity();
    std::sort(selection.begin(), selection.end());
    do {
        double cost = 0.0;
        for (int i = 0; i < n_small; ++i) {
            const int e = est_smaller ? i : selection[static_cast<std::size_t>(i)];
            const int t = est_smaller ? selection[static_cast<std::size_t>(i)] : i;
            cost += (estimated.components[static_cast<std::size_t>(e)].mean -
                     truth.components[static_cast<std::size_t>(t)].mean)
                        .norm();
        }
        if (cost < best_cost) {
            best_cost = cost;
            best.assign(selection.begin(),
                        selection.begin() + n_small);
        }
        // only the first n_small positions matter; skip permutations that
        // differ beyond them
        std::reverse(selection.begin() + n_small, selection.end());
    } while (std::next_permutation(selection.begin(), selection.end()));

    ComponentMatch match;
    std::vector<bool> large_used(static_cast<std::size_t>(n_large), false);
    for (int i = 0; i < n_small; ++i) {
        const int chosen = best[static_cast<std::size_t>(i)];
        large_used[static_cast<std::size_t>(chosen)] = true;
        if (est_smaller) {
            match.pairs.emplace_back(i, chosen);
        } else {
            match.pairs.emplace_back(chosen, i);
        }
    }
    for (int i = 0; i < n_large; ++i) {
        if (large_used[static_cast<std::size_t>(i)]) continue;
        if (est_smaller) {
            match.unmatched_truth.push_back(i);
        } else {
            match.unmatched_estimated.push_back(i);
        }
    }
    std::sort(match.pairs.begin(), match.pairs.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    return match;
}

void write_comparison_report(const std::string& path,
                             const MixtureParams& estimated,
                             const MixtureParams& truth) {
    const ComponentMatch match = match_components(estimated, truth);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write report: " + path);

    out << "matched components: " << match.pairs.size() << '\n';
    for (const auto& [e, t] : match.pairs) {
        const auto& est = estimated.components[static_cast<std::size_t>(e)];
        const auto& tru = truth.components[static_cast<std::size_t>(t)];
        out << "\ntruth component " << (t + 1) << " <- estimate " << (e + 1)
            << '\n';
        out << "  weight  est " << format_real(estimated.weights(e)) << "  true "
            << format_real(truth.weights(t)) << "  delta "
            << format_real(estimated.weights(e) - truth.weights(t)) << '\n';
        out << "  mean    est [";
        for (Eigen::Index i = 0; i < est.mean.size(); ++i) {
            out << (i ? " " : "") << format_real(est.mean(i));
        }
        out << "]  true [";
        for (Eigen::Index i = 0; i < tru.mean.size(); ++i) {
            out << (i ? " " : "") << format_real(tru.mean(i));
        }
        out << "]  delta [";
        for (Eigen::Index i = 0; i < est.mean.size(); ++i) {
            out << (i ? " " : "") << format_real(est.mean(i) - tru.mean(i));
        }
        out << "]\n";
        out << "  cov     max abs delta "
            << format_real((est.cov - tru.cov).cwiseAbs().maxCoeff()) << '\n';
    }
    if (!match.unmatched_estimated.empty()) {
        out << "\nunmatched estimated components:";
        for (int e : match.unmatched_estimated) out << ' ' << (e + 1);
        out << '\n';
    }
    if (!match.unmatched_truth.empty()) {
        out << "\nunmatched truth components:";
        for (int t : match.unmatched_truth) out << ' ' << (t + 1);
        out << '\n';
    }
}

} // namespace mixlab::cli
