#include "mixlab/cli/table_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mixlab/cli/config.hpp"
#include "mixlab/errors.hpp"

namespace mixlab::cli {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // LF endings everywhere
    if (!out) throw IoError("cannot write file: " + path);
    return out;
}

/// Component order used in reports: lexicographic by mean coordinates.
std::vector<int> canonical_order(const MixtureParams& theta) {
    std::vector<int> order(static_cast<std::size_t>(theta.k()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&theta](int a, int b) {
        const auto& ma = theta.components[static_cast<std::size_t>(a)].mean;
        const auto& mb = theta.components[static_cast<std::size_t>(b)].mean;
        for (Eigen::Index i = 0; i < ma.size(); ++i) {
            if (ma(i) != mb(i)) return ma(i) < mb(i);
        }
        return a < b;
    });
    return order;
}

} // namespace

std::string format_real(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_data_csv(const std::string& path, const GmmSample& sample) {
    auto out = open_out(path);
    out << "x,y,label\n";
    for (std::size_t i = 0; i < sample.points.size(); ++i) {
        const auto& p = sample.points[i];
        out << format_real(p(0)) << ',' << format_real(p(1)) << ','
            << (sample.labels[i] + 1) << '\n';
    }
}

LabelledData read_data_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open data file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty data file: " + path);

    LabelledData data;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != 2 && cells.size() != 3) {
            throw IoError(path + ":" + std::to_string(line_no) +
                          ": expected 2 or 3 columns");
        }
        Eigen::VectorXd point(2);
        for (int c = 0; c < 2; ++c) {
            char* end = nullptr;
            point(c) = std::strtod(cells[(std::size_t)c].c_str(), &end);
            if (end == cells[(std::size_t)c].c_str()) {
                throw IoError(path + ":" + std::to_string(line_no) +
                              ": non-numeric cell");
            }
        }
        data.points.push_back(std::move(point));
        if (cells.size() == 3) data.labels.push_back(std::stoi(cells[2]) - 1);
    }
    if (data.points.empty()) throw IoError("data file has no rows: " + path);
    if (!data.labels.empty() && data.labels.size() != data.points.size()) {
        throw IoError("data file mixes labelled and unlabelled rows: " + path);
    }
    return data;
}

void write_params_file(const std::string& path, const MixtureParams& theta) {
    auto out = open_out(path);
    out << "k = " << theta.k() << '\n';
    out << "weights = ";
    for (int k = 0; k < theta.k(); ++k) {
        out << (k ? "," : "") << format_real(theta.weights(k));
    }
    out << '\n';
    for (int k = 0; k < theta.k(); ++k) {
        const auto& comp = theta.components[static_cast<std::size_t>(k)];
        out << "mean." << (k + 1) << " = ";
        for (Eigen::Index i = 0; i < comp.mean.size(); ++i) {
            out << (i ? "," : "") << format_real(comp.mean(i));
        }
        out << '\n';
        out << "cov." << (k + 1) << " = ";
        bool first = true;
        for (Eigen::Index r = 0; r < comp.cov.rows(); ++r) {
            for (Eigen::Index c = 0; c < comp.cov.cols(); ++c) {
                out << (first ? "" : ",") << format_real(comp.cov(r, c));
                first = false;
            }
        }
        out << '\n';
    }
}

MixtureParams read_params_file(const std::string& path) {
    const Config config = Config::load_file(path);
    const int k = config.get_int("k", 0);
    if (k < 1) throw InvalidArgument(path + ": k must be >= 1");
    const auto weights = config.get_doubles("weights");
    if (static_cast<int>(weights.size()) != k) {
        throw InvalidArgument(path + ": weights length does not match k");
    }
    MixtureParams theta;
    theta.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(), k);
    for (int i = 1; i <= k; ++i) {
        const auto mean = config.get_doubles("mean." + std::to_string(i));
        if (mean.empty()) {
            throw InvalidArgument(path + ": missing mean." + std::to_string(i));
        }
        const auto dim = static_cast<Eigen::Index>(mean.size());
        const auto cov = config.get_doubles("cov." + std::to_string(i));
        if (static_cast<Eigen::Index>(cov.size()) != dim * dim) {
            throw InvalidArgument(path + ": cov." + std::to_string(i) +
                                  " must hold " + std::to_string(dim * dim) +
                                  " row-major entries");
        }
        GaussianParams comp;
        comp.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), dim);
        comp.cov = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                  Eigen::Dynamic,
                                                  Eigen::RowMajor>>(
            cov.data(), dim, dim);
        theta.components.push_back(std::move(comp));
    }
    theta.validate();
    return theta;
}

void write_em_trace_csv(const std::string& path, const EmTrace& trace) {
    auto out = open_out(path);
    const MixtureParams& first = trace.passes.front().theta;
    const int k = first.k();
    const int dim = first.dim();
    out << "pass,loglik";
    for (int j = 1; j <= k; ++j) {
        out << ",pi" << j;
        for (int i = 1; i <= dim; ++i) out << ",mu" << j << "_" << i;
        for (int r = 1; r <= dim; ++r) {
            for (int c = 1; c <= dim; ++c) out << ",P" << j << "_" << r << c;
        }
    }
    out << '\n';
    for (const auto& pass : trace.passes) {
        out << pass.pass << ',' << format_real(pass.loglik);
        for (int j = 0; j < k; ++j) {
            const auto& comp = pass.theta.components[static_cast<std::size_t>(j)];
            out << ',' << format_real(pass.theta.weights(j));
            for (Eigen::Index i = 0; i < comp.mean.size(); ++i) {
                out << ',' << format_real(comp.mean(i));
            }
            for (Eigen::Index r = 0; r < comp.cov.rows(); ++r) {
                for (Eigen::Index c = 0; c < comp.cov.cols(); ++c) {
                    out << ',' << format_real(comp.cov(r, c));
                }
            }
        }
        out << '\n';
    }
}

void write_em_report(const std::string& path, const EmTrace& trace) {
    auto out = open_out(path);
    const MixtureParams& theta = trace.final_params();
    const auto order = canonical_order(theta);

    out << "passes: " << trace.passes_run() << '\n';
    out << "stop_reason: "
        << (trace.stop_reason == StopReason::Converged ? "Converged"
                                                       : "MaxPasses")
        << '\n';
    out << "final_loglik: " << format_real(trace.final_loglik()) << '\n';
    out << '\n';

    out << "[pi_1,...,pi_K]   ";
    for (std::size_t i = 0; i < order.size(); ++i) {
        out << (i ? " " : "")
            << format_real(theta.weights(order[i]));
    }
    out << '\n';

    out << "mu_1,...,mu_K     ";
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& mean =
            theta.components[static_cast<std::size_t>(order[i])].mean;
        out << (i ? " " : "") << '[';
        for (Eigen::Index j = 0; j < mean.size(); ++j) {
            out << (j ? " " : "") << format_real(mean(j));
        }
        out << ']';
    }
    out << '\n';

    out << "P_1,...,P_K       ";
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& cov =
            theta.components[static_cast<std::size_t>(order[i])].cov;
        out << (i ? " " : "") << '[';
        for (Eigen::Index r = 0; r < cov.rows(); ++r) {
            out << (r ? "; " : "");
            for (Eigen::Index c = 0; c < cov.cols(); ++c) {
                out << (c ? " " : "") << format_real(cov(r, c));
            }
        }
        out << ']';
    }
    out << '\n';
}

void write_scalar_trace_csv(const std::string& path,
                            const std::string& index_name,
                            const std::string& value_name,
                            const std::vector<double>& values) {
    auto out = open_out(path);
    out << index_name << ',' << value_name << '\n';
    for (std::size_t i = 0; i < values.size(); ++i) {
        out << (i + 1) << ',' << format_real(values[i]) << '\n';
    }
}

} // namespace mixlab::cli
