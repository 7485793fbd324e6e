#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mixlab/mixture.hpp"

namespace mixlab::cli {

/// 17-significant-digit decimal rendering, the lossless round-trip format
/// used by every emitted file.
std::string format_real(double value);

struct LabelledData {
    std::vector<Eigen::VectorXd> points;
    std::vector<int> labels; // empty when the file has no label column
};

/// CSV `x,y,label` with a header row, '.' decimals, LF endings.
void write_data_csv(const std::string& path, const GmmSample& sample);

/// Reads 2-column (x,y) or 3-column (x,y,label) CSV with a header row.
LabelledData read_data_csv(const std::string& path);

/// Mixture parameters as flat key = value text (k, weights, mean.<i>,
/// cov.<i> row-major), readable by read_params_file.
void write_params_file(const std::string& path, const MixtureParams& theta);
MixtureParams read_params_file(const std::string& path);

/// Per-pass CSV: pass, loglik, then flattened theta in component order.
void write_em_trace_csv(const std::string& path, const EmTrace& trace);

/// Plain-text result table (weights / means / covariances rows) plus the
/// pass count, final log-likelihood and stop reason.
void write_em_report(const std::string& path, const EmTrace& trace);

void write_scalar_trace_csv(const std::string& path,
                            const std::string& index_name,
                            const std::string& value_name,
                            const std::vector<double>& values);

} // namespace mixlab::cli
