#pragma once

#include <iosfwd>
#include <string>

#include "mixlab/cli/config.hpp"

namespace mixlab::cli {

/// Each command reads its keys from `config` (unknown keys are rejected),
/// writes its artifacts under the `out` directory and prints a short
/// summary to `log`. All outputs are byte-deterministic in (config, seed).

/// data.csv + truth_params.txt from the configured mixture
/// (defaults: the 3-component reference experiment, N = 5000).
void cmd_gen_data(const Config& config, std::ostream& log);

/// em_report.txt, em_params.txt, em_trace.csv, em_ellipses.svg.
void cmd_fit_em(const Config& config, std::ostream& log);

/// vb_factors.txt + vb_trace.csv for the built-in quadratic model.
void cmd_fit_vb(const Config& config, std::ostream& log);

/// vae_checkpoint.txt + vae_trace.csv; prints the final bound estimate.
void cmd_train_vae(const Config& config, std::ostream& log);

/// comparison.txt: estimated vs truth parameters after component matching.
void cmd_report(const Config& config, std::ostream& log);

} // namespace mixlab::cli
