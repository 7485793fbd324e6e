#pragma once

#include <string>
#include <vector>

#include "mixlab/mixture.hpp"

namespace mixlab::cli {

/// Pairing of estimated component indices to truth component indices by
/// minimal total Euclidean distance between means (exhaustive, K <= 6).
struct ComponentMatch {
    std::vector<std::pair<int, int>> pairs; // (estimated, truth)
    std::vector<int> unmatched_estimated;
    std::vector<int> unmatched_truth;
};

ComponentMatch match_components(const MixtureParams& estimated,
                                const MixtureParams& truth);

/// Plain-text side-by-side comparison with per-entry deltas after matching.
void write_comparison_report(const std::string& path,
                             const MixtureParams& estimated,
                             const MixtureParams& truth);

} // namespace mixlab::cli
