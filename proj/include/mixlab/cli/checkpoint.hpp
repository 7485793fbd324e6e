#pragma once

#include <string>
#include <utility>

#include "mixlab/mlp.hpp"

namespace mixlab::cli {

/// Flat text checkpoint: one record per tensor, `name rows cols values...`
/// with 17-significant-digit reals, row-major. Encoder layers are named
/// enc.<i>.W / enc.<i>.b, decoder layers dec.<i>.W / dec.<i>.b.
void save_checkpoint(const std::string& path, const MlpParams& phi,
                     const MlpParams& theta);

std::pair<MlpParams, MlpParams> load_checkpoint(const std::string& path);

} // namespace mixlab::cli
