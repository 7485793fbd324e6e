#pragma once

#include <string>
#include <vector>

#include "mixlab/mixture.hpp"

namespace mixlab::cli {

/// Data cloud plus one 1-sigma ellipse per component per pass. The data
/// bounding box maps to an 800x600 viewport with a 5% margin; ellipse
/// stroke opacity increases with pass so the converged shapes dominate.
/// Components cycle through black, blue, red, magenta, cyan.
void write_em_svg(const std::string& path,
                  const std::vector<Eigen::VectorXd>& points,
                  const std::vector<int>& labels, const EmTrace& trace);

} // namespace mixlab::cli
