#include "mixlab/cli/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "mixlab/errors.hpp"

namespace mixlab::cli {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kMargin = 0.05;

const char* kComponentColors[] = {"black", "blue", "red", "magenta", "cyan"};
const char* kPointColors[] = {"#8aa0b8", "#b88a8a", "#8ab88f",
                              "#b8ab8a", "#a08ab8"};

struct Mapper {
    double x_min, x_max, y_min, y_max;

    double map_x(double x) const {
        const double t = (x - x_min) / (x_max - x_min);
        return kWidth * (kMargin + (1.0 - 2.0 * kMargin) * t);
    }
    double map_y(double y) const {
        const double t = (y - y_min) / (y_max - y_min);
        return kHeight * (1.0 - kMargin - (1.0 - 2.0 * kMargin) * t);
    }
};

std::string coord(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", v);
    return buffer;
}

} // namespace

void write_em_svg(const std::string& path,
                  const std::vector<Eigen::VectorXd>& points,
                  const std::vector<int>& labels, const EmTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);

    Mapper map{points.front()(0), points.front()(0), points.front()(1),
               points.front()(1)};
    for (const auto& p : points) {
        map.x_min = std::min(map.x_min, p(0));
        map.x_max = std::max(map.x_max, p(0));
        map.y_min = std::min(map.y_min, p(1));
        map.y_max = std::max(map.y_max, p(1));
    }

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
           "height=\"600\" viewBox=\"0 0 800 600\">\n";
    out << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";

    out << "<g id=\"points\">\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const char* fill =
            labels.empty() ? kPointColors[0]
                           : kPointColors[static_cast<std::size_t>(
                                 labels[i] % 5)];
        out << "<circle cx=\"" << coord(map.map_x(points[i](0))) << "\" cy=\""
            << coord(map.map_y(points[i](1))) << "\" r=\"1.5\" fill=\"" << fill
            << "\"/>\n";
    }
    out << "</g>\n";

    const int n_passes = static_cast<int>(trace.passes.size());
    for (int p = 0; p < n_passes; ++p) {
        // earliest pass faintest, final pass fully opaque
        const double opacity =
            n_passes == 1 ? 1.0 : 0.15 + 0.85 * p / (n_passes - 1);
        char opacity_text[16];
        std::snprintf(opacity_text, sizeof(opacity_text), "%.3f", opacity);
        const MixtureParams& theta = trace.passes[static_cast<std::size_t>(p)].theta;
        for (int k = 0; k < theta.k(); ++k) {
            const auto ring = sigma_ellipse(
                theta.components[static_cast<std::size_t>(k)], 64);
            out << "<path d=\"M " << coord(map.map_x(ring[0](0))) << ' '
                << coord(map.map_y(ring[0](1)));
            for (std::size_t i = 1; i < ring.size(); ++i) {
                out << " L " << coord(map.map_x(ring[i](0))) << ' '
                    << coord(map.map_y(ring[i](1)));
            }
            out << " Z\" fill=\"none\" stroke=\""
                << kComponentColors[static_cast<std::size_t>(k % 5)]
                << "\" stroke-width=\"1.5\" stroke-opacity=\"" << opacity_text
                << "\"/>\n";
        }
    }
    out << "</svg>\n";
}

} // namespace mixlab::cli
