#pragma once

// Test-only oracles. Everything here evaluates the textbook formulas along
// an independent route (explicit inverses/determinants, linear-space
// products, quadrature) so library results can be checked against them.

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mixlab/mixture.hpp"

namespace oracle {

inline constexpr double kLog2Pi = 1.8378770664093454836;

/// Gaussian density via explicit inverse and determinant (linear space).
inline double gauss_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                        const Eigen::MatrixXd& cov) {
    const Eigen::Index n = x.size();
    const Eigen::VectorXd centered = x - mean;
    const double quad = centered.dot(cov.inverse() * centered);
    return std::pow(2.0 * M_PI, -0.5 * static_cast<double>(n)) /
           std::sqrt(cov.determinant()) * std::exp(-0.5 * quad);
}

inline double gauss_log_pdf(const Eigen::VectorXd& x,
                            const Eigen::VectorXd& mean,
                            const Eigen::MatrixXd& cov) {
    const Eigen::Index n = x.size();
    const Eigen::VectorXd centered = x - mean;
    return -0.5 * (static_cast<double>(n) * kLog2Pi +
                   std::log(cov.determinant()) +
                   centered.dot(cov.inverse() * centered));
}

/// Incomplete-data log-likelihood as a direct per-point product-sum.
inline double mixture_loglik(const std::vector<Eigen::VectorXd>& data,
                             const mixlab::MixtureParams& theta) {
    double total = 0.0;
    for (const auto& x : data) {
        double point = 0.0;
        for (int k = 0; k < theta.k(); ++k) {
            point += theta.weights(k) *
                     gauss_pdf(x, theta.components[(std::size_t)k].mean,
                               theta.components[(std::size_t)k].cov);
        }
        total += std::log(point);
    }
    return total;
}

/// Posterior weight w_nk by direct numerator/denominator evaluation.
inline Eigen::MatrixXd responsibilities(
    const std::vector<Eigen::VectorXd>& data,
    const mixlab::MixtureParams& theta) {
    Eigen::MatrixXd w(static_cast<Eigen::Index>(data.size()), theta.k());
    for (std::size_t i = 0; i < data.size(); ++i) {
        double denom = 0.0;
        for (int k = 0; k < theta.k(); ++k) {
            const double term =
                theta.weights(k) *
                gauss_pdf(data[i], theta.components[(std::size_t)k].mean,
                          theta.components[(std::size_t)k].cov);
            w(static_cast<Eigen::Index>(i), k) = term;
            denom += term;
        }
        w.row(static_cast<Eigen::Index>(i)) /= denom;
    }
    return w;
}

/// Baum's auxiliary function as a literal double sum.
inline double baum_q(const std::vector<Eigen::VectorXd>& data,
                     const mixlab::MixtureParams& theta,
                     const Eigen::MatrixXd& w) {
    double total = 0.0;
    for (std::size_t n = 0; n < data.size(); ++n) {
        for (int k = 0; k < theta.k(); ++k) {
            const double weight = w(static_cast<Eigen::Index>(n), k);
            if (weight == 0.0) continue;
            total += weight *
                     (std::log(theta.weights(k)) +
                      gauss_log_pdf(data[n],
                                    theta.components[(std::size_t)k].mean,
                                    theta.components[(std::size_t)k].cov));
        }
    }
    return total;
}

/// Adaptive Simpson quadrature on [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double tol = 1e-12,
                               int depth = 28) {
    struct Impl {
        const std::function<double(double)>& f;
        double run(double a, double m, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
                return left + right + (left + right - whole) / 15.0;
            }
            return run(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
                   run(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    } impl{f};
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return impl.run(a, m, b, fa, fm, fb, whole, tol, depth);
}

/// Plain midpoint-grid quadrature over a rectangle.
inline double grid_quadrature_2d(
    const std::function<double(double, double)>& f, double x0, double x1,
    double y0, double y1, int cells_per_axis) {
    const double hx = (x1 - x0) / cells_per_axis;
    const double hy = (y1 - y0) / cells_per_axis;
    long double total = 0.0L;
    for (int i = 0; i < cells_per_axis; ++i) {
        const double x = x0 + (i + 0.5) * hx;
        for (int j = 0; j < cells_per_axis; ++j) {
            total += f(x, y0 + (j + 0.5) * hy);
        }
    }
    return static_cast<double>(total) * hx * hy;
}

/// 20-point probabilists' Gauss-Hermite rule: E_{N(0,1)}[f] = sum w_i f(x_i).
/// Nodes/weights frozen from an independent high-precision computation;
/// exact for polynomials of degree <= 39.
inline const std::vector<double>& gh20_nodes() {
    static const std::vector<double> nodes = {
        -7.6190485416797582,  -6.5105901570136542,  -5.5787388058932015,
        -4.7345813340460552,  -3.9439673506573163,  -3.1890148165533896,
        -2.4586636111723679,  -1.7452473208141268,  -1.0429453488027509,
        -0.34696415708135592, 0.34696415708135592,  1.0429453488027509,
        1.7452473208141268,   2.4586636111723679,   3.1890148165533896,
        3.9439673506573163,   4.7345813340460552,   5.5787388058932015,
        6.5105901570136542,   7.6190485416797582};
    return nodes;
}
inline const std::vector<double>& gh20_weights() {
    static const std::vector<double> weights = {
        1.2578006724379264e-13, 2.4820623623151797e-10,
        6.127490259982928e-08,  4.4021210902308646e-06,
        0.00012882627996192942, 0.0018301031310804924,
        0.013997837447100996,   0.061506372063976959,
        0.16173933398400003,    0.26079306344955477,
        0.26079306344955477,    0.16173933398400003,
        0.061506372063976959,   0.013997837447100996,
        0.0018301031310804924,  0.00012882627996192942,
        4.4021210902308646e-06, 6.127490259982928e-08,
        2.4820623623151797e-10, 1.2578006724379264e-13};
    return weights;
}

/// E_{Z ~ N(mean, cov)}[f(Z)] for 2-D Gaussians by tensorized Gauss-Hermite
/// through the Cholesky transform of `cov` (machine precision for
/// polynomial f up to degree 39).
inline double gauss_hermite_expectation_2d(
    const std::function<double(const Eigen::Vector2d&)>& f,
    const Eigen::Vector2d& mean, const Eigen::Matrix2d& cov) {
    const Eigen::Matrix2d l = Eigen::LLT<Eigen::Matrix2d>(cov).matrixL();
    const auto& nodes = gh20_nodes();
    const auto& weights = gh20_weights();
    long double total = 0.0L;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const Eigen::Vector2d z =
                mean + l * Eigen::Vector2d(nodes[i], nodes[j]);
            total += weights[i] * weights[j] * f(z);
        }
    }
    return static_cast<double>(total);
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Minimal XML well-formedness check: single root, balanced matching tags,
/// quoted attributes. Returns an empty string when well-formed, otherwise a
/// short diagnosis.
std::string check_xml(const std::string& text);

/// Number of `<tag ...>` or `<tag .../>` occurrences.
inline int count_elements(const std::string& text, const std::string& tag) {
    int count = 0;
    std::string::size_type pos = 0;
    const std::string open = "<" + tag;
    while ((pos = text.find(open, pos)) != std::string::npos) {
        const char next = pos + open.size() < text.size()
                              ? text[pos + open.size()]
                              : '\0';
        if (next == ' ' || next == '>' || next == '/') ++count;
        pos += open.size();
    }
    return count;
}

} // namespace oracle
