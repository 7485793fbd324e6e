#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mixlab/errors.hpp"
#include "mixlab/mixture.hpp"
#include "oracle_utils.hpp"

using namespace mixlab;

namespace {

MixtureParams reference_truth() {
    MixtureParams theta;
    theta.weights = Eigen::Vector3d(0.25, 0.40, 0.35);
    const double means[3][2] = {{0, 2}, {3, 1}, {6, 3}};
    for (const auto& m : means) {
        theta.components.push_back(GaussianParams{
            Eigen::Vector2d(m[0], m[1]),
            0.5 * Eigen::Matrix2d::Identity()});
    }
    return theta;
}

MixtureParams random_mixture(int k, int dim, RandomStream& stream) {
    MixtureParams theta;
    theta.weights.resize(k);
    for (int i = 0; i < k; ++i) theta.weights(i) = 0.2 + stream.next_double();
    theta.weights /= theta.weights.sum();
    for (int i = 0; i < k; ++i) {
        Eigen::VectorXd mean(dim);
        for (int d = 0; d < dim; ++d) mean(d) = 6.0 * stream.next_double() - 3.0;
        Eigen::MatrixXd a(dim, dim);
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) a(r, c) = stream.next_double() - 0.5;
        }
        Eigen::MatrixXd cov =
            a * a.transpose() + 0.4 * Eigen::MatrixXd::Identity(dim, dim);
        theta.components.push_back(GaussianParams{std::move(mean), std::move(cov)});
    }
    return theta;
}

std::vector<Eigen::VectorXd> random_points(int n, int dim,
                                           RandomStream& stream) {
    std::vector<Eigen::VectorXd> points;
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd x(dim);
        for (int d = 0; d < dim; ++d) x(d) = 8.0 * stream.next_double() - 4.0;
        points.push_back(std::move(x));
    }
    return points;
}

} // namespace

TEST_CASE("K=1 log-likelihood degenerates to a plain Gaussian sum") {
    RandomStream stream(Seed{31});
    MixtureParams theta = random_mixture(1, 2, stream);
    theta.weights(0) = 1.0;
    const auto data = random_points(6, 2, stream);
    double direct = 0.0;
    for (const auto& x : data) direct += log_density(x, theta.components[0]);
    CHECK(mixture_log_likelihood(data, theta) ==
          doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("identical components collapse: log(pi1 f + pi2 f) = log f") {
    RandomStream stream(Seed{32});
    MixtureParams one = random_mixture(1, 2, stream);
    one.weights(0) = 1.0;
    MixtureParams two;
    two.weights = Eigen::Vector2d(0.5, 0.5);
    two.components = {one.components[0], one.components[0]};
    const auto data = random_points(5, 2, stream);
    CHECK(mixture_log_likelihood(data, two) ==
          doctest::Approx(mixture_log_likelihood(data, one)).epsilon(1e-12));
}

TEST_CASE("log-likelihood matches the brute-force oracle") {
    RandomStream stream(Seed{33});
    for (int round = 0; round < 20; ++round) {
        const MixtureParams theta = random_mixture(3, 2, stream);
        const auto data = random_points(4, 2, stream);
        const double expected = oracle::mixture_loglik(data, theta);
        CHECK(mixture_log_likelihood(data, theta) ==
              doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("responsibilities: single component gives exact ones") {
    RandomStream stream(Seed{34});
    MixtureParams theta = random_mixture(1, 2, stream);
    theta.weights(0) = 1.0;
    const auto data = random_points(7, 2, stream);
    const auto resp = responsibilities(data, theta);
    for (Eigen::Index i = 0; i < resp.w.rows(); ++i) {
        CHECK(resp.w(i, 0) == 1.0);
    }
}

TEST_CASE("responsibilities: mirror-symmetric components split 50/50") {
    MixtureParams theta;
    theta.weights = Eigen::Vector2d(0.5, 0.5);
    theta.components = {
        GaussianParams{Eigen::Vector2d(-1.0, 0.0), Eigen::Matrix2d::Identity()},
        GaussianParams{Eigen::Vector2d(1.0, 0.0), Eigen::Matrix2d::Identity()}};
    const std::vector<Eigen::VectorXd> data = {Eigen::Vector2d(0.0, 0.7)};
    const auto resp = responsibilities(data, theta);
    CHECK(resp.w(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(resp.w(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("responsibilities match the direct weight-formula oracle") {
    RandomStream stream(Seed{35});
    const MixtureParams theta = random_mixture(2, 2, stream);
    const auto data = random_points(3, 2, stream);
    const Eigen::MatrixXd expected = oracle::responsibilities(data, theta);
    const auto resp = responsibilities(data, theta);
    for (Eigen::Index i = 0; i < expected.rows(); ++i) {
        for (Eigen::Index k = 0; k < expected.cols(); ++k) {
            CHECK(std::abs(resp.w(i, k) - expected(i, k)) < 1e-10);
        }
    }
}

TEST_CASE("responsibility rows sum to one") {
    RandomStream stream(Seed{36});
    for (int round = 0; round < 10; ++round) {
        const MixtureParams theta = random_mixture(1 + round % 4, 2, stream);
        const auto data = random_points(9, 2, stream);
        const auto resp = responsibilities(data, theta);
        for (Eigen::Index i = 0; i < resp.w.rows(); ++i) {
            CHECK(std::abs(resp.w.row(i).sum() - 1.0) < 1e-10);
            CHECK(resp.w.row(i).minCoeff() >= 0.0);
            CHECK(resp.w.row(i).maxCoeff() <= 1.0);
        }
    }
}

TEST_CASE("baum_q equals the log-likelihood for K=1") {
    RandomStream stream(Seed{37});
    MixtureParams theta = random_mixture(1, 2, stream);
    theta.weights(0) = 1.0;
    const auto data = random_points(6, 2, stream);
    const auto resp = responsibilities(data, theta);
    CHECK(baum_q(data, theta, resp) ==
          doctest::Approx(mixture_log_likelihood(data, theta)).epsilon(1e-12));
}

TEST_CASE("baum_q matches the double-sum oracle") {
    RandomStream stream(Seed{38});
    const MixtureParams theta0 = random_mixture(2, 2, stream);
    const MixtureParams theta1 = random_mixture(2, 2, stream);
    const auto data = random_points(3, 2, stream);
    const auto resp = responsibilities(data, theta0);
    const double expected = oracle::baum_q(data, theta1, resp.w);
    CHECK(baum_q(data, theta1, resp) ==
          doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("baum_q treats zero responsibilities as exact zeros") {
    MixtureParams theta;
    theta.weights = Eigen::Vector2d(1.0, 0.0); // log pi_2 = -inf
    theta.components = {
        GaussianParams{Eigen::Vector2d(0.0, 0.0), Eigen::Matrix2d::Identity()},
        GaussianParams{Eigen::Vector2d(1.0, 1.0), Eigen::Matrix2d::Identity()}};
    const std::vector<Eigen::VectorXd> data = {Eigen::Vector2d(0.2, -0.1)};
    Responsibilities resp{Eigen::MatrixXd(1, 2)};
    resp.w << 1.0, 0.0;
    CHECK(std::isfinite(baum_q(data, theta, resp)));
}

TEST_CASE("the M-step maximizes baum_q over parameters") {
    RandomStream stream(Seed{39});
    for (int round = 0; round < 5; ++round) {
        const MixtureParams theta0 = random_mixture(2, 2, stream);
        const auto data = random_points(40, 2, stream);
        const auto resp = responsibilities(data, theta0);
        const MixtureParams theta1 = m_step(data, resp);
        CHECK(baum_q(data, theta1, resp) >= baum_q(data, theta0, resp) - 1e-9);
    }
}

TEST_CASE("one-hot responsibilities reduce the M-step to cluster stats") {
    std::vector<Eigen::VectorXd> data = {
        Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(2.0, 0.0),
        Eigen::Vector2d(10.0, 4.0), Eigen::Vector2d(12.0, 6.0)};
    Responsibilities resp{Eigen::MatrixXd(4, 2)};
    resp.w << 1, 0, 1, 0, 0, 1, 0, 1;
    const MixtureParams theta = m_step(data, resp);
    CHECK(theta.weights(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(theta.weights(1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(theta.components[0].mean(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(theta.components[0].mean(1) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(theta.components[1].mean(0) == doctest::Approx(11.0).epsilon(1e-14));
    CHECK(theta.components[1].mean(1) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("uniform responsibilities give global stats plus regularization") {
    RandomStream stream(Seed{40});
    const auto data = random_points(25, 2, stream);
    const int n = static_cast<int>(data.size());
    Responsibilities resp{Eigen::MatrixXd::Constant(n, 3, 1.0 / 3.0)};
    const MixtureParams theta = m_step(data, resp);

    // independent global stats
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& x : data) mean += x;
    mean /= n;
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& x : data) {
        const Eigen::Vector2d c = x - mean;
        cov += c * c.transpose();
    }
    cov /= n;
    const double lambda_reg = 1e-6 * cov.trace() / 2.0;

    for (int k = 0; k < 3; ++k) {
        CHECK((theta.components[(std::size_t)k].mean - mean).norm() < 1e-12);
        const Eigen::Matrix2d expected =
            cov + lambda_reg * Eigen::Matrix2d::Identity();
        CHECK((theta.components[(std::size_t)k].cov - expected)
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
}

TEST_CASE("M-step weights sum to one") {
    RandomStream stream(Seed{41});
    const MixtureParams theta0 = random_mixture(3, 2, stream);
    const auto data = random_points(30, 2, stream);
    const auto resp = responsibilities(data, theta0);
    const MixtureParams theta = m_step(data, resp);
    CHECK(std::abs(theta.weights.sum() - 1.0) < 1e-12);
}

TEST_CASE("an empty responsibility column raises EmptyComponent") {
    std::vector<Eigen::VectorXd> data = {Eigen::Vector2d(0.0, 0.0),
                                         Eigen::Vector2d(1.0, 1.0)};
    Responsibilities resp{Eigen::MatrixXd(2, 2)};
    resp.w << 1, 0, 1, 0;
    CHECK_THROWS_AS((void)m_step(data, resp), EmptyComponent);
}

TEST_CASE("permuting components permutes responsibilities and M-step output") {
    RandomStream stream(Seed{42});
    const MixtureParams theta = random_mixture(3, 2, stream);
    const auto data = random_points(12, 2, stream);

    MixtureParams permuted;
    const int perm[3] = {2, 0, 1};
    permuted.weights.resize(3);
    for (int k = 0; k < 3; ++k) {
        permuted.weights(k) = theta.weights(perm[k]);
        permuted.components.push_back(theta.components[(std::size_t)perm[k]]);
    }

    // label symmetry holds to rounding; the log-sum-exp denominator sums in
    // component order, so bitwise equality is not expected
    const auto resp = responsibilities(data, theta);
    const auto resp_perm = responsibilities(data, permuted);
    for (int k = 0; k < 3; ++k) {
        CHECK((resp_perm.w.col(k) - resp.w.col(perm[k])).cwiseAbs().maxCoeff() <
              1e-13);
    }
    const MixtureParams m = m_step(data, resp);
    const MixtureParams m_perm = m_step(data, resp_perm);
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(m_perm.weights(k) - m.weights(perm[k])) < 1e-13);
        CHECK((m_perm.components[(std::size_t)k].mean -
               m.components[(std::size_t)perm[k]].mean)
                  .norm() < 1e-12);
        CHECK((m_perm.components[(std::size_t)k].cov -
               m.components[(std::size_t)perm[k]].cov)
                  .norm() < 1e-12);
    }
}

TEST_CASE("init_grid with one component sits at the box centre") {
    std::vector<Eigen::VectorXd> data = {Eigen::Vector2d(0.0, 0.0),
                                         Eigen::Vector2d(4.0, 2.0)};
    const MixtureParams theta = init_grid(data, 1, Seed{1});
    CHECK(theta.weights(0) == 1.0);
    CHECK(theta.components[0].mean(0) == doctest::Approx(2.0));
    CHECK(theta.components[0].mean(1) == doctest::Approx(1.0));
    CHECK(theta.components[0].cov(0, 0) ==
          doctest::Approx((4.0 / 6.0) * (4.0 / 6.0)));
    CHECK(theta.components[0].cov(1, 1) ==
          doctest::Approx((2.0 / 6.0) * (2.0 / 6.0)));
}

TEST_CASE("init_grid K=3 picks three distinct centres of the 2x2 grid") {
    std::vector<Eigen::VectorXd> data = {Eigen::Vector2d(0.0, 0.0),
                                         Eigen::Vector2d(8.0, 4.0)};
    // the four cell centres of the 2x2 grid over [0,8]x[0,4]
    const Eigen::Vector2d centres[4] = {
        Eigen::Vector2d(2.0, 1.0), Eigen::Vector2d(6.0, 1.0),
        Eigen::Vector2d(2.0, 3.0), Eigen::Vector2d(6.0, 3.0)};
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const MixtureParams theta = init_grid(data, 3, Seed{seed});
        REQUIRE(theta.k() == 3);
        std::vector<int> hits;
        for (const auto& comp : theta.components) {
            CHECK(comp.cov(0, 0) == doctest::Approx((8.0 / 6.0) * (8.0 / 6.0)));
            CHECK(comp.cov(1, 1) == doctest::Approx((4.0 / 6.0) * (4.0 / 6.0)));
            for (int c = 0; c < 4; ++c) {
                if ((comp.mean - centres[c]).norm() < 1e-12) hits.push_back(c);
            }
        }
        REQUIRE(hits.size() == 3); // every mean is a cell centre
        CHECK(hits[0] != hits[1]);
        CHECK(hits[0] != hits[2]);
        CHECK(hits[1] != hits[2]); // chosen without replacement
    }
}

TEST_CASE("init_grid is deterministic and rejects a flat box") {
    std::vector<Eigen::VectorXd> data = {Eigen::Vector2d(0.0, 0.0),
                                         Eigen::Vector2d(5.0, 3.0),
                                         Eigen::Vector2d(1.0, 2.0)};
    const MixtureParams a = init_grid(data, 4, Seed{99});
    const MixtureParams b = init_grid(data, 4, Seed{99});
    for (int k = 0; k < 4; ++k) {
        CHECK(a.components[(std::size_t)k].mean ==
              b.components[(std::size_t)k].mean);
    }
    std::vector<Eigen::VectorXd> flat = {Eigen::Vector2d(0.0, 1.0),
                                         Eigen::Vector2d(5.0, 1.0)};
    CHECK_THROWS_AS((void)init_grid(flat, 2, Seed{1}), DegenerateData);
}

TEST_CASE("K=1 EM converges immediately to sample statistics") {
    RandomStream stream(Seed{43});
    GaussianParams tight{Eigen::Vector2d(1.0, -2.0),
                         0.01 * Eigen::Matrix2d::Identity()};
    const auto draws = sample_gaussian(tight, 200, Seed{5});
    const MixtureParams init = init_grid(draws, 1, Seed{5});
    const EmTrace trace = fit_em(draws, StoppingRule{}, init);
    CHECK(trace.passes_run() <= 2);
    CHECK(trace.stop_reason == StopReason::Converged);

    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& d : draws) mean += d;
    mean /= static_cast<double>(draws.size());
    CHECK((trace.final_params().components[0].mean - mean).norm() < 1e-9);
}

TEST_CASE("EM log-likelihood trace is monotone on random problems") {
    RandomStream stream(Seed{44});
    for (int round = 0; round < 20; ++round) {
        const MixtureParams generator = random_mixture(2, 2, stream);
        const GmmSample sample =
            generate_gmm_data(generator, 60, Seed{1000 + (std::uint64_t)round});
        const MixtureParams init =
            init_grid(sample.points, 2, Seed{2000 + (std::uint64_t)round});
        const EmTrace trace = fit_em(sample.points, StoppingRule{30, 1e-4}, init);
        for (std::size_t p = 1; p < trace.passes.size(); ++p) {
            CHECK(trace.passes[p].loglik >= trace.passes[p - 1].loglik - 1e-9);
        }
    }
}

TEST_CASE("a converged fit is a fixed point of one more pass") {
    const MixtureParams truth = reference_truth();
    const GmmSample sample = generate_gmm_data(truth, 2000, Seed{77});
    const StoppingRule stop{}; // default 50 passes / 1e-3
    const MixtureParams init = init_grid(sample.points, 3, Seed{78});
    const EmTrace trace = fit_em(sample.points, stop, init);
    REQUIRE(trace.stop_reason == StopReason::Converged);

    const MixtureParams& converged = trace.final_params();
    const auto resp = responsibilities(sample.points, converged);
    const MixtureParams next = m_step(sample.points, resp);
    CHECK((next.weights - converged.weights).norm() < 10 * stop.loglik_tol);
    for (int k = 0; k < 3; ++k) {
        CHECK((next.components[(std::size_t)k].mean -
               converged.components[(std::size_t)k].mean)
                  .norm() < 10 * stop.loglik_tol);
        CHECK((next.components[(std::size_t)k].cov -
               converged.components[(std::size_t)k].cov)
                  .norm() < 10 * stop.loglik_tol);
    }
}

TEST_CASE("generate_gmm_data: degenerate weights pin every label") {
    MixtureParams theta = reference_truth();
    theta.weights = Eigen::Vector3d(1.0, 0.0, 0.0);
    const GmmSample sample = generate_gmm_data(theta, 200, Seed{3});
    for (int label : sample.labels) CHECK(label == 0);
}

TEST_CASE("generate_gmm_data matches the generator moments") {
    const MixtureParams truth = reference_truth();
    const GmmSample sample = generate_gmm_data(truth, 5000, Seed{12});
    REQUIRE(sample.points.size() == 5000);

    Eigen::Vector3d fractions = Eigen::Vector3d::Zero();
    std::vector<Eigen::Vector2d> sums(3, Eigen::Vector2d::Zero());
    for (std::size_t i = 0; i < sample.points.size(); ++i) {
        fractions(sample.labels[i]) += 1.0;
        sums[(std::size_t)sample.labels[i]] += sample.points[i];
    }
    for (int k = 0; k < 3; ++k) {
        const Eigen::Vector2d mean = sums[(std::size_t)k] / fractions(k);
        CHECK(std::abs(fractions(k) / 5000.0 - truth.weights(k)) < 0.02);
        CHECK(std::abs(mean(0) - truth.components[(std::size_t)k].mean(0)) <
              0.06);
        CHECK(std::abs(mean(1) - truth.components[(std::size_t)k].mean(1)) <
              0.06);
    }
}

TEST_CASE("generate_gmm_data is deterministic per seed") {
    const MixtureParams truth = reference_truth();
    const GmmSample a = generate_gmm_data(truth, 50, Seed{9});
    const GmmSample b = generate_gmm_data(truth, 50, Seed{9});
    CHECK(a.labels == b.labels);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i] == b.points[i]);
    }
}

TEST_CASE("fit_em reports the failing pass when a component empties") {
    // one init component sits absurdly far away with a tiny covariance: its
    // responsibilities underflow to zero on the first pass
    RandomStream stream(Seed{45});
    std::vector<Eigen::VectorXd> data;
    for (int i = 0; i < 40; ++i) {
        data.push_back(Eigen::Vector2d(stream.next_normal(),
                                       stream.next_normal()));
    }
    MixtureParams init;
    init.weights = Eigen::Vector2d(0.5, 0.5);
    init.components = {
        GaussianParams{Eigen::Vector2d(0.0, 0.0), Eigen::Matrix2d::Identity()},
        GaussianParams{Eigen::Vector2d(1e6, 1e6),
                       1e-4 * Eigen::Matrix2d::Identity()}};
    try {
        (void)fit_em(data, StoppingRule{}, init);
        FAIL("expected EmptyComponent");
    } catch (const EmptyComponent& e) {
        CHECK(std::string(e.what()).find("pass 1") != std::string::npos);
    }
}

TEST_CASE("map_labels takes the argmax and breaks ties downward") {
    Responsibilities resp{Eigen::MatrixXd(3, 3)};
    resp.w << 0.2, 0.5, 0.3, //
        0.4, 0.4, 0.2,       //
        1.0 / 3, 1.0 / 3, 1.0 / 3;
    const std::vector<int> labels = map_labels(resp);
    CHECK(labels == std::vector<int>{1, 0, 0});
}
