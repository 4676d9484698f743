#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "cfo/errors.hpp"
#include "cfo/stencil.hpp"

namespace {

// Independent oracle: dense LU solve of the unshifted Vandermonde system.
std::vector<double> vandermonde_oracle(const std::vector<double>& x, std::size_t c, int k) {
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd P(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index j = 0; j < n; ++j) {
            P(r, j) = std::pow(x[static_cast<std::size_t>(j)] - x[c], static_cast<double>(r));
        }
    }
    rhs(k) = std::tgamma(k + 1.0);
    const Eigen::VectorXd w = P.fullPivLu().solve(rhs);
    return {w.data(), w.data() + n};
}

void expect_weights(const cfo::StencilWeights& s, const std::vector<double>& w, double tol) {
    ASSERT_EQ(s.weights.size(), w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        EXPECT_NEAR(s.weights[j], w[j], tol * std::max(1.0, std::abs(w[j]))) << "weight " << j;
    }
}

} // namespace

TEST(FdWeights, ForwardFirstDerivative) {
    const double x0 = 0.3, h = 0.01;
    const std::vector<double> nodes{x0, x0 + h, x0 + 2 * h};
    const auto s = cfo::fd_weights(nodes, 0, 1);
    expect_weights(s, {-3.0 / (2 * h), 2.0 / h, -1.0 / (2 * h)}, 1e-10);
    expect_weights(s, vandermonde_oracle(nodes, 0, 1), 1e-10);
}

TEST(FdWeights, CentralZerothAndSecond) {
    const double x0 = -1.2, h = 0.05;
    const std::vector<double> nodes{x0 - h, x0, x0 + h};
    expect_weights(cfo::fd_weights(nodes, 1, 0), {0.0, 1.0, 0.0}, 1e-12);
    expect_weights(cfo::fd_weights(nodes, 1, 2), {1 / (h * h), -2 / (h * h), 1 / (h * h)}, 1e-10);
}

TEST(FdWeights, ExactOnMonomialsForRandomNodes) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int draw = 0; draw < 50; ++draw) {
        const std::size_t m = 1 + static_cast<std::size_t>(draw % 6);
        std::vector<double> x(m + 1);
        for (auto& v : x) {
            v = u(rng);
        }
        const std::size_t c = static_cast<std::size_t>(draw) % (m + 1);
        for (int k = 0; k <= static_cast<int>(m); ++k) {
            const auto s = cfo::fd_weights(x, c, k);
            for (std::size_t r = 0; r <= m; ++r) {
                std::vector<double> f(m + 1);
                for (std::size_t j = 0; j <= m; ++j) {
                    f[j] = std::pow(x[j] - x[c], static_cast<double>(r));
                }
                const double expect = (static_cast<int>(r) == k) ? std::tgamma(k + 1.0) : 0.0;
                double scale = 0.0;
                for (std::size_t j = 0; j <= m; ++j) {
                    scale += std::abs(s.weights[j] * f[j]);
                }
                EXPECT_NEAR(s.apply(f), expect, 1e-9 * std::max(1.0, scale))
                    << "m=" << m << " k=" << k << " r=" << r;
            }
        }
    }
}

TEST(FdWeights, Errors) {
    const std::vector<double> dup{0.0, 0.1, 0.1};
    EXPECT_THROW((void)cfo::fd_weights(dup, 0, 1), cfo::SingularSystem);
    const std::vector<double> two{0.0, 0.1};
    EXPECT_THROW((void)cfo::fd_weights(two, 0, 2), cfo::InvalidArgument);
    EXPECT_THROW((void)cfo::fd_weights(two, 2, 1), cfo::InvalidArgument);
}

TEST(ThreePoint, FirstDerivativeUniformCollapse) {
    const double h = 0.2;
    expect_weights(cfo::first_derivative_3pt(h, h), {-1 / (2 * h), 0.0, 1 / (2 * h)}, 1e-14);
}

TEST(ThreePoint, FirstDerivativeIrregularExample) {
    expect_weights(cfo::first_derivative_3pt(0.1, 0.2), {-0.2 / (0.1 * 0.3), 0.1 / 0.02, 0.1 / (0.2 * 0.3)},
                   1e-12);
    const auto s = cfo::first_derivative_3pt(0.1, 0.2);
    EXPECT_NEAR(s.weights[0], -6.6667, 1e-4);
    EXPECT_NEAR(s.weights[1], 5.0, 1e-12);
    EXPECT_NEAR(s.weights[2], 1.6667, 1e-4);
}

TEST(ThreePoint, SecondDerivativeExamples) {
    const double h = 0.3;
    expect_weights(cfo::second_derivative_3pt(h, h), {1 / (h * h), -2 / (h * h), 1 / (h * h)}, 1e-12);
    const auto s = cfo::second_derivative_3pt(0.1, 0.2);
    // 2/(hp+hn) * (1/hp, -(1/hp+1/hn), 1/hn): the shorter side gets the larger weight.
    EXPECT_NEAR(s.weights[0], 66.666666666667, 1e-9);
    EXPECT_NEAR(s.weights[1], -100.0, 1e-9);
    EXPECT_NEAR(s.weights[2], 33.333333333333, 1e-9);
}

TEST(ThreePoint, SecondDerivativeExactOnQuadratics) {
    for (auto [hp, hn] : {std::pair{0.1, 0.2}, std::pair{0.7, 0.03}, std::pair{1.0, 1.0}}) {
        const double t = 0.4;
        const std::vector<double> f{(t - hp) * (t - hp), t * t, (t + hn) * (t + hn)};
        EXPECT_NEAR(cfo::second_derivative_3pt(hp, hn).apply(f), 2.0, 1e-10);
        EXPECT_NEAR(cfo::first_derivative_3pt(hp, hn).apply(f), 2 * t, 1e-12);
    }
}

TEST(ThreePoint, AgreesWithGeneralWeights) {
    for (auto [hp, hn] : {std::pair{0.1, 0.2}, std::pair{0.013, 0.5}}) {
        const std::vector<double> nodes{-hp, 0.0, hn};
        expect_weights(cfo::first_derivative_3pt(hp, hn), cfo::fd_weights(nodes, 1, 1).weights, 1e-12);
        expect_weights(cfo::second_derivative_3pt(hp, hn), cfo::fd_weights(nodes, 1, 2).weights, 1e-12);
    }
}

TEST(ThreePoint, RejectsNonPositiveSteps) {
    EXPECT_THROW((void)cfo::first_derivative_3pt(0.0, 0.1), cfo::InvalidArgument);
    EXPECT_THROW((void)cfo::second_derivative_3pt(0.1, -0.1), cfo::InvalidArgument);
}

TEST(ThreePoint, ConvergenceOrders) {
    // f = sin, irregular ratio hn = 1.7 hp, halving both
    const double t = 0.6;
    double prev1 = 0.0, prev2 = 0.0;
    for (int level = 0; level < 4; ++level) {
        const double hp = 0.05 / std::pow(2.0, level), hn = 1.7 * hp;
        const std::vector<double> f{std::sin(t - hp), std::sin(t), std::sin(t + hn)};
        const double e1 = std::abs(cfo::first_derivative_3pt(hp, hn).apply(f) - std::cos(t));
        const double e2 = std::abs(cfo::second_derivative_3pt(hp, hn).apply(f) + std::sin(t));
        if (level > 0) {
            EXPECT_NEAR(std::log2(prev1 / e1), 2.0, 0.1);
            EXPECT_GE(std::log2(prev2 / e2), 0.9);
        }
        prev1 = e1;
        prev2 = e2;
    }
}

TEST(KnotDerivatives, ConstantGivesZero) {
    cfo::Trajectory tr{cfo::TimeGrid({0.0, 0.1, 0.45, 0.5, 1.0}), Eigen::MatrixXd::Constant(2, 5, 3.5)};
    const auto kd = cfo::estimate_knot_derivatives(tr);
    EXPECT_LT(kd.d.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(kd.a.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(KnotDerivatives, QuadraticIsExact) {
    const cfo::TimeGrid g({0.0, 0.1, 0.45, 0.5, 0.8, 1.0});
    cfo::Trajectory tr{g, Eigen::MatrixXd(1, 6)};
    for (std::size_t i = 0; i < g.size(); ++i) {
        tr.states(0, static_cast<Eigen::Index>(i)) = g[i] * g[i];
    }
    const auto kd = cfo::estimate_knot_derivatives(tr);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(kd.d(0, static_cast<Eigen::Index>(i)), 2 * g[i], 1e-10) << i;
        EXPECT_NEAR(kd.a(0, static_cast<Eigen::Index>(i)), 2.0, 1e-8) << i;
    }
}

TEST(KnotDerivatives, NeedsThreeKnots) {
    cfo::Trajectory tr{cfo::TimeGrid::uniform(2), Eigen::MatrixXd::Zero(1, 2)};
    EXPECT_THROW((void)cfo::estimate_knot_derivatives(tr), cfo::InvalidArgument);
}
