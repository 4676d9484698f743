#include <gtest/gtest.h>

#include <cmath>

#include "cfo/errors.hpp"
#include "cfo/metrics.hpp"
#include "cfo/odeint.hpp"
#include "cfo/systems.hpp"

using cfo::Method;

namespace {

const cfo::Field decay = [](double, const Eigen::VectorXd& u) -> Eigen::VectorXd { return -u; };
const cfo::Field zero = [](double, const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return Eigen::VectorXd::Zero(u.size());
};

} // namespace

TEST(Step, DecayExamples) {
    const Eigen::VectorXd u = Eigen::VectorXd::Ones(1);
    const double h = 0.1;
    const double rk4 = 1 - h + h * h / 2 - h * h * h / 6 + h * h * h * h / 24;
    EXPECT_NEAR(cfo::step(Method::Rk4, decay, 0.0, u, h)(0), rk4, 1e-15);
    EXPECT_NEAR(rk4, 0.90483750, 5e-9);
    EXPECT_NEAR(cfo::step(Method::Euler, decay, 0.0, u, h)(0), 0.9, 1e-15);
    EXPECT_NEAR(cfo::step(Method::Heun, decay, 0.0, u, h)(0), 1 - h + h * h / 2, 1e-15);
}

TEST(Step, ZeroFieldAndZeroStep) {
    const Eigen::Vector3d u(1, 2, 3);
    for (auto m : {Method::Euler, Method::Heun, Method::Rk4}) {
        EXPECT_EQ(cfo::step(m, zero, 0.2, u, 0.3), u);
        EXPECT_THROW((void)cfo::step(m, zero, 0.2, u, 0.0), cfo::InvalidArgument);
    }
}

TEST(Step, UsesTimeArgument) {
    // du/dt = t, exact for Heun and RK4
    const cfo::Field ft = [](double t, const Eigen::VectorXd&) -> Eigen::VectorXd {
        return Eigen::VectorXd::Constant(1, t);
    };
    const Eigen::VectorXd u = Eigen::VectorXd::Zero(1);
    EXPECT_NEAR(cfo::step(Method::Rk4, ft, 1.0, u, 0.5)(0), 0.625, 1e-15);
    EXPECT_NEAR(cfo::step(Method::Heun, ft, 1.0, u, 0.5)(0), 0.625, 1e-15);
}

TEST(Rollout, ZeroFieldConstantAndNfe) {
    const auto g = cfo::TimeGrid::uniform(11);
    const Eigen::Vector2d u0(4, -1);
    for (auto m : {Method::Euler, Method::Heun, Method::Rk4}) {
        const auto r = cfo::rollout(zero, u0, g.times(), {m, 3, 1e8});
        ASSERT_EQ(r.states.size(), 11u);
        EXPECT_EQ(r.states.front(), u0);
        EXPECT_EQ(r.states.back(), u0);
        EXPECT_EQ(r.nfe, 10u * 3u * static_cast<std::size_t>(cfo::stages(m)));
    }
}

TEST(Rollout, DivergenceCarriesPartialResult) {
    const cfo::Field blow = [](double, const Eigen::VectorXd& u) -> Eigen::VectorXd {
        return u.array().square().matrix();
    };
    const auto g = cfo::TimeGrid::uniform(101);
    try {
        (void)cfo::rollout(blow, Eigen::VectorXd::Constant(1, 2.0), g.times(), {Method::Rk4, 1, 1e8});
        FAIL() << "expected Diverged";
    } catch (const cfo::Diverged& e) {
        EXPECT_GE(e.partial().states.size(), 1u);
        EXPECT_LT(e.partial().states.size(), 101u);
    }
}

TEST(Rollout, LorenzSelfConvergence) {
    const auto f = cfo::lorenz_field(5.0);
    const Eigen::Vector3d u0(1.0, 1.0, 1.0);
    const std::vector<double> ends{0.0, 1.0};
    const auto coarse = cfo::rollout(f, u0, ends, {Method::Rk4, 1000, 1e8});
    const auto fine = cfo::rollout(f, u0, ends, {Method::Rk4, 10000, 1e8});
    EXPECT_LT((coarse.states.back() - fine.states.back()).norm() / fine.states.back().norm(), 1e-6);
}

TEST(Rollout, SolverOrdersOnLorenz) {
    // 0.5 s horizon in normalised time; reference uses RK4 with 16x the finest step.
    const auto f = cfo::lorenz_field(0.5);
    const Eigen::Vector3d u0(1.0, 2.0, 20.0);
    const std::vector<double> ends{0.0, 1.0};
    const Eigen::VectorXd ref = cfo::rollout(f, u0, ends, {Method::Rk4, 2048 * 16, 1e8}).states.back();
    for (auto [m, order, base] : {std::tuple{Method::Euler, 1.0, 2000}, std::tuple{Method::Heun, 2.0, 400},
                                  std::tuple{Method::Rk4, 4.0, 100}}) {
        std::vector<double> errs, steps;
        for (int n : {base, 2 * base, 4 * base}) {
            const auto r = cfo::rollout(f, u0, ends, {m, static_cast<std::size_t>(n), 1e8});
            errs.push_back((r.states.back() - ref).norm());
            steps.push_back(1.0 / n);
        }
        for (double p : cfo::empirical_order(errs, steps)) {
            EXPECT_NEAR(p, order, 0.2) << cfo::to_string(m);
        }
    }
}

TEST(RolloutReverse, RecoversInitialStateWithTrueField) {
    // Backward Lorenz is strongly expanding, so the round trip only closes on short horizons.
    const auto f = cfo::lorenz_field(0.5);
    const Eigen::Vector3d u0(-3.0, 4.0, 10.0);
    const std::vector<double> fwd{0.0, 1.0}, back{0.0};
    const auto r = cfo::rollout(f, u0, fwd, {Method::Rk4, 400, 1e8});
    const auto b = cfo::rollout_reverse(f, r.states.back(), 1.0, back, {Method::Rk4, 400, 1e8});
    ASSERT_EQ(b.states.size(), 2u);
    EXPECT_EQ(b.states.front(), r.states.back());
    EXPECT_LT((b.states.back() - u0).norm() / u0.norm(), 1e-6);
}

TEST(RolloutReverse, ZeroFieldAndValidation) {
    const Eigen::Vector2d u(1, 2);
    const std::vector<double> targets{0.5, 0.25, 0.0};
    const auto r = cfo::rollout_reverse(zero, u, 0.75, targets);
    ASSERT_EQ(r.states.size(), 4u);
    for (const auto& s : r.states) {
        EXPECT_EQ(s, u);
    }
    const std::vector<double> increasing{0.25, 0.5};
    EXPECT_THROW((void)cfo::rollout_reverse(zero, u, 0.75, increasing), cfo::InvalidArgument);
    const std::vector<double> beyond{0.9};
    EXPECT_THROW((void)cfo::rollout_reverse(zero, u, 0.75, beyond), cfo::InvalidArgument);
}

TEST(IntegrateFixed, StepCountAndNfe) {
    const auto r = cfo::integrate_fixed(decay, Eigen::VectorXd::Ones(1), 0.0, 1.0, 10, Method::Heun);
    EXPECT_EQ(r.nfe, 20u);
    double expect = 1.0;
    for (int i = 0; i < 10; ++i) expect *= 1 - 0.1 + 0.005;
    EXPECT_NEAR(r.states.back()(0), expect, 1e-14);
}

TEST(ArRollout, IdentityAndOracle) {
    const cfo::StepMap id = [](const Eigen::VectorXd& u) { return u; };
    const auto r = cfo::ar_rollout(id, Eigen::Vector2d(1, 2), 5);
    EXPECT_EQ(r.nfe, 5u);
    EXPECT_EQ(r.states.size(), 6u);
    EXPECT_EQ(r.states.back(), Eigen::Vector2d(1, 2));

    cfo::LorenzGenConfig g;
    g.n_traj = 1;
    g.n_times = 51;
    g.substeps = 10;
    const auto data = cfo::generate_lorenz(g);
    const auto f = cfo::lorenz_field(data.raw_horizon);
    const double h = 1.0 / 50.0;
    const cfo::StepMap oracle = [&](const Eigen::VectorXd& u) {
        return cfo::integrate_fixed(f, u, 0.0, h, 10, Method::Rk4).states.back();
    };
    const auto& truth = data.trajectories[0].states;
    const auto a = cfo::ar_rollout(oracle, truth.col(0), 50);
    EXPECT_LT(cfo::relative_l2(a.matrix(), truth), 1e-12);
}

TEST(Method, NamesAndStages) {
    EXPECT_EQ(cfo::method_from_string("heun"), Method::Heun);
    EXPECT_STREQ(cfo::to_string(Method::Rk4), "rk4");
    EXPECT_EQ(cfo::stages(Method::Euler), 1);
    EXPECT_EQ(cfo::stages(Method::Rk4), 4);
    EXPECT_THROW((void)cfo::method_from_string("dopri5"), cfo::InvalidArgument);
}
