#include <gtest/gtest.h>

#include <cmath>

#include "cfo/errors.hpp"
#include "cfo/evaluate.hpp"
#include "cfo/experiments.hpp"

namespace {

const cfo::TrajectorySet& lorenz_test_set() {
    static const cfo::TrajectorySet set = [] {
        cfo::LorenzGenConfig g;
        g.n_traj = 8;
        g.n_times = 201;
        g.seed = 77;
        return cfo::generate_lorenz(g);
    }();
    return set;
}

} // namespace

TEST(StepsForBudget, Convention) {
    EXPECT_EQ(cfo::steps_for_budget(cfo::Method::Rk4, 100, 200), 50u);
    EXPECT_EQ(cfo::steps_for_budget(cfo::Method::Rk4, 400, 200), 200u);
    EXPECT_EQ(cfo::steps_for_budget(cfo::Method::Euler, 50, 200), 100u);
    EXPECT_EQ(cfo::steps_for_budget(cfo::Method::Heun, 200, 200), 200u);
    EXPECT_EQ(cfo::steps_for_budget(cfo::Method::Rk4, 1, 10), 1u);
    EXPECT_THROW((void)cfo::steps_for_budget(cfo::Method::Rk4, 0, 10), cfo::InvalidArgument);
}

TEST(Convergence, LorenzOrders) {
    cfo::LorenzGenConfig g;
    g.n_traj = 2;
    g.n_times = 1001;
    const auto set = cfo::generate_lorenz(g);
    const std::vector<std::size_t> strides{1, 2, 4};
    const auto rows = cfo::convergence_study(set, strides);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0].kind, cfo::SplineKind::Quintic);
    EXPECT_EQ(rows[0].segments, 2000u);
    EXPECT_TRUE(std::isnan(rows[0].order_tau0));
    EXPECT_NEAR(rows[1].order_tau0, 2.0, 0.15);
    EXPECT_NEAR(rows[5].order_tau1, 1.0, 0.1);
    // error at 4 dt is about 16x (quintic) and 4x (linear) the dt error
    EXPECT_NEAR(rows[2].error_tau0 / rows[0].error_tau0, 16.0, 3.0);
    EXPECT_NEAR(rows[5].error_tau0 / rows[3].error_tau0, 4.0, 0.5);
}

TEST(Convergence, NeedsLorenz) {
    cfo::BurgersGenConfig g;
    g.n_traj = 1;
    g.pde.nx = 16;
    const auto set = cfo::generate_burgers(g);
    const std::vector<std::size_t> strides{1, 2};
    EXPECT_THROW((void)cfo::convergence_study(set, strides), cfo::InvalidArgument);
}

TEST(NfeSweep, TrueFieldShape) {
    const auto& set = lorenz_test_set();
    const auto f = cfo::analytic_field(set);
    const std::vector<double> budgets{50, 100, 200, 400};
    const std::vector<cfo::Method> methods{cfo::Method::Euler, cfo::Method::Rk4};
    const auto rows = cfo::nfe_sweep(f, set, budgets, methods);
    ASSERT_EQ(rows.size(), 8u);
    for (std::size_t b = 0; b < budgets.size(); ++b) {
        const auto& eu = rows[b];
        const auto& rk = rows[budgets.size() + b];
        EXPECT_EQ(eu.nfe, rk.nfe);
        EXPECT_GE(eu.final_mean, rk.final_mean) << budgets[b];
    }
    EXPECT_LE(rows[7].final_mean, rows[4].final_mean);
}

TEST(NfeSweep, FullBudgetMatchesEvaluation) {
    // RK4 at 400% takes one step per interval, exactly the eval rollout.
    const auto& set = lorenz_test_set();
    const auto f = cfo::analytic_field(set);
    const std::vector<double> budgets{400};
    const std::vector<cfo::Method> methods{cfo::Method::Rk4};
    const auto rows = cfo::nfe_sweep(f, set, budgets, methods);
    const auto rep = cfo::evaluate(f, set, cfo::SolverConfig{});
    EXPECT_NEAR(rows[0].final_mean, rep.final_mean, 1e-9 * rep.final_mean + 1e-15);
    EXPECT_EQ(rows[0].nfe, rep.nfe);
}

TEST(Reverse, EmptyAtZeroAndGrowsWithNoise) {
    const auto& set = lorenz_test_set();
    const auto f = cfo::analytic_field(set);
    const std::vector<double> noise{0.0, 1e-3, 1e-2};
    EXPECT_TRUE(cfo::reverse_study(f, set, 0.0, noise, {}, 1).empty());
    const auto rows = cfo::reverse_study(f, set, 0.1, noise, {cfo::Method::Rk4, 4, 1e8}, 1);
    ASSERT_EQ(rows.size(), 3u * 20u);
    EXPECT_NEAR(rows[0].horizon, 0.005, 1e-12);
    EXPECT_LT(rows[0].mean, 1e-6);
    for (std::size_t h = 0; h < 20; ++h) {
        EXPECT_LE(rows[h].mean, rows[20 + h].mean);
        EXPECT_LE(rows[20 + h].mean, rows[40 + h].mean);
    }
    EXPECT_THROW((void)cfo::reverse_study(f, set, 0.1234, noise, {}, 1), cfo::InvalidArgument);
}

TEST(Tables, CarryFingerprint) {
    std::vector<cfo::NfeRow> rows(1);
    rows[0].steps = 3;
    const auto t = cfo::nfe_table(rows, "abc");
    EXPECT_EQ(t.str().rfind("# fingerprint=abc\nmethod,", 0), 0u);
}
