#include "cfo/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "cfo/errors.hpp"
#include "cfo/evaluate.hpp"
#include "cfo/metrics.hpp"

namespace cfo {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using FieldFactory = std::function<Field(Eigen::Index)>;
} // namespace

std::vector<ConvergenceRow> convergence_study(const TrajectorySet& lorenz,
                                              std::span<const std::size_t> strides,
                                              std::size_t max_segments) {
    if (lorenz.system != "lorenz" || lorenz.state_dim != 3) {
        throw InvalidArgument("convergence study needs a Lorenz dataset (analytic field required)");
    }
    if (strides.empty()) {
        throw InvalidArgument("convergence study: no strides given");
    }
    const Field truth = lorenz_field(lorenz.raw_horizon);
    const double base_step =
        lorenz.raw_horizon / static_cast<double>(lorenz.trajectories.front().size() - 1);

    std::vector<ConvergenceRow> rows;
    for (SplineKind kind : {SplineKind::Quintic, SplineKind::Linear}) {
        std::size_t first_row = rows.size();
        for (std::size_t stride : strides) {
            const TrajectorySet coarse = lorenz.strided(stride);
            double sum0 = 0.0, sum1 = 0.0;
            std::size_t count = 0;
            for (const auto& tr : coarse.trajectories) {
                if (!tr.grid.is_uniform()) {
                    throw InvalidArgument("convergence study needs uniform grids");
                }
                const auto spline = build_spline(kind, tr);
                for (std::size_t s = 0; s < tr.grid.segments(); ++s) {
                    if (max_segments != 0 && count >= max_segments) {
                        break;
                    }
                    const Eigen::VectorXd f0 = truth(0.0, tr.states.col(static_cast<Eigen::Index>(s)));
                    const Eigen::VectorXd f1 = truth(0.0, tr.states.col(static_cast<Eigen::Index>(s + 1)));
                    sum0 += (spline->velocity_on_segment(s, 0.0) - f0).norm() / f0.norm();
                    sum1 += (spline->velocity_on_segment(s, 1.0) - f1).norm() / f1.norm();
                    ++count;
                }
            }
            ConvergenceRow row;
            row.kind = kind;
            row.stride = stride;
            row.step_seconds = base_step * static_cast<double>(stride);
            row.segments = count;
            row.error_tau0 = sum0 / static_cast<double>(count);
            row.error_tau1 = sum1 / static_cast<double>(count);
            row.order_tau0 = kNaN;
            row.order_tau1 = kNaN;
            if (rows.size() > first_row) {
                const auto& prev = rows.back();
                const std::array<double, 2> h{prev.step_seconds, row.step_seconds};
                const std::array<double, 2> e0{prev.error_tau0, row.error_tau0};
                const std::array<double, 2> e1{prev.error_tau1, row.error_tau1};
                row.order_tau0 = empirical_order(e0, h).front();
                row.order_tau1 = empirical_order(e1, h).front();
            }
            rows.push_back(row);
        }
    }
    return rows;
}

CsvTable convergence_table(const std::vector<ConvergenceRow>& rows, const std::string& fp) {
    CsvTable t({"spline", "stride", "step_seconds", "segments", "error_tau0", "order_tau0",
                "error_tau1", "order_tau1"},
               fp);
    for (const auto& r : rows) {
        t.row({to_string(r.kind), std::to_string(r.stride), format_double(r.step_seconds),
               std::to_string(r.segments), format_double(r.error_tau0), format_double(r.order_tau0),
               format_double(r.error_tau1), format_double(r.order_tau1)});
    }
    return t;
}

std::size_t steps_for_budget(Method method, double budget_percent, std::size_t intervals) {
    if (!(budget_percent > 0.0)) {
        throw InvalidArgument("NFE budget must be positive");
    }
    const double evals = budget_percent / 100.0 * static_cast<double>(intervals);
    const auto steps = static_cast<std::size_t>(std::llround(evals / stages(method)));
    return std::max<std::size_t>(steps, 1);
}

namespace {

struct Stacked {
    Eigen::VectorXd u0;
    Eigen::MatrixXd truth_final;
    Eigen::Index d;
    Eigen::Index n;
};

Stacked stack_initial(const TrajectorySet& test) {
    if (test.size() == 0) {
        throw InvalidArgument("empty test set");
    }
    const auto d = static_cast<Eigen::Index>(test.state_dim);
    const auto n = static_cast<Eigen::Index>(test.size());
    Stacked s{Eigen::VectorXd(d * n), Eigen::MatrixXd(d, n), d, n};
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& st = test.trajectories[static_cast<std::size_t>(k)].states;
        s.u0.segment(k * d, d) = st.col(0);
        s.truth_final.col(k) = st.col(st.cols() - 1);
    }
    return s;
}

std::vector<NfeRow> nfe_sweep_impl(const FieldFactory& make, const TrajectorySet& test,
                                   std::span<const double> budgets,
                                   std::span<const Method> methods) {
    const Stacked s = stack_initial(test);
    const std::size_t intervals = test.trajectories.front().size() - 1;
    const Field f = make(s.n);
    std::vector<NfeRow> rows;
    for (Method m : methods) {
        for (double b : budgets) {
            NfeRow row;
            row.method = m;
            row.budget_percent = b;
            row.steps = steps_for_budget(m, b, intervals);
            row.nfe = row.steps * static_cast<std::size_t>(stages(m));
            std::vector<double> errs(static_cast<std::size_t>(s.n));
            try {
                const auto r = integrate_fixed(f, s.u0, 0.0, 1.0, row.steps, m,
                                               1e8 * std::sqrt(static_cast<double>(s.n)));
                const Eigen::VectorXd& end = r.states.back();
                for (Eigen::Index k = 0; k < s.n; ++k) {
                    const auto truth = s.truth_final.col(k);
                    errs[static_cast<std::size_t>(k)] =
                        (end.segment(k * s.d, s.d) - truth).norm() / truth.norm();
                }
            } catch (const Diverged&) {
                std::fill(errs.begin(), errs.end(), std::numeric_limits<double>::infinity());
            }
            const auto ms = mean_sd(errs);
            row.final_mean = ms.mean;
            row.final_sd = ms.sd;
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<ReverseRow> reverse_impl(const FieldFactory& make, const TrajectorySet& test,
                                     double t_star, std::span<const double> noise_levels,
                                     const SolverConfig& solver, std::uint64_t seed) {
    if (test.size() == 0) {
        throw InvalidArgument("reverse study: empty test set");
    }
    if (!(t_star >= 0.0 && t_star <= 1.0)) {
        throw InvalidArgument("reverse study: t_star must lie in [0,1]");
    }
    const auto& grid = test.trajectories.front().grid;
    for (const auto& tr : test.trajectories) {
        if (tr.grid != grid) {
            throw InvalidArgument("reverse study: test trajectories must share one grid");
        }
    }
    const std::size_t star = grid.segment_of(t_star) + (t_star == 1.0 ? 1 : 0);
    if (std::abs(grid[star] - t_star) > 1e-9) {
        throw InvalidArgument("reverse study: t_star must coincide with a grid time");
    }
    std::vector<ReverseRow> rows;
    if (star == 0) {
        return rows;
    }
    std::vector<double> targets;
    for (std::size_t i = star; i-- > 0;) {
        targets.push_back(grid[i]);
    }
    const auto d = static_cast<Eigen::Index>(test.state_dim);
    const auto n = static_cast<Eigen::Index>(test.size());
    const Field f = make(n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    for (double level : noise_levels) {
        Eigen::VectorXd u_star(d * n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const Eigen::VectorXd u = test.trajectories[static_cast<std::size_t>(k)].states.col(
                static_cast<Eigen::Index>(star));
            const double rms = u.norm() / std::sqrt(static_cast<double>(d));
            Eigen::VectorXd z(d);
            for (Eigen::Index c = 0; c < d; ++c) {
                z(c) = normal(rng);
            }
            u_star.segment(k * d, d) = u + level * rms * z;
        }
        SolverConfig batched = solver;
        batched.divergence_bound = solver.divergence_bound * std::sqrt(static_cast<double>(n));
        RolloutResult r;
        try {
            r = rollout_reverse(f, u_star, grid[star], targets, batched);
        } catch (const Diverged& e) {
            r = e.partial();
        }
        for (std::size_t j = 0; j < targets.size(); ++j) {
            std::vector<double> errs(static_cast<std::size_t>(n),
                                     std::numeric_limits<double>::infinity());
            if (j + 1 < r.states.size()) {
                const Eigen::VectorXd& pred = r.states[j + 1];
                const auto col = static_cast<Eigen::Index>(star - 1 - j);
                for (Eigen::Index k = 0; k < n; ++k) {
                    const auto truth = test.trajectories[static_cast<std::size_t>(k)].states.col(col);
                    errs[static_cast<std::size_t>(k)] =
                        (pred.segment(k * d, d) - truth).norm() / truth.norm();
                }
            }
            const auto ms = mean_sd(errs);
            rows.push_back({level, grid[star] - targets[j], targets[j], ms.mean, ms.sd});
        }
    }
    return rows;
}

} // namespace

std::vector<NfeRow> nfe_sweep(const VectorField& model, const TrajectorySet& test,
                              std::span<const double> budgets, std::span<const Method> methods) {
    return nfe_sweep_impl([&](Eigen::Index n) { return stacked_field(model, n); }, test, budgets,
                          methods);
}

std::vector<NfeRow> nfe_sweep(const Field& field, const TrajectorySet& test,
                              std::span<const double> budgets, std::span<const Method> methods) {
    const auto d = static_cast<Eigen::Index>(test.state_dim);
    return nfe_sweep_impl([&](Eigen::Index n) { return stacked_field(field, d, n); }, test,
                          budgets, methods);
}

CsvTable nfe_table(const std::vector<NfeRow>& rows, const std::string& fp) {
    CsvTable t({"method", "budget_percent", "steps", "nfe", "final_rel_l2_mean", "final_rel_l2_sd"},
               fp);
    for (const auto& r : rows) {
        t.row({to_string(r.method), format_double(r.budget_percent), std::to_string(r.steps),
               std::to_string(r.nfe), format_double(r.final_mean), format_double(r.final_sd)});
    }
    return t;
}

std::vector<ReverseRow> reverse_study(const VectorField& model, const TrajectorySet& test,
                                      double t_star, std::span<const double> noise_levels,
                                      const SolverConfig& solver, std::uint64_t seed) {
    return reverse_impl([&](Eigen::Index n) { return stacked_field(model, n); }, test, t_star,
                        noise_levels, solver, seed);
}

std::vector<ReverseRow> reverse_study(const Field& field, const TrajectorySet& test, double t_star,
                                      std::span<const double> noise_levels,
                                      const SolverConfig& solver, std::uint64_t seed) {
    const auto d = static_cast<Eigen::Index>(test.state_dim);
    return reverse_impl([&](Eigen::Index n) { return stacked_field(field, d, n); }, test, t_star,
                        noise_levels, solver, seed);
}

CsvTable reverse_table(const std::vector<ReverseRow>& rows, const std::string& fp) {
    CsvTable t({"noise", "horizon", "target_time", "rel_l2_mean", "rel_l2_sd"}, fp);
    for (const auto& r : rows) {
        t.row({format_double(r.noise), format_double(r.horizon), format_double(r.target_time),
               format_double(r.mean), format_double(r.sd)});
    }
    return t;
}

} // namespace cfo
