#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cfo/dataset_io.hpp"
#include "cfo/odeint.hpp"
#include "cfo/spline.hpp"
#include "cfo/systems.hpp"
#include "cfo/vector_field.hpp"

namespace cfo {

// ---- spline velocity convergence on Lorenz data -------------------------

struct ConvergenceRow {
    SplineKind kind = SplineKind::Quintic;
    std::size_t stride = 1;
    double step_seconds = 0.0;
    std::size_t segments = 0;
    double error_tau0 = 0.0;  // mean relative L2 of ds/dt vs the true field at segment starts
    double error_tau1 = 0.0;  // ... and at segment ends (same segment's polynomial)
    double order_tau0 = 0.0;  // NaN on the first row of each kind
    double order_tau1 = 0.0;
};

/// Downsamples each trajectory by every stride, fits linear and quintic
/// splines and compares spline velocities with the analytic Lorenz field.
/// `max_segments` (0 = all) caps the segments used per stride.
[[nodiscard]] std::vector<ConvergenceRow> convergence_study(const TrajectorySet& lorenz,
                                                            std::span<const std::size_t> strides,
                                                            std::size_t max_segments = 0);
[[nodiscard]] CsvTable convergence_table(const std::vector<ConvergenceRow>& rows,
                                         const std::string& fp);

// ---- NFE budget sweep ----------------------------------------------------

struct NfeRow {
    Method method = Method::Rk4;
    double budget_percent = 100.0;
    std::size_t steps = 0;  // solver steps over [0,1]
    std::size_t nfe = 0;    // per trajectory
    double final_mean = 0.0;
    double final_sd = 0.0;
};

/// Number of solver steps whose evaluations total budget% of the
/// autoregressive count `intervals` (at least one step).
[[nodiscard]] std::size_t steps_for_budget(Method method, double budget_percent,
                                           std::size_t intervals);

/// Final-time relative L2 over `test` for every (method, budget) pair. The
/// autoregressive reference NFE is the number of intervals in the test grid.
[[nodiscard]] std::vector<NfeRow> nfe_sweep(const VectorField& model, const TrajectorySet& test,
                                            std::span<const double> budgets,
                                            std::span<const Method> methods);
[[nodiscard]] std::vector<NfeRow> nfe_sweep(const Field& field, const TrajectorySet& test,
                                            std::span<const double> budgets,
                                            std::span<const Method> methods);
[[nodiscard]] CsvTable nfe_table(const std::vector<NfeRow>& rows, const std::string& fp);

// ---- reverse-time inference ---------------------------------------------

struct ReverseRow {
    double noise = 0.0;
    double horizon = 0.0;  // t_star - target time, normalised units
    double target_time = 0.0;
    double mean = 0.0;     // relative L2 at the target time, averaged over trajectories
    double sd = 0.0;
};

/// Starts from the true state at t_star (a grid time) perturbed by
/// noise * rms(u) * N(0, I), integrates backward through every earlier grid
/// time and reports the error per backward horizon. t_star == 0 yields no rows.
[[nodiscard]] std::vector<ReverseRow> reverse_study(const VectorField& model,
                                                    const TrajectorySet& test, double t_star,
                                                    std::span<const double> noise_levels,
                                                    const SolverConfig& solver, std::uint64_t seed);
[[nodiscard]] std::vector<ReverseRow> reverse_study(const Field& field, const TrajectorySet& test,
                                                    double t_star,
                                                    std::span<const double> noise_levels,
                                                    const SolverConfig& solver, std::uint64_t seed);
[[nodiscard]] CsvTable reverse_table(const std::vector<ReverseRow>& rows, const std::string& fp);

} // namespace cfo
