#pragma once

#include <cstddef>

#include "cfo/metrics.hpp"
#include "cfo/odeint.hpp"
#include "cfo/systems.hpp"
#include "cfo/vector_field.hpp"

namespace cfo {

/// Wraps a trained model as an ODE right-hand side.
[[nodiscard]] Field as_field(const VectorField& model);
/// Wraps a one-step model (time input ignored) as an autoregressive map.
[[nodiscard]] StepMap as_step_map(const VectorField& model);

/// Field over n stacked states (vector of length d*n); every block of d
/// entries evolves independently. The model version batches the n
/// evaluations into one forward pass.
[[nodiscard]] Field stacked_field(const VectorField& model, Eigen::Index n);
[[nodiscard]] Field stacked_field(Field f, Eigen::Index d, Eigen::Index n);

/// Predicted trajectories for every member of `set`, starting from each
/// trajectory's first snapshot and recorded on its own grid. Members sharing
/// one grid are integrated together with batched model evaluations.
struct SetRollout {
    std::vector<Eigen::MatrixXd> predictions;
    std::size_t nfe = 0;        // per trajectory
    std::size_t diverged = 0;   // trajectories that exceeded the bound
};

[[nodiscard]] SetRollout rollout_set(const VectorField& model, const TrajectorySet& set,
                                     const SolverConfig& solver);
[[nodiscard]] SetRollout rollout_set(const Field& field, const TrajectorySet& set,
                                     const SolverConfig& solver);
[[nodiscard]] SetRollout ar_rollout_set(const VectorField& model, const TrajectorySet& set);

[[nodiscard]] EvalReport evaluate(const VectorField& model, const TrajectorySet& set,
                                  const SolverConfig& solver);
[[nodiscard]] EvalReport evaluate(const Field& field, const TrajectorySet& set,
                                  const SolverConfig& solver);
[[nodiscard]] EvalReport evaluate_ar(const VectorField& model, const TrajectorySet& set);

} // namespace cfo
