#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "cfo/errors.hpp"

namespace cfo {

/// Right-hand side du/dt = f(t, u).
using Field = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
/// One-step map u_{i+1} = F(u_i) for autoregressive rollouts.
using StepMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

enum class Method { Euler, Heun, Rk4 };

[[nodiscard]] const char* to_string(Method m);
[[nodiscard]] Method method_from_string(std::string_view name);
/// Field evaluations per step: 1, 2, 4.
[[nodiscard]] int stages(Method m) noexcept;

struct SolverConfig {
    Method method = Method::Rk4;
    std::size_t substeps_per_interval = 1;
    double divergence_bound = 1e8;
};

struct RolloutResult {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::size_t nfe = 0;

    /// States as columns (d x times.size()).
    [[nodiscard]] Eigen::MatrixXd matrix() const;
};

/// Thrown when ||u|| exceeds the configured bound; carries what was computed.
class Diverged : public NumericError {
public:
    Diverged(const std::string& what, RolloutResult partial)
        : NumericError(what), partial_(std::move(partial)) {}
    [[nodiscard]] const RolloutResult& partial() const noexcept { return partial_; }

private:
    RolloutResult partial_;
};

/// One explicit Euler / Heun (trapezoidal) / classical RK4 step; h may be negative.
[[nodiscard]] Eigen::VectorXd step(Method method, const Field& f, double t,
                                   const Eigen::VectorXd& u, double h);

/// Integrates from eval_times.front() through every eval time, using
/// `substeps_per_interval` equal steps per interval.
[[nodiscard]] RolloutResult rollout(const Field& f, const Eigen::VectorXd& u0,
                                    std::span<const double> eval_times,
                                    const SolverConfig& solver = {});

/// Integrates backward from (t_star, u_star) through decreasing target times
/// in [0, t_star]. The first recorded state is u_star at t_star.
[[nodiscard]] RolloutResult rollout_reverse(const Field& f, const Eigen::VectorXd& u_star,
                                            double t_star, std::span<const double> target_times,
                                            const SolverConfig& solver = {});

/// Integrates [t0, t1] with exactly n_steps equal steps, recording only the end
/// state (NFE-budget sweeps).
[[nodiscard]] RolloutResult integrate_fixed(const Field& f, const Eigen::VectorXd& u0, double t0,
                                            double t1, std::size_t n_steps, Method method,
                                            double divergence_bound = 1e8);

/// u_{i+1} = model(u_i), n_steps times; nfe = n_steps.
[[nodiscard]] RolloutResult ar_rollout(const StepMap& model, const Eigen::VectorXd& u0,
                                       std::size_t n_steps, double divergence_bound = 1e8);

} // namespace cfo
