#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "cfo/errors.hpp"
#include "cfo/spline.hpp"
#include "cfo/systems.hpp"
#include "cfo/vector_field.hpp"

namespace cfo {

struct TrainConfig {
    std::size_t steps = 20000;
    std::size_t batch_size = 256;
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double adam_eps = 1e-8;
    std::size_t eval_every = 1000;
    double gamma0 = 1e-5;
    int noise_m = 3;
    SplineKind spline_kind = SplineKind::Quintic;
    std::uint64_t seed = 0;

    void validate() const;
};

struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    std::size_t step = 0;

    [[nodiscard]] static AdamState zeros(Eigen::Index n);
};

/// Bias-corrected Adam update of `params` in place.
void adam_step(Eigen::VectorXd& params, AdamState& state, const Eigen::VectorXd& grads,
               const TrainConfig& config);

struct HistoryRow {
    std::size_t step = 0;
    double train_loss = 0.0;  // mean loss over the steps since the previous row
    double eval_metric = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
    VectorField model;  // best-validation weights (final weights without validation)
    std::vector<HistoryRow> history;
    std::size_t best_step = 0;
    double best_eval = std::numeric_limits<double>::quiet_NaN();
};

/// Raised when training hits a numeric failure; holds the last good model.
class TrainingAborted : public NumericError {
public:
    TrainingAborted(const std::string& what, TrainResult last_good)
        : NumericError(what), last_good_(std::move(last_good)) {}
    [[nodiscard]] const TrainResult& last_good() const noexcept { return last_good_; }

private:
    TrainResult last_good_;
};

/// Flow-matching training against spline-interpolant velocities. Splines are
/// built once; every step draws a fresh minibatch. With a validation set the
/// RK4 rollout relative L2 is recorded every eval_every steps and the best
/// weights are returned.
[[nodiscard]] TrainResult train_cfo(const TrajectorySet& train, const TrajectorySet* validation,
                                    const TrainConfig& config, MlpConfig mlp);

/// Teacher-forced one-step map u(t_i) -> u(t_{i+1}) with the time embedding
/// disabled. Every trajectory must sit on the same uniform grid.
[[nodiscard]] TrainResult train_ar(const TrajectorySet& train, const TrajectorySet* validation,
                                   const TrainConfig& config, MlpConfig mlp);

/// Moving average of `values` over a trailing window.
[[nodiscard]] std::vector<double> smooth(const std::vector<double>& values, std::size_t window);

} // namespace cfo
