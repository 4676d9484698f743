#include "cfo/trainer.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <string>

#include "cfo/evaluate.hpp"
#include "cfo/interpolant.hpp"

namespace cfo {

void TrainConfig::validate() const {
    if (steps == 0 || batch_size == 0) {
        throw InvalidArgument("TrainConfig: steps and batch_size must be positive");
    }
    if (!(learning_rate > 0.0)) {
        throw InvalidArgument("TrainConfig: learning rate must be positive");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw InvalidArgument("TrainConfig: Adam betas must lie in [0,1)");
    }
    if (!(adam_eps > 0.0)) {
        throw InvalidArgument("TrainConfig: adam_eps must be positive");
    }
    if (gamma0 < 0.0 || noise_m < 1) {
        throw InvalidArgument("TrainConfig: gamma0 must be >= 0 and noise_m >= 1");
    }
}

AdamState AdamState::zeros(Eigen::Index n) {
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0};
}

void adam_step(Eigen::VectorXd& params, AdamState& state, const Eigen::VectorXd& grads,
               const TrainConfig& config) {
    if (state.m.size() != params.size() || grads.size() != params.size() ||
        state.v.size() != params.size()) {
        throw InvalidArgument("adam_step: shape mismatch");
    }
    ++state.step;
    const double b1 = config.beta1;
    const double b2 = config.beta2;
    state.m = b1 * state.m + (1.0 - b1) * grads;
    state.v = b2 * state.v + (1.0 - b2) * grads.cwiseProduct(grads);
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    const Eigen::VectorXd update =
        config.learning_rate * (state.m / c1).array() / ((state.v / c2).array().sqrt() + config.adam_eps);
    if (!update.allFinite()) {
        throw NumericError("adam_step: non-finite update at step " + std::to_string(state.step));
    }
    params -= update;
}

std::vector<double> smooth(const std::vector<double>& values, std::size_t window) {
    std::vector<double> out(values.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        acc += values[i];
        if (i >= window) {
            acc -= values[i - window];
        }
        out[i] = acc / static_cast<double>(std::min(i + 1, window));
    }
    return out;
}

namespace {

// Generic loop shared by CFO and AR: `draw` produces the next minibatch,
// `validate` returns the validation metric for the current model.
template <class Draw, class Validate>
TrainResult run_adam(VectorField model, const TrainConfig& config, Draw&& draw,
                     Validate&& validate, bool has_validation) {
    TrainResult result;
    result.model = model;
    AdamState adam = AdamState::zeros(model.params().size());
    double window_loss = 0.0;
    std::size_t window_count = 0;
    double best = std::numeric_limits<double>::infinity();

    for (std::size_t step = 1; step <= config.steps; ++step) {
        try {
            const InterpolantBatch batch = draw();
            const LossAndGrad lg = model.loss_and_grad(batch);
            adam_step(model.params(), adam, lg.grad, config);
            window_loss += lg.loss;
            ++window_count;
        } catch (const NumericError& e) {
            if (!has_validation) {
                result.model = model;
            }
            throw TrainingAborted(std::string("training aborted at step ") + std::to_string(step) +
                                      ": " + e.what() + "; last good model from step " +
                                      std::to_string(result.best_step),
                                  result);
        }
        const bool record = (step % config.eval_every == 0) || step == config.steps;
        if (!record) {
            continue;
        }
        HistoryRow row{step, window_loss / static_cast<double>(window_count),
                       std::numeric_limits<double>::quiet_NaN()};
        window_loss = 0.0;
        window_count = 0;
        if (has_validation) {
            row.eval_metric = validate(model);
            if (std::isfinite(row.eval_metric) && row.eval_metric < best) {
                best = row.eval_metric;
                result.best_eval = best;
                result.best_step = step;
                result.model = model;
            }
        } else {
            result.best_step = step;
            result.model = model;
        }
        result.history.push_back(row);
    }
    if (has_validation && !std::isfinite(best)) {
        result.model = model;
        result.best_step = config.steps;
    }
    return result;
}

} // namespace

TrainResult train_cfo(const TrajectorySet& train, const TrajectorySet* validation,
                      const TrainConfig& config, MlpConfig mlp) {
    config.validate();
    train.validate();
    if (train.size() == 0) {
        throw InvalidArgument("train_cfo: empty training set");
    }
    mlp.state_dim = train.state_dim;
    mlp.use_time_embedding = true;

    std::vector<std::unique_ptr<Spline>> splines;
    splines.reserve(train.size());
    std::size_t total_knots = 0;
    for (const auto& tr : train.trajectories) {
        splines.push_back(build_spline(config.spline_kind, tr));
        total_knots += tr.size();
    }

    // Normalisation statistics from knot states and spline velocities at knots.
    const auto d = static_cast<Eigen::Index>(train.state_dim);
    Eigen::MatrixXd states(d, static_cast<Eigen::Index>(total_knots));
    Eigen::MatrixXd velocities(d, static_cast<Eigen::Index>(total_knots));
    Eigen::Index col = 0;
    for (const auto& s : splines) {
        for (std::size_t i = 0; i < s->grid().size(); ++i, ++col) {
            states.col(col) = s->values().col(static_cast<Eigen::Index>(i));
            velocities.col(col) = s->velocity(s->grid()[i]);
        }
    }

    VectorField model = VectorField::init(mlp, config.seed);
    model.set_normalization(Normalization::fit(states, velocities));

    Rng rng(substream_seed(config.seed, 0x5eed));
    const NoiseSchedule schedule{config.gamma0, config.noise_m};
    const SolverConfig solver{Method::Rk4, 1, 1e8};

    return run_adam(
        std::move(model), config,
        [&] { return sample_batch(splines, schedule, config.batch_size, rng); },
        [&](const VectorField& m) { return evaluate(m, *validation, solver).mean; },
        validation != nullptr && validation->size() > 0);
}

TrainResult train_ar(const TrajectorySet& train, const TrajectorySet* validation,
                     const TrainConfig& config, MlpConfig mlp) {
    config.validate();
    train.validate();
    if (train.size() == 0) {
        throw InvalidArgument("train_ar: empty training set");
    }
    const auto& ref = train.trajectories.front().grid;
    for (const auto& tr : train.trajectories) {
        if (!tr.grid.is_uniform() || tr.grid != ref) {
            throw InvalidArgument(
                "train_ar: autoregressive training requires every trajectory on the same uniform "
                "time grid; irregular (subsampled) grids are not supported");
        }
    }
    mlp.state_dim = train.state_dim;
    mlp.use_time_embedding = false;

    const auto d = static_cast<Eigen::Index>(train.state_dim);
    const std::size_t per = ref.size() - 1;
    const auto n_pairs = static_cast<Eigen::Index>(train.size() * per);
    Eigen::MatrixXd inputs(d, n_pairs);
    Eigen::MatrixXd targets(d, n_pairs);
    Eigen::Index col = 0;
    for (const auto& tr : train.trajectories) {
        for (std::size_t i = 0; i < per; ++i, ++col) {
            inputs.col(col) = tr.states.col(static_cast<Eigen::Index>(i));
            targets.col(col) = tr.states.col(static_cast<Eigen::Index>(i + 1));
        }
    }

    VectorField model = VectorField::init(mlp, config.seed);
    model.set_normalization(Normalization::fit(inputs, targets));

    Rng rng(substream_seed(config.seed, 0xa7));
    std::uniform_int_distribution<Eigen::Index> pick(0, n_pairs - 1);
    const auto bs = static_cast<Eigen::Index>(config.batch_size);

    return run_adam(
        std::move(model), config,
        [&] {
            InterpolantBatch batch{Eigen::VectorXd::Zero(bs), Eigen::MatrixXd(d, bs),
                                   Eigen::MatrixXd(d, bs)};
            for (Eigen::Index b = 0; b < bs; ++b) {
                const Eigen::Index k = pick(rng);
                batch.x.col(b) = inputs.col(k);
                batch.v_target.col(b) = targets.col(k);
            }
            return batch;
        },
        [&](const VectorField& m) { return evaluate_ar(m, *validation).mean; },
        validation != nullptr && validation->size() > 0);
}

} // namespace cfo
