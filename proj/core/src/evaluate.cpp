#include "cfo/evaluate.hpp"

#include <cmath>
#include <map>

#include "cfo/errors.hpp"

namespace cfo {

Field as_field(const VectorField& model) {
    return [&model](double t, const Eigen::VectorXd& u) -> Eigen::VectorXd {
        return model.forward(t, u);
    };
}

StepMap as_step_map(const VectorField& model) {
    return [&model](const Eigen::VectorXd& u) -> Eigen::VectorXd { return model.forward(0.0, u); };
}

Field stacked_field(const VectorField& model, Eigen::Index n) {
    const auto d = static_cast<Eigen::Index>(model.config().state_dim);
    return [&model, d, n](double t, const Eigen::VectorXd& u) -> Eigen::VectorXd {
        if (u.size() != d * n) {
            throw InvalidArgument("stacked field: state size mismatch");
        }
        const Eigen::Map<const Eigen::MatrixXd> um(u.data(), d, n);
        Eigen::MatrixXd out = model.forward_batch(t, um);
        return Eigen::Map<const Eigen::VectorXd>(out.data(), d * n);
    };
}

Field stacked_field(Field f, Eigen::Index d, Eigen::Index n) {
    return [f = std::move(f), d, n](double t, const Eigen::VectorXd& u) -> Eigen::VectorXd {
        if (u.size() != d * n) {
            throw InvalidArgument("stacked field: state size mismatch");
        }
        Eigen::VectorXd out(d * n);
        for (Eigen::Index k = 0; k < n; ++k) {
            out.segment(k * d, d) = f(t, u.segment(k * d, d));
        }
        return out;
    };
}

namespace {

// Pads a partial rollout with its last finite state so metrics stay defined.
Eigen::MatrixXd pad_partial(const RolloutResult& partial, const Eigen::VectorXd& u0,
                            std::size_t n_times) {
    Eigen::MatrixXd m(u0.size(), static_cast<Eigen::Index>(n_times));
    Eigen::VectorXd last = u0;
    for (std::size_t j = 0; j < n_times; ++j) {
        if (j < partial.states.size() && partial.states[j].allFinite()) {
            last = partial.states[j];
        }
        m.col(static_cast<Eigen::Index>(j)) = last;
    }
    return m;
}

// Groups trajectory indices by grid so that each group can be integrated as one stacked state.
std::vector<std::vector<std::size_t>> group_by_grid(const TrajectorySet& set) {
    std::vector<std::vector<std::size_t>> groups;
    std::vector<const TimeGrid*> keys;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& g = set.trajectories[i].grid;
        std::size_t k = 0;
        for (; k < keys.size(); ++k) {
            if (*keys[k] == g) {
                break;
            }
        }
        if (k == keys.size()) {
            keys.push_back(&g);
            groups.emplace_back();
        }
        groups[k].push_back(i);
    }
    return groups;
}

SetRollout rollout_individually(const Field& field, const TrajectorySet& set,
                                const std::vector<std::size_t>& members,
                                const SolverConfig& solver, SetRollout& out) {
    for (auto i : members) {
        const auto& tr = set.trajectories[i];
        const Eigen::VectorXd u0 = tr.states.col(0);
        try {
            auto r = rollout(field, u0, tr.grid.times(), solver);
            out.nfe = r.nfe;
            out.predictions[i] = r.matrix();
        } catch (const Diverged& e) {
            ++out.diverged;
            out.nfe = (tr.size() - 1) * solver.substeps_per_interval *
                      static_cast<std::size_t>(stages(solver.method));
            out.predictions[i] = pad_partial(e.partial(), u0, tr.size());
        }
    }
    return out;
}

} // namespace

SetRollout rollout_set(const VectorField& model, const TrajectorySet& set,
                       const SolverConfig& solver) {
    SetRollout out;
    out.predictions.resize(set.size());
    const auto d = static_cast<Eigen::Index>(set.state_dim);
    if (static_cast<std::size_t>(d) != model.config().state_dim) {
        throw InvalidArgument("rollout_set: model state_dim " +
                              std::to_string(model.config().state_dim) + " != dataset state_dim " +
                              std::to_string(set.state_dim));
    }
    for (const auto& members : group_by_grid(set)) {
        const auto n = static_cast<Eigen::Index>(members.size());
        Eigen::VectorXd u0(d * n);
        for (Eigen::Index k = 0; k < n; ++k) {
            u0.segment(k * d, d) = set.trajectories[members[static_cast<std::size_t>(k)]].states.col(0);
        }
        const Field stacked = stacked_field(model, n);
        SolverConfig batched = solver;
        batched.divergence_bound = solver.divergence_bound * std::sqrt(static_cast<double>(n));
        const auto& grid = set.trajectories[members.front()].grid;
        try {
            const auto r = rollout(stacked, u0, grid.times(), batched);
            out.nfe = r.nfe;
            for (Eigen::Index k = 0; k < n; ++k) {
                Eigen::MatrixXd m(d, static_cast<Eigen::Index>(grid.size()));
                for (std::size_t j = 0; j < grid.size(); ++j) {
                    m.col(static_cast<Eigen::Index>(j)) = r.states[j].segment(k * d, d);
                }
                out.predictions[members[static_cast<std::size_t>(k)]] = std::move(m);
            }
        } catch (const NumericError&) {
            rollout_individually(as_field(model), set, members, solver, out);
        }
    }
    return out;
}

SetRollout rollout_set(const Field& field, const TrajectorySet& set, const SolverConfig& solver) {
    SetRollout out;
    out.predictions.resize(set.size());
    std::vector<std::size_t> all(set.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    rollout_individually(field, set, all, solver, out);
    return out;
}

SetRollout ar_rollout_set(const VectorField& model, const TrajectorySet& set) {
    SetRollout out;
    out.predictions.resize(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& tr = set.trajectories[i];
        try {
            auto r = ar_rollout(as_step_map(model), tr.states.col(0), tr.size() - 1);
            out.nfe = r.nfe;
            out.predictions[i] = r.matrix();
        } catch (const NumericError& e) {
            ++out.diverged;
            out.nfe = tr.size() - 1;
            const auto* div = dynamic_cast<const Diverged*>(&e);
            out.predictions[i] = pad_partial(div ? div->partial() : RolloutResult{},
                                             tr.states.col(0), tr.size());
        }
    }
    return out;
}

namespace {
EvalReport report_for(const SetRollout& r, const TrajectorySet& set) {
    std::vector<Eigen::MatrixXd> truths;
    truths.reserve(set.size());
    for (const auto& tr : set.trajectories) {
        truths.push_back(tr.states);
    }
    return make_report(r.predictions, truths, r.nfe);
}
} // namespace

EvalReport evaluate(const VectorField& model, const TrajectorySet& set, const SolverConfig& solver) {
    return report_for(rollout_set(model, set, solver), set);
}

EvalReport evaluate(const Field& field, const TrajectorySet& set, const SolverConfig& solver) {
    return report_for(rollout_set(field, set, solver), set);
}

EvalReport evaluate_ar(const VectorField& model, const TrajectorySet& set) {
    return report_for(ar_rollout_set(model, set), set);
}

} // namespace cfo
