#include "cfo/odeint.hpp"

#include <array>
#include <cmath>
#include <string>

namespace cfo {

const char* to_string(Method m) {
    switch (m) {
    case Method::Euler:
        return "euler";
    case Method::Heun:
        return "heun";
    case Method::Rk4:
        return "rk4";
    }
    return "?";
}

Method method_from_string(std::string_view name) {
    if (name == "euler") {
        return Method::Euler;
    }
    if (name == "heun") {
        return Method::Heun;
    }
    if (name == "rk4") {
        return Method::Rk4;
    }
    throw InvalidArgument("unknown solver '" + std::string(name) + "'");
}

int stages(Method m) noexcept {
    switch (m) {
    case Method::Euler:
        return 1;
    case Method::Heun:
        return 2;
    case Method::Rk4:
        return 4;
    }
    return 0;
}

Eigen::MatrixXd RolloutResult::matrix() const {
    if (states.empty()) {
        return {};
    }
    Eigen::MatrixXd m(states.front().size(), static_cast<Eigen::Index>(states.size()));
    for (std::size_t i = 0; i < states.size(); ++i) {
        m.col(static_cast<Eigen::Index>(i)) = states[i];
    }
    return m;
}

Eigen::VectorXd step(Method method, const Field& f, double t, const Eigen::VectorXd& u, double h) {
    if (h == 0.0) {
        throw InvalidArgument("step: zero step size");
    }
    if (!u.allFinite()) {
        throw NumericError("step: non-finite state");
    }
    switch (method) {
    case Method::Euler:
        return u + h * f(t, u);
    case Method::Heun: {
        const Eigen::VectorXd k1 = f(t, u);
        const Eigen::VectorXd k2 = f(t + h, u + h * k1);
        return u + (0.5 * h) * (k1 + k2);
    }
    case Method::Rk4: {
        const Eigen::VectorXd k1 = f(t, u);
        const Eigen::VectorXd k2 = f(t + 0.5 * h, u + (0.5 * h) * k1);
        const Eigen::VectorXd k3 = f(t + 0.5 * h, u + (0.5 * h) * k2);
        const Eigen::VectorXd k4 = f(t + h, u + h * k3);
        return u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    }
    throw InvalidArgument("step: unknown method");
}

namespace {

void check_bound(const Eigen::VectorXd& u, double bound, double t, RolloutResult& partial) {
    if (!u.allFinite() || u.norm() > bound) {
        throw Diverged("rollout diverged at t=" + std::to_string(t) + " (|u| > " +
                           std::to_string(bound) + ")",
                       std::move(partial));
    }
}

// Shared by the forward and reverse drivers: times are visited in order.
RolloutResult drive(const Field& f, const Eigen::VectorXd& u0, std::span<const double> times,
                    const SolverConfig& solver) {
    if (solver.substeps_per_interval == 0) {
        throw InvalidArgument("rollout: substeps_per_interval must be positive");
    }
    if (!u0.allFinite()) {
        throw InvalidArgument("rollout: non-finite initial state");
    }
    RolloutResult r;
    r.times.assign(times.begin(), times.end());
    r.states.reserve(times.size());
    r.states.push_back(u0);
    const auto n_sub = solver.substeps_per_interval;
    const auto per_step = static_cast<std::size_t>(stages(solver.method));
    Eigen::VectorXd u = u0;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        const double t0 = times[k];
        const double h = (times[k + 1] - t0) / static_cast<double>(n_sub);
        for (std::size_t s = 0; s < n_sub; ++s) {
            u = step(solver.method, f, t0 + static_cast<double>(s) * h, u, h);
            r.nfe += per_step;
            check_bound(u, solver.divergence_bound, t0 + static_cast<double>(s + 1) * h, r);
        }
        r.states.push_back(u);
    }
    return r;
}

} // namespace

RolloutResult rollout(const Field& f, const Eigen::VectorXd& u0, std::span<const double> eval_times,
                      const SolverConfig& solver) {
    if (eval_times.empty()) {
        throw InvalidArgument("rollout: no evaluation times");
    }
    for (std::size_t i = 1; i < eval_times.size(); ++i) {
        if (!(eval_times[i] > eval_times[i - 1])) {
            throw InvalidArgument("rollout: evaluation times must be increasing");
        }
    }
    return drive(f, u0, eval_times, solver);
}

RolloutResult rollout_reverse(const Field& f, const Eigen::VectorXd& u_star, double t_star,
                              std::span<const double> target_times, const SolverConfig& solver) {
    std::vector<double> times;
    times.reserve(target_times.size() + 1);
    times.push_back(t_star);
    for (double s : target_times) {
        if (s < 0.0 || s > t_star) {
            throw InvalidArgument("rollout_reverse: target times must lie in [0, t_star]");
        }
        if (!(s < times.back())) {
            throw InvalidArgument("rollout_reverse: target times must be strictly decreasing");
        }
        times.push_back(s);
    }
    return drive(f, u_star, times, solver);
}

RolloutResult integrate_fixed(const Field& f, const Eigen::VectorXd& u0, double t0, double t1,
                              std::size_t n_steps, Method method, double divergence_bound) {
    if (n_steps == 0) {
        throw InvalidArgument("integrate_fixed: need at least one step");
    }
    const std::array<double, 2> ends{t0, t1};
    return drive(f, u0, ends, SolverConfig{method, n_steps, divergence_bound});
}

RolloutResult ar_rollout(const StepMap& model, const Eigen::VectorXd& u0, std::size_t n_steps,
                         double divergence_bound) {
    RolloutResult r;
    r.times.push_back(0.0);
    r.states.push_back(u0);
    Eigen::VectorXd u = u0;
    for (std::size_t i = 0; i < n_steps; ++i) {
        u = model(u);
        ++r.nfe;
        r.times.push_back(static_cast<double>(i + 1) / static_cast<double>(n_steps));
        check_bound(u, divergence_bound, r.times.back(), r);
        r.states.push_back(u);
    }
    return r;
}

} // namespace cfo
