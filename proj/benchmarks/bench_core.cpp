#include <benchmark/benchmark.h>

#include <random>

#include "cfo/evaluate.hpp"
#include "cfo/interpolant.hpp"
#include "cfo/odeint.hpp"
#include "cfo/spline.hpp"
#include "cfo/stencil.hpp"
#include "cfo/systems.hpp"
#include "cfo/trainer.hpp"

namespace {

const cfo::TrajectorySet& lorenz() {
    static const cfo::TrajectorySet set = [] {
        cfo::LorenzGenConfig g;
        g.n_traj = 16;
        g.n_times = 201;
        g.seed = 3;
        return cfo::generate_lorenz(g);
    }();
    return set;
}

cfo::VectorField lorenz_model() {
    cfo::MlpConfig m;
    m.state_dim = 3;
    return cfo::VectorField::init(m, 1);
}

void BM_FdWeights(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> nodes(n);
    for (std::size_t i = 0; i < n; ++i) {
        nodes[i] = static_cast<double>(i) + 0.1 * static_cast<double>(i * i % 3);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(cfo::fd_weights(nodes, n / 2, 2));
    }
}
BENCHMARK(BM_FdWeights)->Arg(3)->Arg(5)->Arg(7);

void BM_QuinticBuild(benchmark::State& state) {
    const auto& tr = lorenz().trajectories.front();
    for (auto _ : state) {
        benchmark::DoNotOptimize(cfo::QuinticSpline(tr));
    }
}
BENCHMARK(BM_QuinticBuild);

void BM_SplineVelocity(benchmark::State& state) {
    const auto kind = state.range(0) == 0 ? cfo::SplineKind::Linear : cfo::SplineKind::Quintic;
    const auto s = cfo::build_spline(kind, lorenz().trajectories.front());
    double t = 0.0;
    for (auto _ : state) {
        t = t + 0.618034 > 1.0 ? t - 0.381966 : t + 0.618034;
        benchmark::DoNotOptimize(s->velocity(t));
    }
    state.SetLabel(cfo::to_string(kind));
}
BENCHMARK(BM_SplineVelocity)->Arg(0)->Arg(1);

void BM_SampleBatch(benchmark::State& state) {
    std::vector<std::unique_ptr<cfo::Spline>> splines;
    for (const auto& tr : lorenz().trajectories) {
        splines.push_back(cfo::build_spline(cfo::SplineKind::Quintic, tr));
    }
    cfo::Rng rng(5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cfo::sample_batch(splines, {1e-5, 3}, 256, rng));
    }
}
BENCHMARK(BM_SampleBatch);

void BM_LossAndGrad(benchmark::State& state) {
    const auto model = lorenz_model();
    std::vector<std::unique_ptr<cfo::Spline>> splines;
    for (const auto& tr : lorenz().trajectories) {
        splines.push_back(cfo::build_spline(cfo::SplineKind::Quintic, tr));
    }
    cfo::Rng rng(5);
    const auto batch = cfo::sample_batch(splines, {1e-5, 3}, static_cast<std::size_t>(state.range(0)), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.loss_and_grad(batch));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LossAndGrad)->Arg(64)->Arg(256);

void BM_Rk4StepLorenz(benchmark::State& state) {
    const auto f = cfo::lorenz_field(5.0);
    Eigen::VectorXd u = Eigen::Vector3d(1.0, 2.0, 20.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cfo::step(cfo::Method::Rk4, f, 0.0, u, 1e-4));
    }
}
BENCHMARK(BM_Rk4StepLorenz);

void BM_RolloutModel(benchmark::State& state) {
    const auto model = lorenz_model();
    const auto& tr = lorenz().trajectories.front();
    const auto f = cfo::as_field(model);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cfo::rollout(f, tr.states.col(0), tr.grid.times(), cfo::SolverConfig{}));
    }
}
BENCHMARK(BM_RolloutModel);

void BM_EvaluateStacked(benchmark::State& state) {
    const auto model = lorenz_model();
    for (auto _ : state) {
        benchmark::DoNotOptimize(cfo::evaluate(model, lorenz(), cfo::SolverConfig{}));
    }
}
BENCHMARK(BM_EvaluateStacked);

} // namespace

BENCHMARK_MAIN();
