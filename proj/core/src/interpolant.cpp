#include "cfo/interpolant.hpp"

#include <string>

#include "cfo/errors.hpp"

namespace cfo {

InterpolantSample InterpolantBatch::sample(std::size_t b) const {
    const auto i = static_cast<Eigen::Index>(b);
    return {t(i), x.col(i), v_target.col(i)};
}

InterpolantBatch InterpolantBatch::from_samples(std::span<const InterpolantSample> samples) {
    if (samples.empty()) {
        throw InvalidArgument("InterpolantBatch: empty sample list");
    }
    const auto d = samples.front().x.size();
    const auto n = static_cast<Eigen::Index>(samples.size());
    InterpolantBatch batch{Eigen::VectorXd(n), Eigen::MatrixXd(d, n), Eigen::MatrixXd(d, n)};
    for (Eigen::Index b = 0; b < n; ++b) {
        const auto& s = samples[static_cast<std::size_t>(b)];
        if (s.x.size() != d || s.v_target.size() != d) {
            throw InvalidArgument("InterpolantBatch: inconsistent state dimension");
        }
        batch.t(b) = s.t;
        batch.x.col(b) = s.x;
        batch.v_target.col(b) = s.v_target;
    }
    return batch;
}

InterpolantSample sample(const Spline& spline, const NoiseSchedule& schedule, double t,
                         const Eigen::VectorXd& z) {
    if (static_cast<std::size_t>(z.size()) != spline.state_dim()) {
        throw InvalidArgument("interpolant sample: noise dimension " + std::to_string(z.size()) +
                              " != state dimension " + std::to_string(spline.state_dim()));
    }
    auto p = spline.path(t);
    const auto g = gamma(schedule, spline.grid(), t);
    if (g.gamma != 0.0 || g.dgamma != 0.0) {
        p.value += g.gamma * z;
        p.velocity += g.dgamma * z;
    }
    return {t, std::move(p.value), std::move(p.velocity)};
}

InterpolantBatch sample_batch(std::span<const std::unique_ptr<Spline>> splines,
                              const NoiseSchedule& schedule, std::size_t batch_size, Rng& rng) {
    if (splines.empty()) {
        throw InvalidArgument("sample_batch: no trajectories to sample from");
    }
    if (batch_size == 0) {
        throw InvalidArgument("sample_batch: batch size must be positive");
    }
    const auto d = static_cast<Eigen::Index>(splines.front()->state_dim());
    const auto n = static_cast<Eigen::Index>(batch_size);
    InterpolantBatch batch{Eigen::VectorXd(n), Eigen::MatrixXd(d, n), Eigen::MatrixXd(d, n)};

    std::uniform_int_distribution<std::size_t> pick(0, splines.size() - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(d);

    for (Eigen::Index b = 0; b < n; ++b) {
        const Spline& s = *splines[pick(rng)];
        if (static_cast<Eigen::Index>(s.state_dim()) != d) {
            throw InvalidArgument("sample_batch: splines disagree on state dimension");
        }
        const double t = unif(rng);
        for (Eigen::Index k = 0; k < d; ++k) {
            z(k) = normal(rng);
        }
        auto smp = sample(s, schedule, t, z);
        batch.t(b) = t;
        batch.x.col(b) = smp.x;
        batch.v_target.col(b) = smp.v_target;
    }
    return batch;
}

} // namespace cfo
