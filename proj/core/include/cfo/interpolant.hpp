#pragma once

#include <cstddef>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cfo/spline.hpp"

namespace cfo {

/// One draw of the stochastic interpolant I(t) = s(t) + gamma(t) z and its
/// time derivative.
struct InterpolantSample {
    double t = 0.0;
    Eigen::VectorXd x;
    Eigen::VectorXd v_target;
};

/// A minibatch stored column-wise: column b of `x` / `v_target` belongs to t[b].
struct InterpolantBatch {
    Eigen::VectorXd t;
    Eigen::MatrixXd x;
    Eigen::MatrixXd v_target;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(t.size()); }
    [[nodiscard]] InterpolantSample sample(std::size_t b) const;
    [[nodiscard]] static InterpolantBatch from_samples(std::span<const InterpolantSample> samples);
};

using Rng = std::mt19937_64;

/// x = s(t) + gamma(t) z,  v_target = ds/dt(t) + gamma'(t) z.
[[nodiscard]] InterpolantSample sample(const Spline& spline, const NoiseSchedule& schedule, double t,
                                       const Eigen::VectorXd& z);

/// Draws `batch_size` independent (trajectory, t ~ U[0,1], z ~ N(0,I)) triples.
/// All splines must share one state dimension.
[[nodiscard]] InterpolantBatch sample_batch(std::span<const std::unique_ptr<Spline>> splines,
                                            const NoiseSchedule& schedule, std::size_t batch_size,
                                            Rng& rng);

} // namespace cfo
