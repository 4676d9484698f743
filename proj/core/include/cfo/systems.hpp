#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cfo/odeint.hpp"
#include "cfo/timegrid.hpp"

namespace cfo {

/// A collection of trajectories of one system. Grids may differ per
/// trajectory (after subsampling) but share the raw horizon.
struct TrajectorySet {
    std::string system;  // "lorenz", "burgers1d", ...
    std::size_t state_dim = 0;
    double raw_horizon = 1.0;
    std::vector<Trajectory> trajectories;
    /// Generator settings (seed, substeps, viscosity, ...) kept for provenance.
    std::map<std::string, double> metadata;

    [[nodiscard]] std::size_t size() const noexcept { return trajectories.size(); }
    void validate() const;

    /// Trajectories [first, first + count).
    [[nodiscard]] TrajectorySet slice(std::size_t first, std::size_t count) const;
    /// Per-trajectory random subsample; trajectory i uses seed (seed, i).
    [[nodiscard]] TrajectorySet subsampled(double keep_rate, std::uint64_t seed) const;
    /// Every `stride`-th knot (requires (n-1) % stride == 0).
    [[nodiscard]] TrajectorySet strided(std::size_t stride) const;
};

/// Seed for trajectory `index` derived from a base seed.
[[nodiscard]] std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

// --- Lorenz-63 -----------------------------------------------------------

struct LorenzParams {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
};

[[nodiscard]] Eigen::VectorXd lorenz_rhs(const Eigen::VectorXd& state, const LorenzParams& p = {});

/// The Lorenz field expressed in normalised time t = t_raw / horizon.
[[nodiscard]] Field lorenz_field(double raw_horizon, const LorenzParams& p = {});

struct LorenzGenConfig {
    std::size_t n_traj = 1;
    std::size_t n_times = 1001;
    double horizon_seconds = 5.0;
    double init_box = 5.0;
    std::size_t substeps = 10;  // RK4 steps per output interval
    std::uint64_t seed = 0;
};

[[nodiscard]] TrajectorySet generate_lorenz(const LorenzGenConfig& cfg);

// --- 1D periodic viscous Burgers -----------------------------------------

struct BurgersConfig {
    double nu = 0.01;
    std::size_t nx = 100;
    bool advection = true;  // off only in tests of the diffusion term

    void validate() const;
    [[nodiscard]] double dx() const noexcept { return 1.0 / static_cast<double>(nx); }
};

/// nu * central Laplacian - central difference of the flux u^2/2, periodic.
[[nodiscard]] Eigen::VectorXd burgers_rhs(const Eigen::VectorXd& u, const BurgersConfig& cfg);

/// Real periodic Gaussian random field on nx points with covariance
/// 25^2 (-Laplacian + 25 I)^-4: Fourier mode k carries variance
/// 25^2 ((2 pi k)^2 + 25)^-4. Modes |k| < nx/2 are synthesised.
[[nodiscard]] Eigen::VectorXd sample_grf_initial(std::size_t nx, std::uint64_t seed);

/// Closed-form variance of Fourier mode k of sample_grf_initial.
[[nodiscard]] double grf_mode_variance(int k);

struct BurgersGenConfig {
    BurgersConfig pde;
    std::size_t n_traj = 1;
    std::size_t n_times = 101;
    double horizon_seconds = 1.0;
    std::size_t substeps = 0;  // 0 = smallest count meeting h <= 0.5 dx^2 / nu
    std::uint64_t seed = 0;
};

[[nodiscard]] std::size_t burgers_stable_substeps(const BurgersConfig& pde, double interval);
[[nodiscard]] TrajectorySet generate_burgers(const BurgersGenConfig& cfg);

/// The true right-hand side of the system that produced `set`, in normalised
/// time, rebuilt from its metadata.
[[nodiscard]] Field analytic_field(const TrajectorySet& set);

} // namespace cfo
