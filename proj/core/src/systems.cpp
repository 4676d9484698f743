#include "cfo/systems.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "cfo/errors.hpp"

namespace cfo {

void TrajectorySet::validate() const {
    for (const auto& tr : trajectories) {
        tr.validate();
        if (tr.state_dim() != state_dim) {
            throw InvalidArgument("TrajectorySet: trajectory state dimension mismatch");
        }
    }
}

TrajectorySet TrajectorySet::slice(std::size_t first, std::size_t count) const {
    if (first + count > trajectories.size()) {
        throw InvalidArgument("TrajectorySet::slice: range exceeds set size");
    }
    TrajectorySet out{system, state_dim, raw_horizon, {}, metadata};
    out.trajectories.assign(trajectories.begin() + static_cast<std::ptrdiff_t>(first),
                            trajectories.begin() + static_cast<std::ptrdiff_t>(first + count));
    return out;
}

TrajectorySet TrajectorySet::subsampled(double keep_rate, std::uint64_t seed) const {
    TrajectorySet out{system, state_dim, raw_horizon, {}, metadata};
    out.metadata["keep_rate"] = keep_rate;
    out.trajectories.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        const auto& tr = trajectories[i];
        const auto idx = subsample_indices(tr.grid, keep_rate, substream_seed(seed, i));
        out.trajectories.push_back(tr.select(idx));
    }
    return out;
}

TrajectorySet TrajectorySet::strided(std::size_t stride) const {
    if (stride == 0) {
        throw InvalidArgument("strided: stride must be positive");
    }
    TrajectorySet out{system, state_dim, raw_horizon, {}, metadata};
    for (const auto& tr : trajectories) {
        if ((tr.size() - 1) % stride != 0) {
            throw InvalidArgument("strided: stride does not divide the interval count");
        }
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < tr.size(); i += stride) {
            idx.push_back(i);
        }
        out.trajectories.push_back(tr.select(idx));
    }
    return out;
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

Eigen::VectorXd lorenz_rhs(const Eigen::VectorXd& s, const LorenzParams& p) {
    if (s.size() != 3) {
        throw InvalidArgument("lorenz_rhs: state must have 3 components");
    }
    Eigen::VectorXd r(3);
    r(0) = p.sigma * (s(1) - s(0));
    r(1) = s(0) * (p.rho - s(2)) - s(1);
    r(2) = s(0) * s(1) - p.beta * s(2);
    return r;
}

Field lorenz_field(double raw_horizon, const LorenzParams& p) {
    return [raw_horizon, p](double, const Eigen::VectorXd& u) -> Eigen::VectorXd {
        return raw_horizon * lorenz_rhs(u, p);
    };
}

TrajectorySet generate_lorenz(const LorenzGenConfig& cfg) {
    if (cfg.n_times < 2) {
        throw InvalidArgument("generate_lorenz: n_times must be >= 2");
    }
    if (cfg.substeps == 0 || !(cfg.horizon_seconds > 0.0)) {
        throw InvalidArgument("generate_lorenz: substeps and horizon must be positive");
    }
    const TimeGrid grid = TimeGrid::uniform(cfg.n_times, cfg.horizon_seconds);
    const Field f = lorenz_field(cfg.horizon_seconds);
    const SolverConfig solver{Method::Rk4, cfg.substeps, 1e8};

    TrajectorySet set{"lorenz", 3, cfg.horizon_seconds, {}, {}};
    set.metadata = {{"seed", static_cast<double>(cfg.seed)},
                    {"generator_substeps", static_cast<double>(cfg.substeps)},
                    {"init_box", cfg.init_box},
                    {"sigma", 10.0},
                    {"rho", 28.0},
                    {"beta", 8.0 / 3.0}};
    set.trajectories.reserve(cfg.n_traj);
    for (std::size_t i = 0; i < cfg.n_traj; ++i) {
        std::mt19937_64 rng(substream_seed(cfg.seed, i));
        std::uniform_real_distribution<double> box(-cfg.init_box, cfg.init_box);
        for (int attempt = 0;; ++attempt) {
            Eigen::VectorXd u0(3);
            for (int k = 0; k < 3; ++k) {
                u0(k) = box(rng);
            }
            try {
                auto r = rollout(f, u0, grid.times(), solver);
                set.trajectories.push_back({grid, r.matrix()});
                break;
            } catch (const Diverged&) {
                if (attempt > 10) {
                    throw;
                }
            }
        }
    }
    return set;
}

void BurgersConfig::validate() const {
    if (!(nu > 0.0)) {
        throw InvalidArgument("BurgersConfig: viscosity must be positive");
    }
    if (nx < 16) {
        throw InvalidArgument("BurgersConfig: nx must be >= 16");
    }
}

Eigen::VectorXd burgers_rhs(const Eigen::VectorXd& u, const BurgersConfig& cfg) {
    const auto n = static_cast<Eigen::Index>(cfg.nx);
    if (u.size() != n) {
        throw InvalidArgument("burgers_rhs: state size does not match nx");
    }
    const double dx = cfg.dx();
    const double diff = cfg.nu / (dx * dx);
    const double adv = cfg.advection ? 1.0 / (4.0 * dx) : 0.0;  // (F+ - F-)/(2dx), F = u^2/2
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double um = u((i + n - 1) % n);
        const double up = u((i + 1) % n);
        r(i) = diff * (up - 2.0 * u(i) + um) - adv * (up * up - um * um);
    }
    return r;
}

double grf_mode_variance(int k) {
    const double w = 2.0 * std::numbers::pi * k;
    return 625.0 * std::pow(w * w + 25.0, -4.0);
}

Eigen::VectorXd sample_grf_initial(std::size_t nx, std::uint64_t seed) {
    if (nx < 16) {
        throw InvalidArgument("sample_grf_initial: nx must be >= 16");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto n = static_cast<Eigen::Index>(nx);
    const int k_max = static_cast<int>((nx - 1) / 2);

    Eigen::VectorXd u = Eigen::VectorXd::Constant(n, std::sqrt(grf_mode_variance(0)) * normal(rng));
    for (int k = 1; k <= k_max; ++k) {
        const double s = std::sqrt(0.5 * grf_mode_variance(k));
        const std::complex<double> xi(s * normal(rng), s * normal(rng));
        for (Eigen::Index j = 0; j < n; ++j) {
            const double phase = 2.0 * std::numbers::pi * k * static_cast<double>(j) /
                                 static_cast<double>(nx);
            // xi e^{i phase} + conj(xi) e^{-i phase}
            u(j) += 2.0 * (xi.real() * std::cos(phase) - xi.imag() * std::sin(phase));
        }
    }
    return u;
}

std::size_t burgers_stable_substeps(const BurgersConfig& pde, double interval) {
    const double h_max = 0.5 * pde.dx() * pde.dx() / pde.nu;
    return static_cast<std::size_t>(std::ceil(interval / h_max - 1e-12));
}

TrajectorySet generate_burgers(const BurgersGenConfig& cfg) {
    cfg.pde.validate();
    if (cfg.n_times < 2) {
        throw InvalidArgument("generate_burgers: n_times must be >= 2");
    }
    const TimeGrid grid = TimeGrid::uniform(cfg.n_times, cfg.horizon_seconds);
    const double interval = cfg.horizon_seconds / static_cast<double>(cfg.n_times - 1);
    const std::size_t required = burgers_stable_substeps(cfg.pde, interval);
    const std::size_t substeps = cfg.substeps == 0 ? required : cfg.substeps;

    const double T = cfg.horizon_seconds;
    const BurgersConfig pde = cfg.pde;
    const Field f = [T, pde](double, const Eigen::VectorXd& u) -> Eigen::VectorXd {
        return T * burgers_rhs(u, pde);
    };
    const SolverConfig solver{Method::Rk4, substeps, 1e8};

    TrajectorySet set{"burgers1d", cfg.pde.nx, T, {}, {}};
    set.metadata = {{"seed", static_cast<double>(cfg.seed)},
                    {"generator_substeps", static_cast<double>(substeps)},
                    {"nu", cfg.pde.nu},
                    {"nx", static_cast<double>(cfg.pde.nx)}};
    set.trajectories.reserve(cfg.n_traj);
    for (std::size_t i = 0; i < cfg.n_traj; ++i) {
        const Eigen::VectorXd u0 = sample_grf_initial(cfg.pde.nx, substream_seed(cfg.seed, i));
        try {
            auto r = rollout(f, u0, grid.times(), solver);
            set.trajectories.push_back({grid, r.matrix()});
        } catch (const Diverged& e) {
            throw InvalidArgument(std::string("generate_burgers: unstable with ") +
                                  std::to_string(substeps) + " substeps per interval; at least " +
                                  std::to_string(required) + " are required (" + e.what() + ")");
        }
    }
    return set;
}

namespace {
double meta_or(const TrajectorySet& set, const std::string& key, double fallback) {
    const auto it = set.metadata.find(key);
    return it == set.metadata.end() ? fallback : it->second;
}
} // namespace

Field analytic_field(const TrajectorySet& set) {
    if (set.system == "lorenz") {
        const LorenzParams p{meta_or(set, "sigma", 10.0), meta_or(set, "rho", 28.0),
                             meta_or(set, "beta", 8.0 / 3.0)};
        return lorenz_field(set.raw_horizon, p);
    }
    if (set.system == "burgers1d") {
        BurgersConfig pde;
        pde.nu = meta_or(set, "nu", pde.nu);
        pde.nx = set.state_dim;
        pde.validate();
        const double T = set.raw_horizon;
        return [pde, T](double, const Eigen::VectorXd& u) -> Eigen::VectorXd {
            return T * burgers_rhs(u, pde);
        };
    }
    throw InvalidArgument("no analytic field for system '" + set.system + "'");
}

} // namespace cfo
