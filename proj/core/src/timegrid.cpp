#include "cfo/timegrid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "cfo/errors.hpp"

namespace cfo {

TimeGrid::TimeGrid(std::vector<double> times, double raw_horizon)
    : times_(std::move(times)), raw_horizon_(raw_horizon) {
    if (times_.size() < 2) {
        throw InvalidArgument("TimeGrid: need at least two time points");
    }
    if (!(raw_horizon_ > 0.0) || !std::isfinite(raw_horizon_)) {
        throw InvalidArgument("TimeGrid: raw horizon must be positive and finite");
    }
    if (times_.front() != 0.0 || times_.back() != 1.0) {
        throw InvalidArgument("TimeGrid: normalised times must start at 0 and end at 1");
    }
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1])) {
            throw InvalidArgument("TimeGrid: times must be strictly increasing (index " +
                                  std::to_string(i) + ")");
        }
    }
}

TimeGrid TimeGrid::from_raw(std::span<const double> raw_times) {
    if (raw_times.size() < 2) {
        throw InvalidArgument("TimeGrid::from_raw: need at least two time points");
    }
    if (raw_times.front() != 0.0) {
        throw InvalidArgument("TimeGrid::from_raw: raw times must start at 0");
    }
    const double horizon = raw_times.back();
    if (!(horizon > 0.0)) {
        throw InvalidArgument("TimeGrid::from_raw: horizon must be positive");
    }
    std::vector<double> t(raw_times.size());
    std::transform(raw_times.begin(), raw_times.end(), t.begin(),
                   [horizon](double x) { return x / horizon; });
    t.back() = 1.0;
    return TimeGrid(std::move(t), horizon);
}

TimeGrid TimeGrid::uniform(std::size_t n_points, double raw_horizon) {
    if (n_points < 2) {
        throw InvalidArgument("uniform_grid: n_points must be >= 2");
    }
    std::vector<double> t(n_points);
    const double n = static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) {
        t[i] = static_cast<double>(i) / n;
    }
    return TimeGrid(std::move(t), raw_horizon);
}

double TimeGrid::max_step() const {
    double h = 0.0;
    for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
        h = std::max(h, step(i));
    }
    return h;
}

bool TimeGrid::is_uniform(double rel_tol) const {
    const double mean = 1.0 / static_cast<double>(segments());
    for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
        if (std::abs(step(i) - mean) > rel_tol * mean) {
            return false;
        }
    }
    return true;
}

std::size_t TimeGrid::segment_of(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw OutOfRange("time " + std::to_string(t) + " outside [0,1]");
    }
    // first knot strictly greater than t
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    auto idx = static_cast<std::size_t>(std::distance(times_.begin(), it));
    if (idx == 0) {
        return 0;
    }
    return std::min(idx - 1, segments() - 1);
}

std::vector<std::size_t> subsample_indices(const TimeGrid& grid, double keep_rate,
                                           std::uint64_t seed) {
    if (!(keep_rate > 0.0 && keep_rate <= 1.0)) {
        throw InvalidArgument("subsample: keep_rate must lie in (0,1]");
    }
    const std::size_t n = grid.size();
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (keep_rate == 1.0) {
        return all;
    }
    const auto target = static_cast<std::size_t>(std::floor(keep_rate * static_cast<double>(n) + 0.5));
    if (target < 3) {
        throw InvalidArgument("subsample: keep_rate " + std::to_string(keep_rate) + " leaves " +
                              std::to_string(target) + " points; at least 3 are required");
    }
    std::vector<std::size_t> interior(all.begin() + 1, all.end() - 1);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> picked;
    picked.reserve(target);
    std::sample(interior.begin(), interior.end(), std::back_inserter(picked), target - 2, rng);
    picked.push_back(0);
    picked.push_back(n - 1);
    std::sort(picked.begin(), picked.end());
    return picked;
}

TimeGrid subsample(const TimeGrid& grid, double keep_rate, std::uint64_t seed) {
    const auto idx = subsample_indices(grid, keep_rate, seed);
    std::vector<double> t(idx.size());
    std::transform(idx.begin(), idx.end(), t.begin(), [&](std::size_t i) { return grid[i]; });
    return TimeGrid(std::move(t), grid.raw_horizon());
}

Trajectory Trajectory::select(std::span<const std::size_t> indices) const {
    if (indices.size() < 2 || indices.front() != 0 || indices.back() != size() - 1) {
        throw InvalidArgument("Trajectory::select: indices must keep both endpoints");
    }
    std::vector<double> t(indices.size());
    Eigen::MatrixXd s(states.rows(), static_cast<Eigen::Index>(indices.size()));
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] >= size()) {
            throw InvalidArgument("Trajectory::select: index out of bounds");
        }
        t[k] = grid[indices[k]];
        s.col(static_cast<Eigen::Index>(k)) = states.col(static_cast<Eigen::Index>(indices[k]));
    }
    return Trajectory{TimeGrid(std::move(t), grid.raw_horizon()), std::move(s)};
}

void Trajectory::validate() const {
    if (static_cast<std::size_t>(states.cols()) != grid.size()) {
        throw InvalidArgument("Trajectory: snapshot count " + std::to_string(states.cols()) +
                              " does not match grid length " + std::to_string(grid.size()));
    }
    if (!states.allFinite()) {
        throw NumericError("Trajectory: non-finite state entries");
    }
}

} // namespace cfo
