#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace cfo {

/// Strictly increasing sample times normalised to [0,1].
///
/// `raw_horizon` keeps the physical length T (seconds) of the original
/// interval so that vector fields can be converted back to physical time
/// units: d/dt_normalised = T * d/dt_raw.
class TimeGrid {
public:
    TimeGrid() = default;

    /// Takes already-normalised times. Requires times.front()==0,
    /// times.back()==1, strictly increasing, at least two points.
    explicit TimeGrid(std::vector<double> times, double raw_horizon = 1.0);

    /// Normalises raw times (starting at 0) by their final value.
    static TimeGrid from_raw(std::span<const double> raw_times);

    static TimeGrid uniform(std::size_t n_points, double raw_horizon = 1.0);

    [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
    [[nodiscard]] std::size_t segments() const noexcept { return times_.size() - 1; }
    [[nodiscard]] double operator[](std::size_t i) const { return times_[i]; }
    [[nodiscard]] std::span<const double> times() const noexcept { return times_; }
    [[nodiscard]] double raw_horizon() const noexcept { return raw_horizon_; }
    [[nodiscard]] double step(std::size_t i) const { return times_[i + 1] - times_[i]; }
    [[nodiscard]] double max_step() const;

    /// True when all steps agree with the mean step to `rel_tol`.
    [[nodiscard]] bool is_uniform(double rel_tol = 1e-9) const;

    /// Index i of the segment [t_i, t_{i+1}) holding t; t == 1 maps to the
    /// last segment. Throws OutOfRange outside [0,1].
    [[nodiscard]] std::size_t segment_of(double t) const;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    std::vector<double> times_;
    double raw_horizon_ = 1.0;
};

/// Random subset of a grid keeping both endpoints. The interior points are
/// drawn uniformly without replacement so that the total count is
/// round(keep_rate * size) (half rounds up). Deterministic for a given seed.
[[nodiscard]] TimeGrid subsample(const TimeGrid& grid, double keep_rate, std::uint64_t seed);

/// Indices into `grid` of the times kept by subsample(); shares its rng path.
[[nodiscard]] std::vector<std::size_t> subsample_indices(const TimeGrid& grid, double keep_rate,
                                                         std::uint64_t seed);

/// Snapshots of one trajectory: column i of `states` is u(t_i).
struct Trajectory {
    TimeGrid grid;
    Eigen::MatrixXd states;  // state_dim x grid.size()

    [[nodiscard]] std::size_t state_dim() const noexcept {
        return static_cast<std::size_t>(states.rows());
    }
    [[nodiscard]] std::size_t size() const noexcept { return grid.size(); }

    /// Keeps the listed columns (and their times, renormalisation not needed
    /// since endpoints must be included).
    [[nodiscard]] Trajectory select(std::span<const std::size_t> indices) const;

    /// Checks states.cols() == grid.size() and that all entries are finite.
    void validate() const;
};

} // namespace cfo
