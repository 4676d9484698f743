#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <string_view>
#include <utility>

#include <Eigen/Core>

#include "cfo/stencil.hpp"
#include "cfo/timegrid.hpp"

namespace cfo {

enum class SplineKind { Linear, Quintic };

[[nodiscard]] const char* to_string(SplineKind kind);
[[nodiscard]] SplineKind spline_kind_from_string(std::string_view name);

/// Quintic Hermite basis on tau in [0,1], ordered
/// {H00, H10, H20, H01, H11, H21}, plus first and second tau-derivatives.
namespace hermite {
[[nodiscard]] std::array<double, 6> basis(double tau);
[[nodiscard]] std::array<double, 6> basis_d1(double tau);
[[nodiscard]] std::array<double, 6> basis_d2(double tau);
} // namespace hermite

/// Value and first time derivative of a path at one time.
struct PathPoint {
    Eigen::VectorXd value;
    Eigen::VectorXd velocity;
};

/// Piecewise-polynomial interpolant through one trajectory's snapshots.
///
/// Segments are half-open [t_i, t_{i+1}); t == 1 belongs to the last one.
/// Times outside [0,1] throw OutOfRange.
class Spline {
public:
    virtual ~Spline() = default;

    [[nodiscard]] virtual SplineKind kind() const noexcept = 0;
    [[nodiscard]] const TimeGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t state_dim() const noexcept {
        return static_cast<std::size_t>(values_.rows());
    }
    [[nodiscard]] const Eigen::MatrixXd& values() const noexcept { return values_; }

    [[nodiscard]] Eigen::VectorXd value(double t) const;
    [[nodiscard]] Eigen::VectorXd velocity(double t) const;
    [[nodiscard]] PathPoint path(double t) const;

    /// Evaluation restricted to segment `seg` at local coordinate tau in [0,1];
    /// used to read one-sided limits at knots.
    [[nodiscard]] virtual Eigen::VectorXd value_on_segment(std::size_t seg, double tau) const = 0;
    [[nodiscard]] virtual Eigen::VectorXd velocity_on_segment(std::size_t seg, double tau) const = 0;

protected:
    Spline(TimeGrid grid, Eigen::MatrixXd values);

    [[nodiscard]] std::pair<std::size_t, double> locate(double t) const;

    TimeGrid grid_;
    Eigen::MatrixXd values_;
};

/// C0 piecewise-linear interpolant; velocity is the segment secant slope.
class LinearSpline final : public Spline {
public:
    explicit LinearSpline(const Trajectory& traj);

    [[nodiscard]] SplineKind kind() const noexcept override { return SplineKind::Linear; }
    [[nodiscard]] Eigen::VectorXd value_on_segment(std::size_t seg, double tau) const override;
    [[nodiscard]] Eigen::VectorXd velocity_on_segment(std::size_t seg, double tau) const override;
};

/// C2 piecewise quintic Hermite interpolant matching values, first and
/// second derivatives at every knot.
class QuinticSpline final : public Spline {
public:
    /// Derivatives estimated with estimate_knot_derivatives (needs >= 3 knots).
    explicit QuinticSpline(const Trajectory& traj);
    /// Caller-supplied knot derivatives (>= 2 knots).
    QuinticSpline(const Trajectory& traj, KnotDerivatives derivs);

    [[nodiscard]] SplineKind kind() const noexcept override { return SplineKind::Quintic; }
    [[nodiscard]] const KnotDerivatives& derivatives() const noexcept { return derivs_; }

    [[nodiscard]] Eigen::VectorXd acceleration(double t) const;

    [[nodiscard]] Eigen::VectorXd value_on_segment(std::size_t seg, double tau) const override;
    [[nodiscard]] Eigen::VectorXd velocity_on_segment(std::size_t seg, double tau) const override;
    [[nodiscard]] Eigen::VectorXd acceleration_on_segment(std::size_t seg, double tau) const;

private:
    [[nodiscard]] Eigen::VectorXd combine(std::size_t seg, const std::array<double, 6>& b,
                                          double scale) const;

    KnotDerivatives derivs_;
};

[[nodiscard]] std::unique_ptr<Spline> build_spline(SplineKind kind, const Trajectory& traj);

/// gamma(t) = gamma0 (t - t_k)^m (t_{k+1} - t)^m / h_k^{2m} on each segment.
struct NoiseSchedule {
    double gamma0 = 0.0;
    int m = 3;
};

struct NoiseValue {
    double gamma = 0.0;
    double dgamma = 0.0;  // d gamma / dt
};

[[nodiscard]] NoiseValue gamma(const NoiseSchedule& schedule, const TimeGrid& grid, double t);

} // namespace cfo
