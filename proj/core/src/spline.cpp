#include "cfo/spline.hpp"

#include <cmath>
#include <string>

#include "cfo/errors.hpp"

namespace cfo {

const char* to_string(SplineKind kind) {
    return kind == SplineKind::Linear ? "linear" : "quintic";
}

SplineKind spline_kind_from_string(std::string_view name) {
    if (name == "linear") {
        return SplineKind::Linear;
    }
    if (name == "quintic") {
        return SplineKind::Quintic;
    }
    throw InvalidArgument("unknown spline kind '" + std::string(name) + "'");
}

namespace hermite {

std::array<double, 6> basis(double t) {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    return {1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
            t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
            0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5),
            10.0 * t3 - 15.0 * t4 + 6.0 * t5,
            -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
            0.5 * (t3 - 2.0 * t4 + t5)};
}

std::array<double, 6> basis_d1(double t) {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
    return {-30.0 * t2 + 60.0 * t3 - 30.0 * t4,
            1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
            0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4),
            30.0 * t2 - 60.0 * t3 + 30.0 * t4,
            -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
            0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4)};
}

std::array<double, 6> basis_d2(double t) {
    const double t2 = t * t, t3 = t2 * t;
    return {-60.0 * t + 180.0 * t2 - 120.0 * t3,
            -36.0 * t + 96.0 * t2 - 60.0 * t3,
            0.5 * (2.0 - 18.0 * t + 36.0 * t2 - 20.0 * t3),
            60.0 * t - 180.0 * t2 + 120.0 * t3,
            -24.0 * t + 84.0 * t2 - 60.0 * t3,
            0.5 * (6.0 * t - 24.0 * t2 + 20.0 * t3)};
}

} // namespace hermite

Spline::Spline(TimeGrid grid, Eigen::MatrixXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {}

std::pair<std::size_t, double> Spline::locate(double t) const {
    const std::size_t seg = grid_.segment_of(t);
    const double tau = (t - grid_[seg]) / grid_.step(seg);
    return {seg, tau};
}

Eigen::VectorXd Spline::value(double t) const {
    const auto [seg, tau] = locate(t);
    return value_on_segment(seg, tau);
}

Eigen::VectorXd Spline::velocity(double t) const {
    const auto [seg, tau] = locate(t);
    return velocity_on_segment(seg, tau);
}

PathPoint Spline::path(double t) const {
    const auto [seg, tau] = locate(t);
    return {value_on_segment(seg, tau), velocity_on_segment(seg, tau)};
}

LinearSpline::LinearSpline(const Trajectory& traj) : Spline(traj.grid, traj.states) {
    traj.validate();
}

Eigen::VectorXd LinearSpline::value_on_segment(std::size_t seg, double tau) const {
    const auto i = static_cast<Eigen::Index>(seg);
    // Exact at both knots (tau == 0 and tau == 1).
    if (tau == 1.0) {
        return values_.col(i + 1);
    }
    return (1.0 - tau) * values_.col(i) + tau * values_.col(i + 1);
}

Eigen::VectorXd LinearSpline::velocity_on_segment(std::size_t seg, double /*tau*/) const {
    const auto i = static_cast<Eigen::Index>(seg);
    return (values_.col(i + 1) - values_.col(i)) / grid_.step(seg);
}

QuinticSpline::QuinticSpline(const Trajectory& traj)
    : QuinticSpline(traj, estimate_knot_derivatives(traj)) {}

QuinticSpline::QuinticSpline(const Trajectory& traj, KnotDerivatives derivs)
    : Spline(traj.grid, traj.states), derivs_(std::move(derivs)) {
    traj.validate();
    if (derivs_.d.rows() != values_.rows() || derivs_.d.cols() != values_.cols() ||
        derivs_.a.rows() != values_.rows() || derivs_.a.cols() != values_.cols()) {
        throw InvalidArgument("QuinticSpline: knot derivative shape does not match snapshots");
    }
}

Eigen::VectorXd QuinticSpline::combine(std::size_t seg, const std::array<double, 6>& b,
                                       double scale) const {
    const auto i = static_cast<Eigen::Index>(seg);
    const double h = grid_.step(seg);
    const double h2 = h * h;
    Eigen::VectorXd out = b[0] * values_.col(i) + (b[1] * h) * derivs_.d.col(i) +
                          (b[2] * h2) * derivs_.a.col(i) + b[3] * values_.col(i + 1) +
                          (b[4] * h) * derivs_.d.col(i + 1) + (b[5] * h2) * derivs_.a.col(i + 1);
    if (scale != 1.0) {
        out *= scale;
    }
    return out;
}

Eigen::VectorXd QuinticSpline::value_on_segment(std::size_t seg, double tau) const {
    if (tau == 0.0) {
        return values_.col(static_cast<Eigen::Index>(seg));
    }
    if (tau == 1.0) {
        return values_.col(static_cast<Eigen::Index>(seg + 1));
    }
    return combine(seg, hermite::basis(tau), 1.0);
}

Eigen::VectorXd QuinticSpline::velocity_on_segment(std::size_t seg, double tau) const {
    return combine(seg, hermite::basis_d1(tau), 1.0 / grid_.step(seg));
}

Eigen::VectorXd QuinticSpline::acceleration_on_segment(std::size_t seg, double tau) const {
    const double h = grid_.step(seg);
    return combine(seg, hermite::basis_d2(tau), 1.0 / (h * h));
}

Eigen::VectorXd QuinticSpline::acceleration(double t) const {
    const auto [seg, tau] = locate(t);
    return acceleration_on_segment(seg, tau);
}

std::unique_ptr<Spline> build_spline(SplineKind kind, const Trajectory& traj) {
    if (kind == SplineKind::Linear) {
        return std::make_unique<LinearSpline>(traj);
    }
    if (traj.size() < 3) {
        throw InvalidArgument("quintic spline needs at least 3 knots; use a linear spline");
    }
    return std::make_unique<QuinticSpline>(traj);
}

NoiseValue gamma(const NoiseSchedule& schedule, const TimeGrid& grid, double t) {
    if (schedule.m < 1) {
        throw InvalidArgument("noise schedule exponent m must be >= 1");
    }
    const std::size_t seg = grid.segment_of(t);
    if (schedule.gamma0 == 0.0) {
        return {};
    }
    const double h = grid.step(seg);
    const double p = (t - grid[seg]) / h;
    const double q = 1.0 - p;
    const int m = schedule.m;
    const double pm = std::pow(p, m);
    const double qm = std::pow(q, m);
    const double value = schedule.gamma0 * pm * qm;
    const double dvalue =
        schedule.gamma0 * m * (std::pow(p, m - 1) * qm - pm * std::pow(q, m - 1)) / h;
    return {value, dvalue};
}

} // namespace cfo
