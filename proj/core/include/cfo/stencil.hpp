#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cfo/timegrid.hpp"

namespace cfo {

/// Finite-difference weights for the order-`order` derivative at
/// nodes[center]: f^(k)(x_c) ~ sum_j weights[j] * f(nodes[j]).
struct StencilWeights {
    std::vector<double> nodes;  // absolute times, or offsets from the centre for the closed forms
    std::vector<double> weights;
    int order = 0;
    std::size_t center = 0;

    /// Applies the weights to samples taken at `nodes`.
    [[nodiscard]] double apply(std::span<const double> samples) const;
};

/// Weights on arbitrary distinct nodes from the shifted Vandermonde system
///   sum_j (x_j - x_c)^r w_j = k! delta_{rk},  r = 0..m,
/// solved by Gaussian elimination with partial pivoting.
/// Throws InvalidArgument when k > m or center is out of range and
/// SingularSystem on repeated nodes.
[[nodiscard]] StencilWeights fd_weights(std::span<const double> nodes, std::size_t center, int k);

/// Closed-form three-point first derivative at the middle of
/// (t_{i-1}, t_i, t_{i+1}) with steps h_prev = t_i - t_{i-1}, h_next = t_{i+1} - t_i.
/// Second-order accurate on irregular grids.
[[nodiscard]] StencilWeights first_derivative_3pt(double h_prev, double h_next);

/// Closed-form three-point second derivative; first-order on irregular
/// grids, second-order when h_prev == h_next.
[[nodiscard]] StencilWeights second_derivative_3pt(double h_prev, double h_next);

/// Estimated time derivatives at the knots of one trajectory.
/// Column i holds d_i ~ du/dt(t_i) and a_i ~ d2u/dt2(t_i), in normalised time.
struct KnotDerivatives {
    Eigen::MatrixXd d;
    Eigen::MatrixXd a;
};

/// Three-point stencils at interior knots, one-sided three-point stencils
/// (built with fd_weights) at the first and last knot.
[[nodiscard]] KnotDerivatives estimate_knot_derivatives(const Trajectory& traj);

} // namespace cfo
