#include "cfo/stencil.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "cfo/errors.hpp"

namespace cfo {

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) {
        f *= i;
    }
    return f;
}

// Solves A x = b in place (A is n x n, row-major in a flat vector).
std::vector<double> solve_partial_pivot(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * n + c]; };

    double scale = 0.0;
    for (double v : a) {
        scale = std::max(scale, std::abs(v));
    }
    const double tiny = scale * 1e-300 + 1e-300;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(at(r, col)) > std::abs(at(pivot, col))) {
                pivot = r;
            }
        }
        if (std::abs(at(pivot, col)) <= tiny) {
            throw SingularSystem("fd_weights: singular Vandermonde system");
        }
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(at(col, c), at(pivot, c));
            }
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = at(r, col) / at(col, col);
            if (factor == 0.0) {
                continue;
            }
            for (std::size_t c = col; c < n; ++c) {
                at(r, c) -= factor * at(col, c);
            }
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) {
            acc -= at(i, c) * x[c];
        }
        x[i] = acc / at(i, i);
    }
    return x;
}

void require_positive_steps(double h_prev, double h_next) {
    if (!(h_prev > 0.0) || !(h_next > 0.0)) {
        throw InvalidArgument("three-point stencil: steps must be positive");
    }
}

} // namespace

double StencilWeights::apply(std::span<const double> samples) const {
    if (samples.size() != weights.size()) {
        throw InvalidArgument("StencilWeights::apply: sample count mismatch");
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        acc += weights[j] * samples[j];
    }
    return acc;
}

StencilWeights fd_weights(std::span<const double> nodes, std::size_t center, int k) {
    const std::size_t n = nodes.size();
    if (n == 0) {
        throw InvalidArgument("fd_weights: empty node set");
    }
    const int m = static_cast<int>(n) - 1;
    if (k < 0 || k > m) {
        throw InvalidArgument("fd_weights: derivative order " + std::to_string(k) +
                              " needs at least " + std::to_string(k + 1) + " nodes");
    }
    if (center >= n) {
        throw InvalidArgument("fd_weights: center index out of range");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (nodes[i] == nodes[j]) {
                throw SingularSystem("fd_weights: repeated node " + std::to_string(nodes[i]));
            }
        }
    }

    const double x0 = nodes[center];
    // Rows scaled by h^r keep the system well conditioned for tiny steps.
    double h = 0.0;
    for (double x : nodes) {
        h = std::max(h, std::abs(x - x0));
    }
    if (h == 0.0) {
        h = 1.0;
    }

    std::vector<double> p(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        const double delta = (nodes[j] - x0) / h;
        double pw = 1.0;
        for (std::size_t r = 0; r < n; ++r) {
            p[r * n + j] = pw;
            pw *= delta;
        }
    }
    std::vector<double> rhs(n, 0.0);
    rhs[static_cast<std::size_t>(k)] = factorial(k);

    auto w = solve_partial_pivot(std::move(p), std::move(rhs));
    const double inv_hk = std::pow(h, -k);
    for (double& v : w) {
        v *= inv_hk;
    }
    return StencilWeights{std::vector<double>(nodes.begin(), nodes.end()), std::move(w), k, center};
}

StencilWeights first_derivative_3pt(double h_prev, double h_next) {
    require_positive_steps(h_prev, h_next);
    const double sum = h_prev + h_next;
    return StencilWeights{
        {-h_prev, 0.0, h_next},
        {-h_next / (h_prev * sum), (h_next - h_prev) / (h_prev * h_next), h_prev / (h_next * sum)},
        1,
        1};
}

StencilWeights second_derivative_3pt(double h_prev, double h_next) {
    require_positive_steps(h_prev, h_next);
    const double c = 2.0 / (h_prev + h_next);
    return StencilWeights{
        {-h_prev, 0.0, h_next},
        {c / h_prev, -c * (1.0 / h_next + 1.0 / h_prev), c / h_next},
        2,
        1};
}

KnotDerivatives estimate_knot_derivatives(const Trajectory& traj) {
    traj.validate();
    const std::size_t n = traj.size();
    if (n < 3) {
        throw InvalidArgument("estimate_knot_derivatives: need at least 3 knots, got " +
                              std::to_string(n));
    }
    const auto& g = traj.grid;
    const auto& u = traj.states;
    KnotDerivatives out{Eigen::MatrixXd(u.rows(), u.cols()), Eigen::MatrixXd(u.rows(), u.cols())};

    auto combine = [&](const StencilWeights& w, std::size_t first) {
        Eigen::VectorXd acc = w.weights[0] * u.col(static_cast<Eigen::Index>(first));
        for (std::size_t j = 1; j < w.weights.size(); ++j) {
            acc += w.weights[j] * u.col(static_cast<Eigen::Index>(first + j));
        }
        return acc;
    };

    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hp = g.step(i - 1);
        const double hn = g.step(i);
        const auto col = static_cast<Eigen::Index>(i);
        out.d.col(col) = combine(first_derivative_3pt(hp, hn), i - 1);
        out.a.col(col) = combine(second_derivative_3pt(hp, hn), i - 1);
    }

    const std::array<double, 3> head{g[0], g[1], g[2]};
    const std::array<double, 3> tail{g[n - 3], g[n - 2], g[n - 1]};
    out.d.col(0) = combine(fd_weights(head, 0, 1), 0);
    out.a.col(0) = combine(fd_weights(head, 0, 2), 0);
    const auto last = static_cast<Eigen::Index>(n - 1);
    out.d.col(last) = combine(fd_weights(tail, 2, 1), n - 3);
    out.a.col(last) = combine(fd_weights(tail, 2, 2), n - 3);
    return out;
}

} // namespace cfo
