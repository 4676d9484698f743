#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cfo {

/// ||pred - truth||_F / ||truth||_F over all (component, time) entries.
/// Throws UndefinedMetric when truth is identically zero.
[[nodiscard]] double relative_l2(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth);

/// Relative error of each column (time step) separately.
[[nodiscard]] std::vector<double> relative_l2_per_time(const Eigen::MatrixXd& pred,
                                                       const Eigen::MatrixXd& truth);

/// Returned by empirical_order when an error is exactly zero.
inline constexpr double kInfiniteOrder = std::numeric_limits<double>::infinity();

/// p_i = log(e_{i+1}/e_i) / log(h_{i+1}/h_i) for consecutive pairs.
[[nodiscard]] std::vector<double> empirical_order(std::span<const double> errors,
                                                  std::span<const double> steps);

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;  // population standard deviation
};

[[nodiscard]] MeanSd mean_sd(std::span<const double> values);

/// Aggregate of a test-set evaluation.
struct EvalReport {
    std::vector<double> per_trajectory;    // whole-trajectory relative L2
    std::vector<double> final_time;        // relative L2 at the last time
    std::vector<double> error_curve;       // mean relative L2 at each time step
    double mean = 0.0;
    double sd = 0.0;
    double final_mean = 0.0;
    std::size_t nfe = 0;                   // per trajectory
    std::string fingerprint;

    /// "4.53e-02 ± 6.80e-03"
    [[nodiscard]] std::string summary() const;
};

/// Builds a report from per-trajectory (pred, truth) matrices of equal shape.
[[nodiscard]] EvalReport make_report(const std::vector<Eigen::MatrixXd>& preds,
                                     const std::vector<Eigen::MatrixXd>& truths, std::size_t nfe);

} // namespace cfo
