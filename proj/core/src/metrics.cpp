#include "cfo/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "cfo/errors.hpp"

namespace cfo {

namespace {
void require_same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidArgument("relative_l2: shape mismatch");
    }
}
} // namespace

double relative_l2(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth) {
    require_same_shape(pred, truth);
    const double denom = truth.norm();
    if (denom == 0.0) {
        throw UndefinedMetric("relative_l2: reference has zero norm");
    }
    return (pred - truth).norm() / denom;
}

std::vector<double> relative_l2_per_time(const Eigen::MatrixXd& pred,
                                         const Eigen::MatrixXd& truth) {
    require_same_shape(pred, truth);
    std::vector<double> out(static_cast<std::size_t>(truth.cols()));
    for (Eigen::Index j = 0; j < truth.cols(); ++j) {
        const double denom = truth.col(j).norm();
        if (denom == 0.0) {
            throw UndefinedMetric("relative_l2_per_time: zero reference at step " +
                                  std::to_string(j));
        }
        out[static_cast<std::size_t>(j)] = (pred.col(j) - truth.col(j)).norm() / denom;
    }
    return out;
}

std::vector<double> empirical_order(std::span<const double> errors, std::span<const double> steps) {
    if (errors.size() != steps.size() || errors.size() < 2) {
        throw InvalidArgument("empirical_order: need >= 2 matching (error, step) pairs");
    }
    std::vector<double> p;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        if (errors[i] < 0.0 || errors[i + 1] < 0.0 || !(steps[i] > 0.0) || !(steps[i + 1] > 0.0) ||
            steps[i] == steps[i + 1]) {
            throw InvalidArgument("empirical_order: errors must be >= 0 and steps distinct, > 0");
        }
        if (errors[i] == 0.0 || errors[i + 1] == 0.0) {
            p.push_back(kInfiniteOrder);
            continue;
        }
        p.push_back(std::log(errors[i + 1] / errors[i]) / std::log(steps[i + 1] / steps[i]));
    }
    return p;
}

MeanSd mean_sd(std::span<const double> v) {
    if (v.empty()) {
        return {};
    }
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return {mean, std::sqrt(ss / n)};
}

std::string EvalReport::summary() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2e ± %.2e", mean, sd);
    return buf;
}

EvalReport make_report(const std::vector<Eigen::MatrixXd>& preds,
                       const std::vector<Eigen::MatrixXd>& truths, std::size_t nfe) {
    if (preds.size() != truths.size() || preds.empty()) {
        throw InvalidArgument("make_report: need matching, nonempty prediction/truth lists");
    }
    EvalReport r;
    r.nfe = nfe;
    for (std::size_t k = 0; k < preds.size(); ++k) {
        r.per_trajectory.push_back(relative_l2(preds[k], truths[k]));
        const auto curve = relative_l2_per_time(preds[k], truths[k]);
        if (r.error_curve.empty()) {
            r.error_curve.assign(curve.size(), 0.0);
        } else if (r.error_curve.size() != curve.size()) {
            throw InvalidArgument("make_report: trajectories have different lengths");
        }
        for (std::size_t j = 0; j < curve.size(); ++j) {
            r.error_curve[j] += curve[j] / static_cast<double>(preds.size());
        }
        r.final_time.push_back(curve.back());
    }
    const auto ms = mean_sd(r.per_trajectory);
    r.mean = ms.mean;
    r.sd = ms.sd;
    r.final_mean = mean_sd(r.final_time).mean;
    return r;
}

} // namespace cfo
