#include "cfo/vector_field.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "cfo/errors.hpp"

namespace cfo {

std::vector<std::size_t> MlpConfig::widths() const {
    std::vector<std::size_t> w;
    w.reserve(hidden_dims.size() + 2);
    w.push_back(input_dim());
    w.insert(w.end(), hidden_dims.begin(), hidden_dims.end());
    w.push_back(state_dim);
    return w;
}

std::size_t MlpConfig::param_count() const {
    const auto w = widths();
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        n += w[l + 1] * w[l] + w[l + 1];
    }
    return n;
}

void MlpConfig::validate() const {
    if (state_dim == 0) {
        throw InvalidArgument("MlpConfig: state_dim must be positive");
    }
    if (hidden_dims.empty()) {
        throw InvalidArgument("MlpConfig: hidden_dims must be nonempty");
    }
    for (auto h : hidden_dims) {
        if (h == 0) {
            throw InvalidArgument("MlpConfig: zero-width hidden layer");
        }
    }
    if (use_time_embedding && embed_bands <= 0) {
        throw InvalidArgument("MlpConfig: embed_bands must be positive");
    }
}

Eigen::VectorXd time_embedding(double t, int bands) {
    if (bands <= 0) {
        throw InvalidArgument("time_embedding: bands must be positive");
    }
    Eigen::VectorXd e(2 * bands);
    double freq = std::numbers::pi;
    for (int j = 0; j < bands; ++j) {
        e(j) = std::sin(freq * t);
        e(bands + j) = std::cos(freq * t);
        freq *= 2.0;
    }
    return e;
}

Normalization Normalization::identity(std::size_t state_dim) {
    const auto d = static_cast<Eigen::Index>(state_dim);
    return {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d), Eigen::VectorXd::Zero(d),
            Eigen::VectorXd::Ones(d)};
}

namespace {

void column_stats(const Eigen::MatrixXd& m, Eigen::VectorXd& mean, Eigen::VectorXd& scale) {
    if (m.cols() == 0) {
        throw InvalidArgument("Normalization::fit: no samples");
    }
    mean = m.rowwise().mean();
    const Eigen::MatrixXd centered = m.colwise() - mean;
    scale = (centered.array().square().rowwise().sum() / static_cast<double>(m.cols())).sqrt();
    for (Eigen::Index i = 0; i < scale.size(); ++i) {
        if (!(scale(i) > 0.0) || !std::isfinite(scale(i))) {
            scale(i) = 1.0;
        }
    }
}

} // namespace

Normalization Normalization::fit(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& outputs) {
    Normalization n;
    column_stats(inputs, n.in_mean, n.in_scale);
    column_stats(outputs, n.out_mean, n.out_scale);
    return n;
}

VectorField::VectorField(MlpConfig config, Eigen::VectorXd params, Normalization norm)
    : config_(std::move(config)), params_(std::move(params)) {
    config_.validate();
    if (static_cast<std::size_t>(params_.size()) != config_.param_count()) {
        throw InvalidArgument("VectorField: expected " + std::to_string(config_.param_count()) +
                              " parameters, got " + std::to_string(params_.size()));
    }
    build_layout();
    set_normalization(std::move(norm));
}

void VectorField::set_normalization(Normalization norm) {
    const auto d = static_cast<Eigen::Index>(config_.state_dim);
    if (norm.in_mean.size() != d || norm.in_scale.size() != d || norm.out_mean.size() != d ||
        norm.out_scale.size() != d) {
        throw InvalidArgument("VectorField: normalization dimension mismatch");
    }
    if ((norm.in_scale.array() <= 0.0).any() || (norm.out_scale.array() <= 0.0).any()) {
        throw InvalidArgument("VectorField: normalization scales must be positive");
    }
    norm_ = std::move(norm);
}

void VectorField::build_layout() {
    offsets_.clear();
    const auto w = config_.widths();
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        offsets_.push_back({off, w[l + 1], w[l]});
        off += w[l + 1] * w[l] + w[l + 1];
    }
}

VectorField VectorField::init(const MlpConfig& config, std::uint64_t seed) {
    config.validate();
    Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(config.param_count()));
    std::mt19937_64 rng(seed);
    const auto w = config.widths();
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(w[l]));
        std::uniform_real_distribution<double> dist(-bound, bound);
        const std::size_t n_w = w[l + 1] * w[l];
        for (std::size_t k = 0; k < n_w; ++k) {
            p(static_cast<Eigen::Index>(off + k)) = dist(rng);
        }
        off += n_w + w[l + 1];
    }
    return VectorField(config, std::move(p), Normalization::identity(config.state_dim));
}

Eigen::Map<const Eigen::MatrixXd> VectorField::weight(std::size_t layer) const {
    const auto& s = offsets_.at(layer);
    return {params_.data() + s.offset, static_cast<Eigen::Index>(s.rows),
            static_cast<Eigen::Index>(s.cols)};
}

Eigen::Map<const Eigen::VectorXd> VectorField::bias(std::size_t layer) const {
    const auto& s = offsets_.at(layer);
    return {params_.data() + s.offset + s.rows * s.cols, static_cast<Eigen::Index>(s.rows)};
}

Eigen::MatrixXd VectorField::assemble_input(const Eigen::VectorXd& t,
                                            const Eigen::MatrixXd& u) const {
    const auto d = static_cast<Eigen::Index>(config_.state_dim);
    if (u.rows() != d || t.size() != u.cols()) {
        throw InvalidArgument("VectorField: input shape mismatch (state rows " +
                              std::to_string(u.rows()) + ", expected " + std::to_string(d) + ")");
    }
    if (!u.allFinite() || !t.allFinite()) {
        throw NumericError("VectorField: non-finite input");
    }
    const auto n = u.cols();
    Eigen::MatrixXd in(static_cast<Eigen::Index>(config_.input_dim()), n);
    in.topRows(d) = (u.colwise() - norm_.in_mean).array().colwise() / norm_.in_scale.array();
    if (config_.use_time_embedding) {
        const int bands = config_.embed_bands;
        for (Eigen::Index b = 0; b < n; ++b) {
            double freq = std::numbers::pi;
            for (int j = 0; j < bands; ++j) {
                in(d + j, b) = std::sin(freq * t(b));
                in(d + bands + j, b) = std::cos(freq * t(b));
                freq *= 2.0;
            }
        }
    }
    return in;
}

Eigen::MatrixXd VectorField::forward_batch(const Eigen::VectorXd& t,
                                           const Eigen::MatrixXd& u) const {
    Eigen::MatrixXd a = assemble_input(t, u);
    const std::size_t last = layer_count() - 1;
    for (std::size_t l = 0; l < layer_count(); ++l) {
        Eigen::MatrixXd z = weight(l) * a;
        z.colwise() += bias(l);
        if (l != last) {
            a = z.cwiseMax(0.0);
        } else {
            a = std::move(z);
        }
    }
    return (a.array().colwise() * norm_.out_scale.array()).colwise() + norm_.out_mean.array();
}

Eigen::MatrixXd VectorField::forward_batch(double t, const Eigen::MatrixXd& u) const {
    return forward_batch(Eigen::VectorXd::Constant(u.cols(), t), u);
}

Eigen::VectorXd VectorField::forward(double t, const Eigen::VectorXd& u) const {
    return forward_batch(Eigen::VectorXd::Constant(1, t), u);
}

double VectorField::loss(const InterpolantBatch& batch) const {
    if (batch.size() == 0) {
        throw InvalidArgument("loss: empty batch");
    }
    const Eigen::MatrixXd out = forward_batch(batch.t, batch.x);
    return (out - batch.v_target).squaredNorm() /
           (static_cast<double>(batch.size()) * static_cast<double>(config_.state_dim));
}

LossAndGrad VectorField::loss_and_grad(const InterpolantBatch& batch) const {
    if (batch.size() == 0) {
        throw InvalidArgument("loss_and_grad: empty batch");
    }
    if (batch.v_target.rows() != static_cast<Eigen::Index>(config_.state_dim) ||
        batch.v_target.cols() != batch.x.cols()) {
        throw InvalidArgument("loss_and_grad: target shape mismatch");
    }
    const std::size_t n_layers = layer_count();
    std::vector<Eigen::MatrixXd> acts(n_layers + 1);  // acts[l] is the input of layer l
    std::vector<Eigen::MatrixXd> pre(n_layers);
    acts[0] = assemble_input(batch.t, batch.x);
    for (std::size_t l = 0; l < n_layers; ++l) {
        pre[l] = weight(l) * acts[l];
        pre[l].colwise() += bias(l);
        acts[l + 1] = (l + 1 == n_layers) ? pre[l] : Eigen::MatrixXd(pre[l].cwiseMax(0.0));
    }

    const Eigen::MatrixXd out =
        (acts[n_layers].array().colwise() * norm_.out_scale.array()).colwise() +
        norm_.out_mean.array();
    const Eigen::MatrixXd resid = out - batch.v_target;
    const double denom =
        static_cast<double>(batch.size()) * static_cast<double>(config_.state_dim);
    const double loss = resid.squaredNorm() / denom;
    if (!std::isfinite(loss)) {
        for (Eigen::Index b = 0; b < resid.cols(); ++b) {
            if (!resid.col(b).allFinite()) {
                throw NumericError("loss_and_grad: non-finite loss at batch sample " +
                                   std::to_string(b) + " (t=" + std::to_string(batch.t(b)) + ")");
            }
        }
        throw NumericError("loss_and_grad: non-finite loss");
    }

    LossAndGrad result{loss, Eigen::VectorXd::Zero(params_.size())};
    Eigen::MatrixXd delta = (2.0 / denom) * (resid.array().colwise() * norm_.out_scale.array()).matrix();
    for (std::size_t l = n_layers; l-- > 0;) {
        const auto& s = offsets_[l];
        Eigen::Map<Eigen::MatrixXd> gw(result.grad.data() + s.offset,
                                       static_cast<Eigen::Index>(s.rows),
                                       static_cast<Eigen::Index>(s.cols));
        Eigen::Map<Eigen::VectorXd> gb(result.grad.data() + s.offset + s.rows * s.cols,
                                       static_cast<Eigen::Index>(s.rows));
        gw.noalias() = delta * acts[l].transpose();
        gb = delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd back = weight(l).transpose() * delta;
            delta = (pre[l - 1].array() > 0.0).select(back, 0.0);
        }
    }
    return result;
}

} // namespace cfo
