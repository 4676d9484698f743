#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "cfo/interpolant.hpp"

namespace cfo {

struct MlpConfig {
    std::size_t state_dim = 0;
    std::vector<std::size_t> hidden_dims{64, 128, 128, 64};
    int embed_bands = 8;
    bool use_time_embedding = true;

    [[nodiscard]] std::size_t embed_dim() const noexcept {
        return use_time_embedding ? 2 * static_cast<std::size_t>(embed_bands) : 0;
    }
    [[nodiscard]] std::size_t input_dim() const noexcept { return state_dim + embed_dim(); }
    /// Widths of every layer boundary: input, hidden..., output.
    [[nodiscard]] std::vector<std::size_t> widths() const;
    [[nodiscard]] std::size_t param_count() const;
    void validate() const;

    friend bool operator==(const MlpConfig&, const MlpConfig&) = default;
};

/// [sin(2^j pi t), j < bands] followed by [cos(2^j pi t), j < bands].
[[nodiscard]] Eigen::VectorXd time_embedding(double t, int bands);

/// Fixed affine maps around the network: the MLP sees (u - in_mean) / in_scale
/// and its raw output y is reported as out_mean + out_scale * y.
/// Not trained; fitted once from data statistics.
struct Normalization {
    Eigen::VectorXd in_mean;
    Eigen::VectorXd in_scale;
    Eigen::VectorXd out_mean;
    Eigen::VectorXd out_scale;

    [[nodiscard]] static Normalization identity(std::size_t state_dim);
    /// Per-component mean / standard deviation of the columns of `inputs` and
    /// `outputs`; components with zero spread get scale 1.
    [[nodiscard]] static Normalization fit(const Eigen::MatrixXd& inputs,
                                           const Eigen::MatrixXd& outputs);
};

struct LossAndGrad {
    double loss = 0.0;
    Eigen::VectorXd grad;  // same layout as VectorField::params()
};

/// Time-conditioned ReLU MLP N_theta(t, u) : [0,1] x R^d -> R^d.
///
/// Parameters live in one flat vector; layer l contributes its weight matrix
/// (out x in, column-major) followed by its bias.
class VectorField {
public:
    VectorField() = default;
    VectorField(MlpConfig config, Eigen::VectorXd params, Normalization norm);

    /// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), zero biases.
    [[nodiscard]] static VectorField init(const MlpConfig& config, std::uint64_t seed);

    [[nodiscard]] const MlpConfig& config() const noexcept { return config_; }
    [[nodiscard]] const Normalization& normalization() const noexcept { return norm_; }
    void set_normalization(Normalization norm);

    [[nodiscard]] const Eigen::VectorXd& params() const noexcept { return params_; }
    [[nodiscard]] Eigen::VectorXd& params() noexcept { return params_; }
    [[nodiscard]] std::size_t layer_count() const noexcept { return offsets_.size(); }
    [[nodiscard]] Eigen::Map<const Eigen::MatrixXd> weight(std::size_t layer) const;
    [[nodiscard]] Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;

    [[nodiscard]] Eigen::VectorXd forward(double t, const Eigen::VectorXd& u) const;
    /// Column b of `u` is evaluated at time t(b).
    [[nodiscard]] Eigen::MatrixXd forward_batch(const Eigen::VectorXd& t,
                                                const Eigen::MatrixXd& u) const;
    /// All columns share one time.
    [[nodiscard]] Eigen::MatrixXd forward_batch(double t, const Eigen::MatrixXd& u) const;

    /// Mean over the batch of ||N(t_b, x_b) - v_b||^2 / d, with its exact
    /// gradient with respect to params().
    [[nodiscard]] LossAndGrad loss_and_grad(const InterpolantBatch& batch) const;
    [[nodiscard]] double loss(const InterpolantBatch& batch) const;

private:
    struct LayerSlot {
        std::size_t offset;
        std::size_t rows;
        std::size_t cols;
    };

    void build_layout();
    [[nodiscard]] Eigen::MatrixXd assemble_input(const Eigen::VectorXd& t,
                                                 const Eigen::MatrixXd& u) const;

    MlpConfig config_;
    Eigen::VectorXd params_;
    Normalization norm_;
    std::vector<LayerSlot> offsets_;
};

} // namespace cfo
