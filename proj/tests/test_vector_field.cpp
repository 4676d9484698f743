#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cfo/errors.hpp"
#include "cfo/interpolant.hpp"
#include "cfo/vector_field.hpp"

using cfo::MlpConfig;
using cfo::VectorField;

namespace {

MlpConfig toy_config(bool embed = true) {
    MlpConfig c;
    c.state_dim = 2;
    c.hidden_dims = {5, 4};
    c.embed_bands = 2;
    c.use_time_embedding = embed;
    return c;
}

cfo::InterpolantBatch random_batch(std::size_t d, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    cfo::InterpolantBatch b;
    b.t.resize(static_cast<Eigen::Index>(n));
    b.x.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
    b.v_target.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
    for (Eigen::Index j = 0; j < b.t.size(); ++j) {
        b.t(j) = unif(rng);
        for (Eigen::Index i = 0; i < b.x.rows(); ++i) {
            b.x(i, j) = normal(rng);
            b.v_target(i, j) = 3.0 * normal(rng);
        }
    }
    return b;
}

// Loop-based forward pass written from the layout description, used as an oracle.
Eigen::VectorXd reference_forward(const VectorField& f, double t, const Eigen::VectorXd& u) {
    const auto& c = f.config();
    const auto& nrm = f.normalization();
    std::vector<double> a;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        a.push_back((u(i) - nrm.in_mean(i)) / nrm.in_scale(i));
    }
    if (c.use_time_embedding) {
        for (int j = 0; j < c.embed_bands; ++j) a.push_back(std::sin(std::pow(2.0, j) * M_PI * t));
        for (int j = 0; j < c.embed_bands; ++j) a.push_back(std::cos(std::pow(2.0, j) * M_PI * t));
    }
    const auto w = c.widths();
    std::size_t off = 0;
    const auto& p = f.params();
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        std::vector<double> next(w[l + 1], 0.0);
        for (std::size_t col = 0; col < w[l]; ++col) {
            for (std::size_t row = 0; row < w[l + 1]; ++row) {
                next[row] += p(static_cast<Eigen::Index>(off + col * w[l + 1] + row)) * a[col];
            }
        }
        off += w[l] * w[l + 1];
        for (std::size_t row = 0; row < w[l + 1]; ++row) {
            next[row] += p(static_cast<Eigen::Index>(off + row));
            if (l + 2 < w.size()) next[row] = std::max(0.0, next[row]);
        }
        off += w[l + 1];
        a = next;
    }
    Eigen::VectorXd out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        out(i) = nrm.out_mean(i) + nrm.out_scale(i) * a[static_cast<std::size_t>(i)];
    }
    return out;
}

cfo::Normalization some_normalization() {
    cfo::Normalization n;
    n.in_mean = Eigen::Vector2d(0.3, -1.0);
    n.in_scale = Eigen::Vector2d(2.0, 0.5);
    n.out_mean = Eigen::Vector2d(-0.2, 0.1);
    n.out_scale = Eigen::Vector2d(4.0, 1.5);
    return n;
}

} // namespace

TEST(TimeEmbedding, ZeroTime) {
    const auto e = cfo::time_embedding(0.0, 4);
    ASSERT_EQ(e.size(), 8);
    for (int j = 0; j < 4; ++j) {
        EXPECT_EQ(e(j), 0.0);
        EXPECT_EQ(e(4 + j), 1.0);
    }
}

TEST(TimeEmbedding, EightBandsGiveSixteenDims) {
    EXPECT_EQ(cfo::time_embedding(0.3, 8).size(), 16);
    EXPECT_THROW((void)cfo::time_embedding(0.3, 0), cfo::InvalidArgument);
}

TEST(TimeEmbedding, DistinctTimesDistinctEmbeddings) {
    std::vector<Eigen::VectorXd> e;
    for (int i = 1; i < 1000; ++i) {
        e.push_back(cfo::time_embedding(i / 1000.0, 2));
    }
    double min_gap = 1e9;
    for (std::size_t i = 0; i < e.size(); ++i) {
        for (std::size_t j = i + 1; j < e.size(); ++j) {
            min_gap = std::min(min_gap, (e[i] - e[j]).norm());
        }
    }
    EXPECT_GT(min_gap, 1e-4);
}

TEST(VectorField, ZeroParamsGiveZero) {
    const auto c = toy_config();
    const VectorField f(c, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c.param_count())),
                        cfo::Normalization::identity(2));
    EXPECT_EQ(f.forward(0.4, Eigen::Vector2d(3, -7)).norm(), 0.0);
}

TEST(VectorField, ForwardMatchesReference) {
    for (bool embed : {true, false}) {
        auto f = VectorField::init(toy_config(embed), 3);
        f.params() += Eigen::VectorXd::Constant(f.params().size(), 0.05);  // nonzero biases
        f.set_normalization(some_normalization());
        for (double t : {0.0, 0.31, 1.0}) {
            const Eigen::Vector2d u(0.7, -1.3);
            EXPECT_LT((f.forward(t, u) - reference_forward(f, t, u)).norm(), 1e-12);
        }
    }
}

TEST(VectorField, BatchMatchesSingle) {
    auto f = VectorField::init(toy_config(), 8);
    f.set_normalization(some_normalization());
    const auto b = random_batch(2, 6, 1);
    const Eigen::MatrixXd out = f.forward_batch(b.t, b.x);
    for (Eigen::Index j = 0; j < 6; ++j) {
        EXPECT_LT((out.col(j) - f.forward(b.t(j), b.x.col(j))).norm(), 1e-13);
    }
    const Eigen::MatrixXd same_t = f.forward_batch(0.5, b.x);
    EXPECT_LT((same_t.col(2) - f.forward(0.5, b.x.col(2))).norm(), 1e-13);
}

TEST(VectorField, DeterministicAndBitIdentical) {
    const auto f = VectorField::init(toy_config(), 11);
    const Eigen::Vector2d u(0.1, 0.2);
    EXPECT_EQ(f.forward(0.3, u), f.forward(0.3, u));
}

TEST(VectorField, InitIsSeededAndBounded) {
    const auto c = toy_config();
    const auto a = VectorField::init(c, 1), b = VectorField::init(c, 1), z = VectorField::init(c, 2);
    EXPECT_EQ(a.params(), b.params());
    EXPECT_NE(a.params(), z.params());
    const auto w = c.widths();
    for (std::size_t l = 0; l < a.layer_count(); ++l) {
        EXPECT_LE(a.weight(l).cwiseAbs().maxCoeff(), 1.0 / std::sqrt(static_cast<double>(w[l])));
        EXPECT_EQ(a.bias(l).norm(), 0.0);
    }
}

TEST(VectorField, NonFiniteInputRejected) {
    const auto f = VectorField::init(toy_config(), 1);
    EXPECT_THROW((void)f.forward(0.5, Eigen::Vector2d(std::nan(""), 0.0)), cfo::NumericError);
    EXPECT_THROW((void)f.forward(0.5, Eigen::Vector3d(0.0, 0.0, 0.0)), cfo::InvalidArgument);
}

TEST(VectorField, GradientMatchesCentralDifferences) {
    for (bool embed : {true, false}) {
        auto f = VectorField::init(toy_config(embed), 21);
        ASSERT_LE(f.params().size(), 200);
        f.params() += Eigen::VectorXd::LinSpaced(f.params().size(), -0.1, 0.1);
        f.set_normalization(some_normalization());
        const auto batch = random_batch(2, 16, 4);
        const auto lg = f.loss_and_grad(batch);
        EXPECT_NEAR(lg.loss, f.loss(batch), 1e-12 * lg.loss);
        std::mt19937_64 rng(7);
        std::uniform_int_distribution<Eigen::Index> pick(0, f.params().size() - 1);
        const double h = 1e-5;
        for (int probe = 0; probe < 20; ++probe) {
            const Eigen::Index k = pick(rng);
            VectorField fp = f, fm = f;
            fp.params()(k) += h;
            fm.params()(k) -= h;
            const double fd = (fp.loss(batch) - fm.loss(batch)) / (2 * h);
            const double denom = std::max(std::abs(fd), 1e-6);
            EXPECT_LT(std::abs(lg.grad(k) - fd) / denom, 1e-4) << "param " << k;
        }
    }
}

TEST(VectorField, OracleWeightsGiveZeroLoss) {
    const auto c = toy_config();
    VectorField f(c, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c.param_count())),
                  cfo::Normalization::identity(2));
    const Eigen::Vector2d v(1.25, -0.5);
    Eigen::VectorXd p = f.params();
    p.tail(2) = v;  // output bias
    f = VectorField(c, p, cfo::Normalization::identity(2));
    cfo::InterpolantBatch b;
    b.t = Eigen::VectorXd::Constant(1, 0.4);
    b.x = Eigen::Vector2d(0.3, 0.9);
    b.v_target = v;
    const auto lg = f.loss_and_grad(b);
    EXPECT_EQ(lg.loss, 0.0);
    EXPECT_EQ(lg.grad.norm(), 0.0);
}

TEST(VectorField, LossScalesQuadraticallyInTargets) {
    const auto c = toy_config();
    const VectorField f(c, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c.param_count())),
                        cfo::Normalization::identity(2));
    auto b = random_batch(2, 1, 9);
    const double l1 = f.loss(b);
    b.v_target *= 2.0;
    EXPECT_NEAR(std::sqrt(f.loss(b)), 2.0 * std::sqrt(l1), 1e-12);
    EXPECT_NEAR(l1, b.v_target.squaredNorm() / 4.0 / 2.0, 1e-12);
}

TEST(VectorField, NonFiniteLossNamesSample) {
    const auto f = VectorField::init(toy_config(), 1);
    auto b = random_batch(2, 3, 1);
    b.v_target(1, 2) = std::numeric_limits<double>::infinity();
    try {
        (void)f.loss_and_grad(b);
        FAIL() << "expected NumericError";
    } catch (const cfo::NumericError& e) {
        EXPECT_NE(std::string(e.what()).find("sample 2"), std::string::npos) << e.what();
    }
}

TEST(Normalization, FitUsesMeanAndSpread) {
    Eigen::MatrixXd in(2, 4), out(2, 4);
    in << 1, 2, 3, 4, 5, 5, 5, 5;
    out << 0, 0, 2, 2, -1, 1, -1, 1;
    const auto n = cfo::Normalization::fit(in, out);
    EXPECT_DOUBLE_EQ(n.in_mean(0), 2.5);
    EXPECT_NEAR(n.in_scale(0), std::sqrt(1.25), 1e-15);
    EXPECT_EQ(n.in_scale(1), 1.0);  // zero spread
    EXPECT_DOUBLE_EQ(n.out_mean(0), 1.0);
    EXPECT_DOUBLE_EQ(n.out_scale(1), 1.0);
}

TEST(MlpConfig, Validation) {
    MlpConfig c = toy_config();
    EXPECT_EQ(c.input_dim(), 6u);
    EXPECT_EQ(c.param_count(), (6u * 5 + 5) + (5u * 4 + 4) + (4u * 2 + 2));
    c.hidden_dims.clear();
    EXPECT_THROW(c.validate(), cfo::InvalidArgument);
    c = toy_config();
    c.state_dim = 0;
    EXPECT_THROW(c.validate(), cfo::InvalidArgument);
}
