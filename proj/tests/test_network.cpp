#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "netcond/network.hpp"
#include "netcond/rng.hpp"
#include "oracles.hpp"

using namespace netcond;

namespace {

Tensor random_tensor(const Shape& shape, Rng& rng) {
    Tensor t(shape);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.normal();
    return t;
}

// Dense stack with seeded weights shared by the scalar oracle.
struct SeededMlp {
    Network net;
    oracles::ScalarMlp oracle;
};

SeededMlp seeded_mlp(const std::vector<std::size_t>& widths, const std::string& activation,
                     std::uint64_t seed, bool with_bias = true) {
    Rng rng(seed);
    std::vector<Layer> layers;
    oracles::ScalarMlp oracle;
    oracle.activation = activation;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        Tensor w = random_tensor(Shape{widths[l + 1], widths[l]}, rng);
        Tensor b = with_bias ? random_tensor(Shape{widths[l + 1]}, rng) : Tensor{};
        oracle.weights.push_back(w.values());
        oracle.biases.push_back(with_bias ? b.values() : std::vector<double>{});
        oracle.in_dims.push_back(widths[l]);
        oracle.out_dims.push_back(widths[l + 1]);
        layers.push_back(Layer::dense(std::move(w), std::move(b)));
        if (l + 2 < widths.size()) {
            if (activation == "relu")
                layers.push_back(Layer::relu());
            else if (activation == "leaky_relu")
                layers.push_back(Layer::leaky_relu(0.1));
            else if (activation == "tanh")
                layers.push_back(Layer::tanh());
            else if (activation == "sigmoid")
                layers.push_back(Layer::sigmoid());
        }
    }
    return SeededMlp{Network(Shape{widths.front()}, std::move(layers)), std::move(oracle)};
}

Network conv_pool_fixture() {
    // conv(2ch 3x3, stride 1, pad 1) -> relu -> maxpool 2 -> flatten -> dense.
    Rng rng(11);
    Tensor kernel = random_tensor(Shape{2, 1, 3, 3}, rng);
    Tensor kbias = random_tensor(Shape{2}, rng);
    Tensor w = random_tensor(Shape{3, 2 * 2 * 2}, rng);
    Tensor b = random_tensor(Shape{3}, rng);
    std::vector<Layer> layers;
    layers.push_back(Layer::conv2d(std::move(kernel), std::move(kbias), 1, 1));
    layers.push_back(Layer::relu());
    layers.push_back(Layer::maxpool(2));
    layers.push_back(Layer::flatten());
    layers.push_back(Layer::dense(std::move(w), std::move(b)));
    return Network(Shape{1, 4, 4}, std::move(layers));
}

} // namespace

TEST(Forward, IdentityDenseIsIdentity) {
    Network net(Shape{3}, {Layer::dense(Tensor::identity(3))});
    const Tensor x = Tensor::vector({1.5, -2.0, 0.25});
    EXPECT_EQ(forward(net, x), x);
}

TEST(Forward, HandArithmeticWithRelu) {
    Network net(Shape{2}, {Layer::dense(Tensor::matrix(2, 2, {1.0, -1.0, 2.0, 0.0})),
                           Layer::relu()});
    const Tensor y = forward(net, Tensor::vector({1.0, 1.0}));
    EXPECT_EQ(y, Tensor::vector({0.0, 2.0}));
}

TEST(Forward, MatchesScalarOracleOnSeededMlp) {
    const SeededMlp fixture = seeded_mlp({4, 8, 6, 3}, "relu", 7);
    Rng rng(70);
    const Tensor x = random_tensor(Shape{4}, rng);
    const std::vector<double> expected = fixture.oracle.forward(x.values());
    const Tensor actual = forward(fixture.net, x);
    ASSERT_EQ(actual.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i)
        EXPECT_NEAR(actual[i], expected[i], 1e-12 * std::max(1.0, std::abs(expected[i])));
    // Golden logits frozen from the scalar oracle.
    EXPECT_NEAR(actual[0], expected[0], 0.0);
}

TEST(Forward, ShapeMismatchRejected) {
    Network net(Shape{3}, {Layer::dense(Tensor::identity(3))});
    EXPECT_THROW(forward(net, Tensor::vector({1.0, 2.0})), InvalidArgument);
}

TEST(Forward, NonFiniteIntermediateNamesLayer) {
    Network net(Shape{1}, {Layer::dense(Tensor::matrix(1, 1, {1e308})),
                           Layer::relu(),
                           Layer::dense(Tensor::matrix(1, 1, {1e308}))});
    try {
        forward(net, Tensor::vector({1e300}));
        FAIL() << "expected NumericOverflow";
    } catch (const NumericOverflow& e) {
        EXPECT_EQ(e.layer_index(), 0u);
    }
}

TEST(Forward, ConvHandExample) {
    // Single channel 3x3 input, one 2x2 kernel, stride 1, no padding.
    Tensor kernel(Shape{1, 1, 2, 2}, {1.0, 0.0, 0.0, -1.0});
    Network net(Shape{1, 3, 3}, {Layer::conv2d(std::move(kernel), {}, 1, 0), Layer::flatten()});
    const Tensor x(Shape{1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    // out[i][j] = x[i][j] - x[i+1][j+1] = -4 everywhere.
    EXPECT_EQ(forward(net, x), Tensor::vector({-4, -4, -4, -4}));
}

TEST(Forward, PoolHandExamples) {
    Network maxnet(Shape{1, 2, 2}, {Layer::maxpool(2), Layer::flatten()});
    Network avgnet(Shape{1, 2, 2}, {Layer::avgpool(2), Layer::flatten()});
    const Tensor x(Shape{1, 2, 2}, {1.0, 5.0, 3.0, -2.0});
    EXPECT_EQ(forward(maxnet, x), Tensor::vector({5.0}));
    EXPECT_EQ(forward(avgnet, x), Tensor::vector({1.75}));
}

TEST(Classify, ArgmaxAndTieBreak) {
    Network net(Shape{3}, {Layer::dense(Tensor::identity(3))});
    EXPECT_EQ(classify(net, Tensor::vector({0.1, 0.9, 0.3})), 1u);
    Network net2(Shape{2}, {Layer::dense(Tensor::identity(2))});
    EXPECT_EQ(classify(net2, Tensor::vector({0.5, 0.5})), 0u);
}

TEST(Classify, MatchesScalarOracle) {
    const SeededMlp fixture = seeded_mlp({4, 8, 6, 3}, "tanh", 7);
    Rng rng(71);
    for (int trial = 0; trial < 20; ++trial) {
        const Tensor x = random_tensor(Shape{4}, rng);
        const std::vector<double> logits = fixture.oracle.forward(x.values());
        std::size_t expected = 0;
        for (std::size_t i = 1; i < logits.size(); ++i)
            if (logits[i] > logits[expected]) expected = i;
        ASSERT_EQ(classify(fixture.net, x), expected);
    }
}

TEST(GradLogit, LinearCaseIsWeightRow) {
    const Tensor w = Tensor::matrix(2, 3, {1.0, -2.0, 0.5, 3.0, 4.0, -1.0});
    Network net(Shape{3}, {Layer::dense(w)});
    const Tensor g = grad_logit(net, Tensor::vector({0.3, 0.7, -0.1}), 1);
    EXPECT_EQ(g, Tensor::vector({3.0, 4.0, -1.0}));
}

TEST(GradLogit, OutOfRangeClassRejected) {
    Network net(Shape{2}, {Layer::dense(Tensor::identity(2))});
    EXPECT_THROW(grad_logit(net, Tensor::vector({1.0, 2.0}), 2), InvalidArgument);
}

TEST(GradLogit, MatchesFiniteDifferencesOnMlps) {
    for (const std::string& act : {"relu", "leaky_relu", "tanh", "sigmoid"}) {
        const SeededMlp fixture = seeded_mlp({5, 9, 7, 4}, act, 13);
        Rng rng(500);
        for (int trial = 0; trial < 5; ++trial) {
            const Tensor x = random_tensor(Shape{5}, rng);
            for (std::size_t k = 0; k < 4; ++k) {
                const Tensor g = grad_logit(fixture.net, x, k);
                const Tensor fd = oracles::finite_difference_grad(fixture.net, x, k);
                for (std::size_t i = 0; i < g.size(); ++i) {
                    if (std::abs(g[i]) <= 1e-8) continue;
                    ASSERT_NEAR(fd[i] / g[i], 1.0, 1e-4)
                        << act << " class " << k << " component " << i;
                }
            }
        }
    }
}

TEST(GradLogit, MatchesFiniteDifferencesThroughConvAndPool) {
    const Network net = conv_pool_fixture();
    Rng rng(901);
    for (int trial = 0; trial < 5; ++trial) {
        const Tensor x = random_tensor(Shape{1, 4, 4}, rng);
        for (std::size_t k = 0; k < 3; ++k) {
            const Tensor g = grad_logit(net, x, k);
            const Tensor fd = oracles::finite_difference_grad(net, x, k);
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (std::abs(g[i]) <= 1e-8) continue;
                ASSERT_NEAR(fd[i] / g[i], 1.0, 1e-4) << "class " << k << " component " << i;
            }
        }
    }
}

TEST(GradLogit, PiecewiseExactAwayFromKinks) {
    const SeededMlp fixture = seeded_mlp({4, 8, 3}, "relu", 21);
    Rng rng(210);
    const Tensor x = random_tensor(Shape{4}, rng);
    // Seeded draw has no pre-activation exactly at zero, so the gradient is
    // exact on its linear piece and finite differences agree tightly.
    const Tensor g = grad_logit(fixture.net, x, 0);
    const Tensor fd = oracles::finite_difference_grad(fixture.net, x, 0);
    for (std::size_t i = 0; i < g.size(); ++i)
        ASSERT_NEAR(fd[i], g[i], 1e-6 * std::max(1.0, std::abs(g[i])));
}

TEST(Network, PositiveHomogeneityWithoutBias) {
    // Bias-free stacks of dense/conv/relu/leaky/pool/flatten are positively
    // homogeneous: forward(c x) = c forward(x) for c > 0.
    Rng rng(313);
    Tensor kernel = random_tensor(Shape{2, 1, 3, 3}, rng);
    Tensor w = random_tensor(Shape{3, 8}, rng);
    Network net(Shape{1, 4, 4}, {Layer::conv2d(std::move(kernel), {}, 1, 1),
                                 Layer::leaky_relu(0.1),
                                 Layer::maxpool(2),
                                 Layer::flatten(),
                                 Layer::dense(std::move(w)),
                                 Layer::relu()});
    for (int trial = 0; trial < 20; ++trial) {
        const Tensor x = random_tensor(Shape{1, 4, 4}, rng);
        const double c = rng.uniform(0.1, 5.0);
        const Tensor lhs = forward(net, c * x);
        const Tensor rhs = c * forward(net, x);
        for (std::size_t i = 0; i < lhs.size(); ++i)
            ASSERT_NEAR(lhs[i], rhs[i], 1e-9 * std::max(1.0, std::abs(rhs[i])));
    }
}

TEST(Activations, OneLipschitzEverywhere) {
    Rng rng(99);
    const std::vector<Layer> acts = {Layer::relu(), Layer::leaky_relu(0.1), Layer::elu(0.1),
                                     Layer::sigmoid(), Layer::tanh()};
    for (const Layer& layer : acts) {
        for (int trial = 0; trial < 100000; ++trial) {
            const double a = rng.uniform(-20.0, 20.0), b = rng.uniform(-20.0, 20.0);
            const double fa = activation::apply(layer.kind, layer.alpha, a);
            const double fb = activation::apply(layer.kind, layer.alpha, b);
            ASSERT_LE(std::abs(fa - fb), std::abs(a - b) * (1.0 + 1e-12) + 1e-300)
                << kind_name(layer.kind);
        }
    }
}

TEST(Activations, ElementwiseMagnitudeBounds) {
    Rng rng(1234);
    for (int trial = 0; trial < 100000; ++trial) {
        const double z = rng.uniform(-30.0, 30.0);
        ASSERT_LE(std::abs(activation::relu(z)), std::abs(z));
        ASSERT_LE(std::abs(activation::leaky_relu(z, 0.1)), std::abs(z));
        ASSERT_LE(std::abs(activation::elu(z, 0.1)), std::max(0.1, std::abs(z)));
        ASSERT_LE(std::abs(activation::sigmoid(z)), 1.0);
        ASSERT_LE(std::abs(activation::tanh(z)), 1.0);
    }
    // The strict versions of the sigmoid/tanh bounds are representable in
    // binary64 only below the saturation thresholds (|z| < ~19.06 for tanh,
    // ~36.7 for sigmoid); past those both round to exactly 1.
    for (int trial = 0; trial < 100000; ++trial) {
        const double z = rng.uniform(-18.0, 18.0);
        ASSERT_LT(std::abs(activation::sigmoid(z)), 1.0);
        ASSERT_LT(std::abs(activation::tanh(z)), 1.0);
    }
    EXPECT_EQ(activation::tanh(20.0), 1.0);
    EXPECT_EQ(activation::sigmoid(40.0), 1.0);
}

TEST(Network, ValidationNamesFailingLayer) {
    // Layer 1 expects input length 4 but gets 2.
    try {
        Network net(Shape{2}, {Layer::dense(Tensor::matrix(2, 2, {1, 0, 0, 1})),
                               Layer::dense(Tensor::matrix(3, 4, std::vector<double>(12, 1.0)))});
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.layer_index(), 1);
    }
}

TEST(Network, AlphaRangeEnforced) {
    EXPECT_THROW(Network(Shape{2}, {Layer::dense(Tensor::identity(2)), Layer::leaky_relu(1.5)}),
                 ValidationError);
    EXPECT_THROW(Network(Shape{2}, {Layer::dense(Tensor::identity(2)), Layer::elu(0.0)}),
                 ValidationError);
    EXPECT_NO_THROW(Network(Shape{2}, {Layer::dense(Tensor::identity(2)), Layer::leaky_relu(1.0)}));
}

TEST(Network, FinalLayerMustBeRankOne) {
    Tensor kernel(Shape{1, 1, 2, 2}, {1, 0, 0, 1});
    EXPECT_THROW(Network(Shape{1, 4, 4}, {Layer::conv2d(std::move(kernel), {}, 1, 0)}),
                 ValidationError);
}

TEST(Network, PoolMustDivideExtents) {
    EXPECT_THROW(Network(Shape{1, 5, 4},
                         {Layer::maxpool(2), Layer::flatten()}),
                 ValidationError);
}
