#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "boltnet/network.hpp"
#include "boltnet/training.hpp"
#include "gradient_check.hpp"

namespace boltnet {
namespace {

Network single_link(double w, double b) {
    Network net;
    net.config.layer_sizes = {1, 1};
    net.config.hidden_activation = Activation::identity;
    net.config.output_activation = Activation::identity;
    net.weights.push_back(Matrix{{w}});
    net.biases.push_back(Vector{b});
    return net;
}

Network zero_network(Activation output) {
    NetworkConfig cfg;
    cfg.output_activation = output;
    Network net = init_network(cfg, nullptr);
    for (auto& w : net.weights) w.fill(0.0);
    for (auto& b : net.biases) b.fill(0.0);
    return net;
}

TEST(Activation, Examples) {
    EXPECT_EQ(activation(Activation::sigmoid, 0.0), 0.5);
    EXPECT_EQ(activation(Activation::relu, -3.0), 0.0);
    EXPECT_EQ(activation_grad(Activation::relu, -3.0), 0.0);
    EXPECT_EQ(activation_grad(Activation::relu, 0.0), 0.0);
    EXPECT_EQ(activation_grad(Activation::relu, 2.0), 1.0);
    EXPECT_EQ(activation_grad(Activation::sigmoid, 0.0), 0.25);
    EXPECT_EQ(activation(Activation::identity, -4.5), -4.5);
    EXPECT_EQ(activation_grad(Activation::identity, -4.5), 1.0);
}

TEST(Activation, SigmoidStrictlyInsideUnitInterval) {
    for (const double z : {-1e308, -800.0, -40.0, -1.0, 0.0, 1.0, 20.0, 40.0, 800.0, 1e308}) {
        const double s = sigmoid(z);
        EXPECT_GT(s, 0.0) << z;
        EXPECT_LT(s, 1.0) << z;
    }
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
        const double s = sigmoid(rng.uniform(-1000, 1000));
        ASSERT_GT(s, 0.0);
        ASSERT_LT(s, 1.0);
    }
}

TEST(InitNetwork, DeterministicForSeed) {
    NetworkConfig cfg;
    cfg.seed = 17;
    cfg.bias_init = BiasInit::random;
    EXPECT_EQ(init_network(cfg, nullptr), init_network(cfg, nullptr));
    NetworkConfig other = cfg;
    other.seed = 18;
    EXPECT_NE(init_network(cfg, nullptr).weights, init_network(other, nullptr).weights);
}

TEST(InitNetwork, ShapesFollowLayerSizes) {
    const Network net = init_network(NetworkConfig{}, nullptr);
    ASSERT_EQ(net.num_transitions(), 3U);
    EXPECT_EQ(net.weights[0].rows(), 6U);
    EXPECT_EQ(net.weights[0].cols(), 6U);
    EXPECT_EQ(net.weights[1].rows(), 3U);
    EXPECT_EQ(net.weights[1].cols(), 6U);
    EXPECT_EQ(net.weights[2].rows(), 3U);
    EXPECT_EQ(net.weights[2].cols(), 3U);
    for (const auto& b : net.biases) {
        for (const double v : b) EXPECT_EQ(v, 0.0);
    }
    EXPECT_NO_THROW(net.check_shapes());
}

TEST(InitNetwork, RejectsWrongTopology) {
    NetworkConfig cfg;
    cfg.layer_sizes = {6, 6, 3};
    EXPECT_THROW((void)init_network(cfg, nullptr), ConfigError);
    cfg.layer_sizes = {5, 6, 3, 3};
    EXPECT_THROW((void)init_network(cfg, nullptr), ConfigError);
    cfg.layer_sizes = {6, 6, 3, 2};
    EXPECT_THROW((void)init_network(cfg, nullptr), ConfigError);
}

TEST(InitNetwork, MismatchedPairingWarnsButBuilds) {
    NetworkConfig cfg;
    cfg.init_method = InitMethod::he;
    cfg.hidden_activation = Activation::sigmoid;
    std::ostringstream warnings;
    EXPECT_NO_THROW((void)init_network(cfg, &warnings));
    EXPECT_NE(warnings.str().find("warning"), std::string::npos);

    cfg.hidden_activation = Activation::relu;
    std::ostringstream quiet;
    (void)init_network(cfg, &quiet);
    EXPECT_TRUE(quiet.str().empty());
}

TEST(InitNetwork, RandomBiasRange) {
    NetworkConfig cfg;
    cfg.bias_init = BiasInit::random;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        cfg.seed = seed;
        for (const auto& b : init_network(cfg, nullptr).biases) {
            for (const double v : b) {
                EXPECT_GE(v, -0.1);
                EXPECT_LE(v, 0.1);
            }
        }
    }
}

TEST(InitStatistics, XavierWithinBoundOverTenThousandDraws) {
    const double bound = std::sqrt(6.0 / 12.0);
    Rng rng(101);
    double widest = 0;
    for (int i = 0; i < 10000; ++i) {
        const double w = draw_weight(InitMethod::xavier, 6, 6, rng);
        widest = std::max(widest, std::abs(w));
        ASSERT_LE(std::abs(w), bound);
    }
    EXPECT_LE(widest, 1.0);
    EXPECT_GT(widest, 0.95 * bound);  // the bound is actually approached
}

TEST(InitStatistics, HeStddevWithinFivePercent) {
    Rng rng(202);
    double sum = 0;
    double sq = 0;
    constexpr int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double w = draw_weight(InitMethod::he, 6, 6, rng);
        sum += w;
        sq += w * w;
    }
    const double mean = sum / n;
    const double stddev = std::sqrt(sq / n - mean * mean);
    EXPECT_NEAR(stddev, std::sqrt(2.0 / 6.0), 0.05 * std::sqrt(2.0 / 6.0));
}

TEST(InitStatistics, RandomMethodBound) {
    Rng rng(303);
    for (int i = 0; i < 10000; ++i) ASSERT_LE(std::abs(draw_weight(InitMethod::random, 6, 3, rng)), 1.0 / std::sqrt(6.0));
}

TEST(InitStatistics, NetworkLevelHeFirstLayer) {
    NetworkConfig cfg;
    cfg.init_method = InitMethod::he;
    cfg.hidden_activation = Activation::relu;
    double sq = 0;
    std::size_t n = 0;
    for (std::uint64_t seed = 0; seed < 3000; ++seed) {
        cfg.seed = seed;
        for (const double w : init_network(cfg, nullptr).weights[0].values()) {
            sq += w * w;
            ++n;
        }
    }
    EXPECT_NEAR(std::sqrt(sq / static_cast<double>(n)), std::sqrt(2.0 / 6.0), 0.05 * std::sqrt(2.0 / 6.0));
}

TEST(Forward, ZeroNetworkSigmoidOutput) {
    const Vector y = forward(zero_network(Activation::sigmoid), Vector{1, 2, 3, 4, 5, 6});
    EXPECT_EQ(y, (Vector{0.5, 0.5, 0.5}));
}

TEST(Forward, ZeroNetworkIdentityOutput) {
    const Vector y = forward(zero_network(Activation::identity), Vector{1, 2, 3, 4, 5, 6});
    EXPECT_EQ(y, (Vector{0, 0, 0}));
}

TEST(Forward, LinearChain) { EXPECT_EQ(forward(single_link(1, 0), Vector{2}), (Vector{2})); }

TEST(Forward, TraceConsistency) {
    NetworkConfig cfg;
    cfg.seed = 4;
    cfg.bias_init = BiasInit::random;
    const Network net = init_network(cfg, nullptr);
    const ForwardTrace t = forward_trace(net, Vector{0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
    ASSERT_EQ(t.activations.size(), 4U);
    ASSERT_EQ(t.pre_activations.size(), 3U);
    for (std::size_t l = 0; l < 3; ++l) {
        const Activation kind = l == 2 ? cfg.output_activation : cfg.hidden_activation;
        for (std::size_t i = 0; i < t.pre_activations[l].size(); ++i) {
            EXPECT_EQ(t.activations[l + 1][i], activation(kind, t.pre_activations[l][i]));
        }
    }
    EXPECT_EQ(forward(net, t.activations[0]), t.output());
}

TEST(Forward, OverflowNamesLayer) {
    Network net = single_link(1e308, 0);
    net.config.layer_sizes = {1, 1};
    try {
        (void)forward(net, Vector{1e10});
        FAIL();
    } catch (const NumericError& e) {
        EXPECT_NE(std::string(e.what()).find("layer 1"), std::string::npos);
    }
}

TEST(Forward, ShapeMismatch) { EXPECT_THROW((void)forward(single_link(1, 0), Vector{1, 2}), ShapeError); }

TEST(Backward, ZeroUpstreamGradient) {
    NetworkConfig cfg;
    cfg.seed = 9;
    const Network net = init_network(cfg, nullptr);
    const ForwardTrace t = forward_trace(net, Vector{1, 1, 1, 1, 1, 1});
    const Gradients g = backward(net, t, Vector{0, 0, 0});
    for (std::size_t l = 0; l < 3; ++l) {
        for (const double v : g.weights[l].values()) EXPECT_EQ(v, 0.0);
        for (const double v : g.biases[l]) EXPECT_EQ(v, 0.0);
    }
}

TEST(Backward, ChainRuleByHand) {
    const Network net = single_link(1, 0);
    const Gradients g = backward(net, forward_trace(net, Vector{2}), Vector{1});
    EXPECT_EQ(g.weights[0], (Matrix{{2}}));
    EXPECT_EQ(g.biases[0], (Vector{1}));
}

TEST(Backward, ShapeMismatch) {
    const Network net = init_network(NetworkConfig{}, nullptr);
    const ForwardTrace t = forward_trace(net, Vector(6));
    EXPECT_THROW((void)backward(net, t, Vector{1, 2}), ShapeError);
    ForwardTrace truncated = t;
    truncated.pre_activations.pop_back();
    EXPECT_THROW((void)backward(net, truncated, Vector{1, 2, 3}), ShapeError);
}

TEST(Backward, MatchesFiniteDifferences) {
    const Activation hidden[] = {Activation::sigmoid, Activation::relu};
    const Activation output[] = {Activation::sigmoid, Activation::identity};
    std::uint64_t seed = 500;
    for (const auto h : hidden) {
        for (const auto o : output) {
            for (int rep = 0; rep < 5; ++rep) {
                const auto result = testing::check_gradients(seed++, h, o);
                EXPECT_TRUE(result.ok) << result.worst;
            }
        }
    }
}

}  // namespace
}  // namespace boltnet
