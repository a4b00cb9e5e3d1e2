#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "boltnet/dataset.hpp"
#include "boltnet/errors.hpp"
#include "boltnet/linalg.hpp"
#include "boltnet/rng.hpp"

namespace boltnet {

enum class Activation { sigmoid, relu, identity };
enum class InitMethod { random, xavier, he };
enum class BiasInit { zero, random };

[[nodiscard]] inline std::string_view to_string(Activation a) noexcept {
    switch (a) {
        case Activation::sigmoid: return "sigmoid";
        case Activation::relu: return "relu";
        case Activation::identity: return "identity";
    }
    return "?";
}

[[nodiscard]] inline std::string_view to_string(InitMethod m) noexcept {
    switch (m) {
        case InitMethod::random: return "random";
        case InitMethod::xavier: return "xavier";
        case InitMethod::he: return "he";
    }
    return "?";
}

[[nodiscard]] inline std::string_view to_string(BiasInit b) noexcept {
    return b == BiasInit::zero ? "zero" : "random";
}

[[nodiscard]] inline Activation parse_activation(std::string_view token) {
    if (token == "sigmoid") return Activation::sigmoid;
    if (token == "relu") return Activation::relu;
    if (token == "identity") return Activation::identity;
    throw ConfigError("unknown activation '" + std::string(token) + "'");
}

[[nodiscard]] inline InitMethod parse_init_method(std::string_view token) {
    if (token == "random") return InitMethod::random;
    if (token == "xavier") return InitMethod::xavier;
    if (token == "he") return InitMethod::he;
    throw ConfigError("unknown init method '" + std::string(token) + "'");
}

[[nodiscard]] inline BiasInit parse_bias_init(std::string_view token) {
    if (token == "zero") return BiasInit::zero;
    if (token == "random") return BiasInit::random;
    throw ConfigError("unknown bias init '" + std::string(token) + "'");
}

// ---------------------------------------------------------------------------
// Activations

/// Logistic function, clamped so the result is strictly inside (0, 1) even
/// where the exact value rounds to an endpoint.
[[nodiscard]] inline double sigmoid(double z) noexcept {
    constexpr double lo = std::numeric_limits<double>::denorm_min();
    constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
    double s;
    if (z >= 0) {
        s = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        s = e / (1.0 + e);
    }
    return std::clamp(s, lo, hi);
}

[[nodiscard]] inline double activation(Activation kind, double z) noexcept {
    switch (kind) {
        case Activation::sigmoid: return sigmoid(z);
        case Activation::relu: return z > 0 ? z : 0.0;
        case Activation::identity: return z;
    }
    return z;
}

/// Derivative with respect to the pre-activation. relu'(0) is 0.
[[nodiscard]] inline double activation_grad(Activation kind, double z) noexcept {
    switch (kind) {
        case Activation::sigmoid: {
            const double s = sigmoid(z);
            return s * (1.0 - s);
        }
        case Activation::relu: return z > 0 ? 1.0 : 0.0;
        case Activation::identity: return 1.0;
    }
    return 1.0;
}

// ---------------------------------------------------------------------------
// Topology

struct NetworkConfig {
    std::vector<std::size_t> layer_sizes{kNumInputs, 6, 3, kNumOutputs};
    Activation hidden_activation = Activation::sigmoid;
    Activation output_activation = Activation::sigmoid;
    InitMethod init_method = InitMethod::xavier;
    BiasInit bias_init = BiasInit::zero;
    std::uint64_t seed = 0;

    /// Bolt schema: 6 inputs, two hidden layers, 3 outputs.
    void validate() const {
        if (layer_sizes.size() != 4) {
            throw ConfigError("network must have exactly two hidden layers (4 layer sizes), got " +
                              std::to_string(layer_sizes.size()) + " sizes");
        }
        if (layer_sizes.front() != kNumInputs) throw ConfigError("input layer must have 6 nodes");
        if (layer_sizes.back() != kNumOutputs) throw ConfigError("output layer must have 3 nodes");
        for (const auto n : layer_sizes) {
            if (n == 0) throw ConfigError("layer sizes must be positive");
        }
    }

    friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// The sigmoid/xavier and relu/he pairings are recommendations; anything else
/// produces a warning message.
[[nodiscard]] inline std::optional<std::string> pairing_warning(const NetworkConfig& cfg) {
    if (cfg.init_method == InitMethod::he && cfg.hidden_activation == Activation::sigmoid) {
        return "he initialization paired with sigmoid hidden activation (xavier is recommended)";
    }
    if (cfg.init_method == InitMethod::xavier && cfg.hidden_activation == Activation::relu) {
        return "xavier initialization paired with relu hidden activation (he is recommended)";
    }
    return std::nullopt;
}

/// Learnable state. weights[l] maps layer l to layer l+1.
struct Network {
    NetworkConfig config;
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    [[nodiscard]] std::size_t num_transitions() const noexcept { return weights.size(); }
    [[nodiscard]] std::size_t input_size() const noexcept { return weights.front().cols(); }
    [[nodiscard]] std::size_t output_size() const noexcept { return weights.back().rows(); }

    [[nodiscard]] std::size_t parameter_count() const noexcept {
        std::size_t n = 0;
        for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
        return n;
    }

    /// Checks that consecutive layers chain and biases match.
    void check_shapes() const {
        if (weights.empty() || weights.size() != biases.size()) {
            throw ShapeError("network needs matching, nonempty weight and bias lists");
        }
        for (std::size_t l = 0; l < weights.size(); ++l) {
            if (biases[l].size() != weights[l].rows()) {
                throw ShapeError("layer " + std::to_string(l) + ": bias length " + std::to_string(biases[l].size()) +
                                 " vs " + std::to_string(weights[l].rows()) + " rows");
            }
            if (l > 0 && weights[l].cols() != weights[l - 1].rows()) {
                throw ShapeError("layer " + std::to_string(l) + ": " + std::to_string(weights[l].cols()) +
                                 " inputs vs " + std::to_string(weights[l - 1].rows()) + " outputs upstream");
            }
        }
    }

    friend bool operator==(const Network&, const Network&) = default;
};

/// FNV-1a over all parameter bit patterns.
[[nodiscard]] inline std::uint64_t fingerprint(const Network& net) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto feed = [&h](double v) {
        const auto word = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) {
            h ^= (word >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        for (const double v : net.weights[l].values()) feed(v);
        for (const double v : net.biases[l].values()) feed(v);
    }
    return h;
}

/// One initial weight for a layer with the given fan-in/fan-out:
///  - random: U[-1/sqrt(fan_in), 1/sqrt(fan_in)]
///  - xavier: U[-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))]
///  - he:     N(0, sqrt(2/fan_in))
[[nodiscard]] inline double draw_weight(InitMethod method, std::size_t fan_in, std::size_t fan_out, Rng& rng) noexcept {
    switch (method) {
        case InitMethod::random: {
            const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
            return rng.uniform(-bound, bound);
        }
        case InitMethod::xavier: {
            const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
            return rng.uniform(-bound, bound);
        }
        case InitMethod::he: return rng.normal(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
    }
    return 0.0;
}

/// Builds and initializes a network for the bolt schema. Weights are drawn
/// layer by layer in row-major order from one seeded stream, each layer's
/// biases right after its weights. Random biases are U[-0.1, 0.1].
[[nodiscard]] inline Network init_network(const NetworkConfig& cfg, std::ostream* warnings = &std::cerr) {
    cfg.validate();
    if (const auto w = pairing_warning(cfg); w && warnings != nullptr) *warnings << "warning: " << *w << '\n';

    Network net;
    net.config = cfg;
    Rng rng(derive_seed(cfg.seed, 0x696e6974ULL));
    for (std::size_t l = 0; l + 1 < cfg.layer_sizes.size(); ++l) {
        const std::size_t fan_in = cfg.layer_sizes[l];
        const std::size_t fan_out = cfg.layer_sizes[l + 1];
        Matrix w(fan_out, fan_in);
        for (auto& v : w.values()) v = draw_weight(cfg.init_method, fan_in, fan_out, rng);
        Vector b(fan_out);
        if (cfg.bias_init == BiasInit::random) {
            for (auto& v : b) v = rng.uniform(-0.1, 0.1);
        }
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    return net;
}

// ---------------------------------------------------------------------------
// Forward / backward

/// activations[0] is the input; activations[l+1] = act(pre_activations[l]).
struct ForwardTrace {
    std::vector<Vector> pre_activations;
    std::vector<Vector> activations;

    [[nodiscard]] const Vector& output() const noexcept { return activations.back(); }
};

[[nodiscard]] inline Activation layer_activation(const Network& net, std::size_t transition) noexcept {
    return transition + 1 == net.num_transitions() ? net.config.output_activation : net.config.hidden_activation;
}

[[nodiscard]] inline ForwardTrace forward_trace(const Network& net, const Vector& x) {
    ForwardTrace trace;
    trace.activations.reserve(net.num_transitions() + 1);
    trace.pre_activations.reserve(net.num_transitions());
    trace.activations.push_back(x);
    for (std::size_t l = 0; l < net.num_transitions(); ++l) {
        Vector z = matvec(net.weights[l], trace.activations.back());
        axpy_inplace(1.0, net.biases[l], z);
        const Activation kind = layer_activation(net, l);
        Vector a(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            if (!std::isfinite(z[i])) {
                throw NumericError("non-finite pre-activation in layer " + std::to_string(l + 1));
            }
            a[i] = activation(kind, z[i]);
        }
        trace.pre_activations.push_back(std::move(z));
        trace.activations.push_back(std::move(a));
    }
    return trace;
}

[[nodiscard]] inline Vector forward(const Network& net, const Vector& x) { return forward_trace(net, x).output(); }

/// Parameter gradients shaped like the network.
struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    [[nodiscard]] static Gradients zeros_like(const Network& net) {
        Gradients g;
        for (std::size_t l = 0; l < net.num_transitions(); ++l) {
            g.weights.emplace_back(net.weights[l].rows(), net.weights[l].cols());
            g.biases.emplace_back(net.biases[l].size());
        }
        return g;
    }

    void accumulate(const Gradients& other, double scale = 1.0) {
        for (std::size_t l = 0; l < weights.size(); ++l) {
            axpy_inplace(scale, other.weights[l], weights[l]);
            axpy_inplace(scale, other.biases[l], biases[l]);
        }
    }
};

[[nodiscard]] inline Gradients backward(const Network& net, const ForwardTrace& trace, const Vector& dloss_doutput) {
    const std::size_t layers = net.num_transitions();
    if (trace.pre_activations.size() != layers || trace.activations.size() != layers + 1) {
        throw ShapeError("backward: trace has " + std::to_string(trace.pre_activations.size()) +
                         " layers, network has " + std::to_string(layers));
    }
    if (dloss_doutput.size() != net.output_size()) {
        throw ShapeError("backward: output gradient length " + std::to_string(dloss_doutput.size()) + " vs " +
                         std::to_string(net.output_size()) + " outputs");
    }

    Gradients g;
    g.weights.resize(layers, Matrix(1, 1));
    g.biases.resize(layers);

    Vector delta = dloss_doutput;
    for (std::size_t step = 0; step < layers; ++step) {
        const std::size_t l = layers - 1 - step;
        const Activation kind = layer_activation(net, l);
        const Vector& z = trace.pre_activations[l];
        for (std::size_t i = 0; i < delta.size(); ++i) delta[i] *= activation_grad(kind, z[i]);
        g.weights[l] = outer(delta, trace.activations[l]);
        g.biases[l] = delta;
        if (l > 0) delta = matvec_transposed(net.weights[l], delta);
    }
    return g;
}

/// p <- p - learning_rate * grad
inline void apply_sgd_step(Network& net, const Gradients& g, double learning_rate) {
    for (std::size_t l = 0; l < net.num_transitions(); ++l) {
        axpy_inplace(-learning_rate, g.weights[l], net.weights[l]);
        axpy_inplace(-learning_rate, g.biases[l], net.biases[l]);
    }
}

}  // namespace boltnet
