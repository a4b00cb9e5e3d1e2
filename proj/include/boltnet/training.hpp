#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "boltnet/dataset.hpp"
#include "boltnet/errors.hpp"
#include "boltnet/evaluation.hpp"
#include "boltnet/network.hpp"
#include "boltnet/preprocess.hpp"
#include "boltnet/rng.hpp"
#include "boltnet/text.hpp"

namespace boltnet {

enum class LossKind { huber };
enum class OptimizerKind { sgd };

[[nodiscard]] inline LossKind parse_loss(std::string_view token) {
    if (token == "huber") return LossKind::huber;
    throw ConfigError("unknown loss '" + std::string(token) + "' (supported: huber)");
}

[[nodiscard]] inline OptimizerKind parse_optimizer(std::string_view token) {
    if (token == "sgd") return OptimizerKind::sgd;
    throw ConfigError("unknown optimizer '" + std::string(token) + "' (supported: sgd)");
}

/// Full run configuration for one model.
struct HyperParams {
    OptimizerKind optimizer = OptimizerKind::sgd;
    double learning_rate = 0.01;
    LossKind loss = LossKind::huber;
    double huber_delta = 1.0;
    std::size_t batch_size = 4;
    std::size_t epochs = 4800;

    std::vector<std::size_t> hidden_sizes{6, 3};
    Activation hidden_activation = Activation::sigmoid;
    Activation output_activation = Activation::sigmoid;
    InitMethod init_method = InitMethod::xavier;
    BiasInit bias_init = BiasInit::zero;

    ScalingMethod scaling = ScalingMethod::normalization;
    DegeneratePolicy degenerate_features = DegeneratePolicy::center;
    ForceUnit preload_unit = ForceUnit::kN;
    ForceUnit load_unit = ForceUnit::MN;

    std::uint64_t seed = 0;

    void validate() const {
        if (!(learning_rate > 0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be > 0");
        if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
        if (epochs < 1) throw ConfigError("epochs must be >= 1");
        if (!(huber_delta > 0) || !std::isfinite(huber_delta)) throw ConfigError("huber_delta must be > 0");
        network_config().validate();
    }

    [[nodiscard]] NetworkConfig network_config() const {
        NetworkConfig cfg;
        cfg.layer_sizes = {kNumInputs};
        cfg.layer_sizes.insert(cfg.layer_sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
        cfg.layer_sizes.push_back(kNumOutputs);
        cfg.hidden_activation = hidden_activation;
        cfg.output_activation = output_activation;
        cfg.init_method = init_method;
        cfg.bias_init = bias_init;
        cfg.seed = seed;
        return cfg;
    }

    friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

// ---------------------------------------------------------------------------
// Loss

struct HuberResult {
    double loss = 0.0;
    Vector grad;
};

/// Mean over components of 0.5 r^2 (|r| <= delta) or delta (|r| - delta/2).
[[nodiscard]] inline HuberResult huber_loss(std::span<const double> predicted, std::span<const double> target,
                                            double delta) {
    if (predicted.size() != target.size() || predicted.empty()) {
        throw ShapeError("huber_loss: prediction length " + std::to_string(predicted.size()) + " vs target length " +
                         std::to_string(target.size()));
    }
    const auto n = static_cast<double>(predicted.size());
    HuberResult out;
    out.grad = Vector(predicted.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double r = predicted[i] - target[i];
        if (std::abs(r) <= delta) {
            sum += 0.5 * r * r;
            out.grad[i] = r / n;
        } else {
            sum += delta * (std::abs(r) - 0.5 * delta);
            out.grad[i] = (r > 0 ? delta : -delta) / n;
        }
    }
    out.loss = sum / n;
    return out;
}

// ---------------------------------------------------------------------------
// Training loop

/// A scaled input paired with its target in output units.
struct Example {
    Vector input;
    Vector target;
};

struct TrainingHistory {
    std::vector<double> mean_loss;     // per epoch, mean over batches
    std::vector<double> accuracy_pct;  // per epoch, 5%-band accuracy on the training rows
    double elapsed_seconds = 0.0;
};

/// Visiting order for one epoch; depends only on (seed, epoch).
[[nodiscard]] inline std::vector<std::size_t> epoch_order(std::uint64_t seed, std::size_t epoch, std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(derive_seed(seed, 0x73687566ULL), epoch));
    rng.shuffle(std::span(order));
    return order;
}

namespace detail {

inline double example_accuracy_pct(const Network& net, std::span<const Example> examples) {
    std::size_t hits = 0;
    std::size_t total = 0;
    for (const auto& ex : examples) {
        const Vector y = forward(net, ex.input);
        for (std::size_t k = 0; k < y.size(); ++k) hits += within_band(y[k], ex.target[k]) ? 1 : 0;
        total += y.size();
    }
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace detail

/// Mini-batch SGD over prepared examples. Per epoch: reshuffle, cut into
/// batches of hp.batch_size (the last may be smaller), average the per-sample
/// Huber gradients over each batch and take one step per batch.
inline TrainingHistory fit_examples(Network& net, std::span<const Example> examples, const HyperParams& hp) {
    if (examples.empty()) throw ValidationError("cannot train on an empty training set");
    if (!(hp.learning_rate >= 0) || hp.batch_size < 1) throw ConfigError("invalid learning rate or batch size");

    TrainingHistory history;
    history.mean_loss.reserve(hp.epochs);
    history.accuracy_pct.reserve(hp.epochs);

    const std::size_t n = examples.size();
    for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
        const auto order = epoch_order(hp.seed, epoch, n);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += hp.batch_size) {
            const std::size_t stop = std::min(n, start + hp.batch_size);
            const auto count = static_cast<double>(stop - start);
            Gradients grad = Gradients::zeros_like(net);
            double batch_loss = 0.0;
            try {
                for (std::size_t k = start; k < stop; ++k) {
                    const Example& ex = examples[order[k]];
                    const ForwardTrace trace = forward_trace(net, ex.input);
                    const HuberResult h = huber_loss(trace.output().values(), ex.target.values(), hp.huber_delta);
                    batch_loss += h.loss;
                    grad.accumulate(backward(net, trace, h.grad), 1.0 / count);
                }
            } catch (const NumericError& e) {
                throw NumericError("training diverged at epoch " + std::to_string(epoch + 1) + ", batch " +
                                   std::to_string(batches + 1) + ": " + e.what());
            }
            batch_loss /= count;
            if (!std::isfinite(batch_loss)) {
                throw NumericError("training diverged at epoch " + std::to_string(epoch + 1) + ", batch " +
                                   std::to_string(batches + 1) + ": non-finite loss");
            }
            apply_sgd_step(net, grad, hp.learning_rate);
            loss_sum += batch_loss;
            ++batches;
        }
        history.mean_loss.push_back(loss_sum / static_cast<double>(batches));
        try {
            history.accuracy_pct.push_back(detail::example_accuracy_pct(net, examples));
        } catch (const NumericError& e) {
            throw NumericError("training diverged at epoch " + std::to_string(epoch + 1) + ", batch " +
                               std::to_string(batches) + ": " + e.what());
        }
    }
    return history;
}

/// Scales inputs with `scaler`; targets stay in the dataset's units.
[[nodiscard]] inline std::vector<Example> make_examples(const Dataset& data, const ScalerParams& scaler) {
    std::vector<Example> out;
    out.reserve(data.size());
    for (const auto& s : data.samples) {
        const InputRow z = transform(scaler, s.inputs());
        const TargetRow t = s.targets();
        out.push_back({Vector(std::span<const double>(z)), Vector(std::span<const double>(t))});
    }
    return out;
}

struct TrainResult {
    Network network;
    TrainingHistory history;
};

using Clock = std::chrono::steady_clock;

/// Trains on split.train. Elapsed time runs from `started` (the beginning of
/// preprocessing, if the caller tracked it) to the end of training.
[[nodiscard]] inline TrainResult train(Network net, const SplitDataset& split, const ScalerParams& scaler,
                                       const HyperParams& hp, std::optional<Clock::time_point> started = {}) {
    const auto t0 = started.value_or(Clock::now());
    if (split.train.empty()) throw ValidationError("cannot train on an empty training set");
    if (net.input_size() != kNumInputs || net.output_size() != kNumOutputs) {
        throw ShapeError("network shape " + std::to_string(net.input_size()) + "->" +
                         std::to_string(net.output_size()) + " does not match the 6->3 feature schema");
    }
    const auto examples = make_examples(split.train, scaler);
    TrainResult result{std::move(net), {}};
    result.history = fit_examples(result.network, examples, hp);
    result.history.elapsed_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return result;
}

/// epoch,mean_loss,accuracy_pct; epochs are 1-based.
inline void write_history_csv(const TrainingHistory& h, std::ostream& out) {
    out << "epoch,mean_loss,accuracy_pct\n";
    for (std::size_t e = 0; e < h.mean_loss.size(); ++e) {
        out << (e + 1) << ',' << format_double(h.mean_loss[e]) << ',' << format_double(h.accuracy_pct[e]) << '\n';
    }
}

inline void save_history_csv(const TrainingHistory& h, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PersistenceError("cannot write " + path.string());
    write_history_csv(h, out);
    if (!out) throw PersistenceError("write failed: " + path.string());
}

}  // namespace boltnet
