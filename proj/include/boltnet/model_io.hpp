#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "boltnet/errors.hpp"
#include "boltnet/network.hpp"
#include "boltnet/preprocess.hpp"
#include "boltnet/training.hpp"

namespace boltnet {

using Json = nlohmann::json;

inline constexpr int kModelFormatVersion = 1;

// ---------------------------------------------------------------------------
// Field access with path-qualified errors. Decoders throw ConfigError; the
// model loader rewraps those as PersistenceError.

namespace detail {

inline const Json& field(const Json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ConfigError("'" + path + "' must be an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError("missing field '" + (path.empty() ? key : path + "." + key) + "'");
    return *it;
}

inline std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

inline double get_number(const Json& obj, const std::string& key, const std::string& path) {
    const Json& v = field(obj, key, path);
    if (!v.is_number()) throw ConfigError("field '" + join(path, key) + "' must be a number");
    return v.get<double>();
}

inline std::uint64_t get_uint(const Json& obj, const std::string& key, const std::string& path) {
    const Json& v = field(obj, key, path);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw ConfigError("field '" + join(path, key) + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

inline std::string get_string(const Json& obj, const std::string& key, const std::string& path) {
    const Json& v = field(obj, key, path);
    if (!v.is_string()) throw ConfigError("field '" + join(path, key) + "' must be a string");
    return v.get<std::string>();
}

inline bool get_bool(const Json& obj, const std::string& key, const std::string& path) {
    const Json& v = field(obj, key, path);
    if (!v.is_boolean()) throw ConfigError("field '" + join(path, key) + "' must be a boolean");
    return v.get<bool>();
}

inline std::vector<double> get_numbers(const Json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError("field '" + path + "' must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError("field '" + path + "[" + std::to_string(i) + "]' must be a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

inline InputRow get_row(const Json& obj, const std::string& key, const std::string& path) {
    const auto values = get_numbers(field(obj, key, path), join(path, key));
    if (values.size() != kNumInputs) throw ConfigError("field '" + join(path, key) + "' must have 6 entries");
    InputRow row{};
    std::copy(values.begin(), values.end(), row.begin());
    return row;
}

inline Json row_to_json(const InputRow& row) { return Json(std::vector<double>(row.begin(), row.end())); }

}  // namespace detail

// ---------------------------------------------------------------------------
// HyperParams

[[nodiscard]] inline Json to_json(const HyperParams& hp) {
    return Json{
        {"optimizer", "sgd"},
        {"learning_rate", hp.learning_rate},
        {"loss", "huber"},
        {"huber_delta", hp.huber_delta},
        {"batch_size", hp.batch_size},
        {"epochs", hp.epochs},
        {"hidden_sizes", hp.hidden_sizes},
        {"hidden_activation", to_string(hp.hidden_activation)},
        {"output_activation", to_string(hp.output_activation)},
        {"init_method", to_string(hp.init_method)},
        {"bias_init", to_string(hp.bias_init)},
        {"scaling", to_string(hp.scaling)},
        {"degenerate_features", to_string(hp.degenerate_features)},
        {"preload_unit", to_string(hp.preload_unit)},
        {"load_unit", to_string(hp.load_unit)},
        {"seed", hp.seed},
    };
}

/// Missing keys keep their defaults, except output_activation which follows
/// the scaling method (sigmoid for normalization, identity otherwise).
[[nodiscard]] inline HyperParams hyperparams_from_json(const Json& j, const std::string& path = "model") {
    using namespace detail;
    if (!j.is_object()) throw ConfigError("'" + path + "' must be an object");
    HyperParams hp;
    const auto has = [&](const char* key) { return j.contains(key) && !j.at(key).is_null(); };
    if (has("optimizer")) hp.optimizer = parse_optimizer(get_string(j, "optimizer", path));
    if (has("learning_rate")) hp.learning_rate = get_number(j, "learning_rate", path);
    if (has("loss")) hp.loss = parse_loss(get_string(j, "loss", path));
    if (has("huber_delta")) hp.huber_delta = get_number(j, "huber_delta", path);
    if (has("batch_size")) hp.batch_size = get_uint(j, "batch_size", path);
    if (has("epochs")) hp.epochs = get_uint(j, "epochs", path);
    if (has("hidden_sizes")) {
        const Json& hs = j.at("hidden_sizes");
        if (!hs.is_array()) throw ConfigError("field '" + join(path, "hidden_sizes") + "' must be an array");
        hp.hidden_sizes.clear();
        for (const auto& v : hs) {
            if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) {
                throw ConfigError("field '" + join(path, "hidden_sizes") + "' must hold positive integers");
            }
            hp.hidden_sizes.push_back(v.get<std::size_t>());
        }
    }
    if (has("hidden_activation")) hp.hidden_activation = parse_activation(get_string(j, "hidden_activation", path));
    if (has("init_method")) hp.init_method = parse_init_method(get_string(j, "init_method", path));
    if (has("bias_init")) hp.bias_init = parse_bias_init(get_string(j, "bias_init", path));
    if (has("scaling")) hp.scaling = parse_scaling_method(get_string(j, "scaling", path));
    if (has("degenerate_features")) {
        hp.degenerate_features = parse_degenerate_policy(get_string(j, "degenerate_features", path));
    }
    hp.output_activation =
        has("output_activation") ? parse_activation(get_string(j, "output_activation", path))
                                 : (hp.scaling == ScalingMethod::normalization ? Activation::sigmoid : Activation::identity);
    if (has("preload_unit")) hp.preload_unit = parse_force_unit(get_string(j, "preload_unit", path));
    if (has("load_unit")) hp.load_unit = parse_force_unit(get_string(j, "load_unit", path));
    if (has("seed")) hp.seed = get_uint(j, "seed", path);
    hp.validate();
    return hp;
}

// ---------------------------------------------------------------------------
// ScalerParams

[[nodiscard]] inline Json to_json(const ScalerParams& p) {
    return Json{
        {"method", to_string(p.method)},
        {"mean", detail::row_to_json(p.mean)},
        {"stddev", detail::row_to_json(p.stddev)},
        {"min", detail::row_to_json(p.min)},
        {"max", detail::row_to_json(p.max)},
        {"constant", std::vector<bool>(p.constant.begin(), p.constant.end())},
    };
}

[[nodiscard]] inline ScalerParams scaler_from_json(const Json& j, const std::string& path = "scaler") {
    using namespace detail;
    ScalerParams p;
    p.method = parse_scaling_method(get_string(j, "method", path));
    p.mean = get_row(j, "mean", path);
    p.stddev = get_row(j, "stddev", path);
    p.min = get_row(j, "min", path);
    p.max = get_row(j, "max", path);
    const Json& c = field(j, "constant", path);
    if (!c.is_array() || c.size() != kNumInputs) throw ConfigError("field '" + join(path, "constant") + "' must have 6 entries");
    for (std::size_t f = 0; f < kNumInputs; ++f) {
        if (!c[f].is_boolean()) throw ConfigError("field '" + join(path, "constant") + "' must hold booleans");
        p.constant[f] = c[f].get<bool>();
    }
    for (std::size_t f = 0; f < kNumInputs; ++f) {
        if (p.constant[f]) continue;
        if (p.method == ScalingMethod::standardization && !(p.stddev[f] > 0)) {
            throw ConfigError("field '" + join(path, "stddev") + "': non-positive entry " + std::to_string(f));
        }
        if (p.method == ScalingMethod::normalization && !(p.max[f] > p.min[f])) {
            throw ConfigError("field '" + join(path, "max") + "': max must exceed min at entry " + std::to_string(f));
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// Model files

/// Split settings the model was trained with, so evaluation can rebuild the
/// identical test set.
struct SplitSettings {
    std::uint64_t seed = 0;
    bool stratified = true;

    friend bool operator==(const SplitSettings&, const SplitSettings&) = default;
};

struct ModelBundle {
    Network network;
    ScalerParams scaler;
    HyperParams hyperparams;
    SplitSettings split;
};

/// FNV-1a over parameters, scaler and seed; guards against hand edits.
[[nodiscard]] inline std::uint64_t model_checksum(const ModelBundle& m) noexcept {
    std::uint64_t h = fingerprint(m.network);
    h ^= fingerprint(m.scaler) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= mix_seed(m.hyperparams.seed) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

[[nodiscard]] inline Json to_json(const ModelBundle& m) {
    const Network& net = m.network;
    Json weights = Json::array();
    Json biases = Json::array();
    for (std::size_t l = 0; l < net.num_transitions(); ++l) {
        Json rows = Json::array();
        for (std::size_t i = 0; i < net.weights[l].rows(); ++i) {
            const auto r = net.weights[l].row(i);
            rows.push_back(std::vector<double>(r.begin(), r.end()));
        }
        weights.push_back(std::move(rows));
        biases.push_back(std::vector<double>(net.biases[l].begin(), net.biases[l].end()));
    }
    std::ostringstream checksum;
    checksum << std::hex << model_checksum(m);
    return Json{
        {"format", "boltnet-model"},
        {"format_version", kModelFormatVersion},
        {"network",
         {{"layer_sizes", net.config.layer_sizes},
          {"hidden_activation", to_string(net.config.hidden_activation)},
          {"output_activation", to_string(net.config.output_activation)},
          {"init_method", to_string(net.config.init_method)},
          {"bias_init", to_string(net.config.bias_init)},
          {"seed", net.config.seed}}},
        {"weights", std::move(weights)},
        {"biases", std::move(biases)},
        {"scaler", to_json(m.scaler)},
        {"hyperparams", to_json(m.hyperparams)},
        {"split", {{"seed", m.split.seed}, {"stratified", m.split.stratified}}},
        {"training_seed", m.hyperparams.seed},
        {"checksum", checksum.str()},
    };
}

[[nodiscard]] inline ModelBundle model_from_json(const Json& j) {
    using namespace detail;
    if (get_string(j, "format", "") != "boltnet-model") throw ConfigError("field 'format' is not boltnet-model");
    const auto version = get_uint(j, "format_version", "");
    if (version != kModelFormatVersion) {
        throw ConfigError("field 'format_version': unsupported version " + std::to_string(version));
    }

    ModelBundle m;
    const Json& jn = field(j, "network", "");
    NetworkConfig& cfg = m.network.config;
    const Json& sizes = field(jn, "layer_sizes", "network");
    if (!sizes.is_array() || sizes.size() < 2) throw ConfigError("field 'network.layer_sizes' must list >= 2 sizes");
    cfg.layer_sizes.clear();
    for (const auto& s : sizes) {
        if (!s.is_number_unsigned() || s.get<std::uint64_t>() == 0) {
            throw ConfigError("field 'network.layer_sizes' must hold positive integers");
        }
        cfg.layer_sizes.push_back(s.get<std::size_t>());
    }
    cfg.hidden_activation = parse_activation(get_string(jn, "hidden_activation", "network"));
    cfg.output_activation = parse_activation(get_string(jn, "output_activation", "network"));
    cfg.init_method = parse_init_method(get_string(jn, "init_method", "network"));
    cfg.bias_init = parse_bias_init(get_string(jn, "bias_init", "network"));
    cfg.seed = get_uint(jn, "seed", "network");

    const Json& jw = field(j, "weights", "");
    const Json& jb = field(j, "biases", "");
    const std::size_t layers = cfg.layer_sizes.size() - 1;
    if (!jw.is_array() || jw.size() != layers) throw ConfigError("field 'weights' must hold one matrix per layer");
    if (!jb.is_array() || jb.size() != layers) throw ConfigError("field 'biases' must hold one vector per layer");
    for (std::size_t l = 0; l < layers; ++l) {
        const std::string wpath = "weights[" + std::to_string(l) + "]";
        const std::size_t rows = cfg.layer_sizes[l + 1];
        const std::size_t cols = cfg.layer_sizes[l];
        if (!jw[l].is_array() || jw[l].size() != rows) throw ConfigError("field '" + wpath + "' must have " + std::to_string(rows) + " rows");
        Matrix w(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
            const std::string rpath = wpath + "[" + std::to_string(i) + "]";
            const auto values = get_numbers(jw[l][i], rpath);
            if (values.size() != cols) throw ConfigError("field '" + rpath + "' must have " + std::to_string(cols) + " entries");
            std::copy(values.begin(), values.end(), w.row(i).begin());
        }
        const std::string bpath = "biases[" + std::to_string(l) + "]";
        const auto bvalues = get_numbers(jb[l], bpath);
        if (bvalues.size() != rows) throw ConfigError("field '" + bpath + "' must have " + std::to_string(rows) + " entries");
        m.network.weights.push_back(std::move(w));
        m.network.biases.emplace_back(std::span<const double>(bvalues));
    }

    m.scaler = scaler_from_json(field(j, "scaler", ""));
    m.hyperparams = hyperparams_from_json(field(j, "hyperparams", ""), "hyperparams");
    const Json& js = field(j, "split", "");
    m.split.seed = get_uint(js, "seed", "split");
    m.split.stratified = get_bool(js, "stratified", "split");
    if (get_uint(j, "training_seed", "") != m.hyperparams.seed) {
        throw ConfigError("field 'training_seed' disagrees with 'hyperparams.seed'");
    }

    std::ostringstream expected;
    expected << std::hex << model_checksum(m);
    if (get_string(j, "checksum", "") != expected.str()) throw ConfigError("field 'checksum': parameters were modified");
    return m;
}

inline void save_model(const ModelBundle& m, const std::filesystem::path& path) {
    m.network.check_shapes();
    for (std::size_t l = 0; l < m.network.num_transitions(); ++l) {
        for (const double v : m.network.weights[l].values()) {
            if (!std::isfinite(v)) throw PersistenceError("cannot save model: non-finite weight in layer " + std::to_string(l + 1));
        }
        for (const double v : m.network.biases[l].values()) {
            if (!std::isfinite(v)) throw PersistenceError("cannot save model: non-finite bias in layer " + std::to_string(l + 1));
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PersistenceError("cannot write " + path.string());
    out << to_json(m).dump(2) << '\n';
    if (!out) throw PersistenceError("write failed: " + path.string());
}

inline void save_model(const Network& net, const ScalerParams& scaler, const HyperParams& hp,
                       const std::filesystem::path& path) {
    save_model(ModelBundle{net, scaler, hp, {}}, path);
}

[[nodiscard]] inline ModelBundle load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PersistenceError("file not found: " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw PersistenceError("model file " + path.string() + ": " + e.what());
    }
    try {
        return model_from_json(j);
    } catch (const Error& e) {
        throw PersistenceError("model file " + path.string() + ": " + e.what());
    } catch (const Json::exception& e) {
        throw PersistenceError("model file " + path.string() + ": " + e.what());
    }
}

}  // namespace boltnet
