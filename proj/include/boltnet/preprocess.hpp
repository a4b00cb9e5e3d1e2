#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "boltnet/dataset.hpp"
#include "boltnet/errors.hpp"

namespace boltnet {

enum class ScalingMethod { none, standardization, normalization };

[[nodiscard]] inline std::string_view to_string(ScalingMethod m) noexcept {
    switch (m) {
        case ScalingMethod::none: return "none";
        case ScalingMethod::standardization: return "standardization";
        case ScalingMethod::normalization: return "normalization";
    }
    return "?";
}

[[nodiscard]] inline ScalingMethod parse_scaling_method(std::string_view token) {
    if (token == "none") return ScalingMethod::none;
    if (token == "standardization") return ScalingMethod::standardization;
    if (token == "normalization") return ScalingMethod::normalization;
    throw ConfigError("unknown scaling method '" + std::string(token) + "'");
}

/// What fit does with a feature that is constant over the training set.
///  - reject: degenerate-feature error.
///  - center: keep the feature but scale it by 1, so it maps to 0.
enum class DegeneratePolicy { reject, center };

[[nodiscard]] inline std::string_view to_string(DegeneratePolicy p) noexcept {
    return p == DegeneratePolicy::reject ? "reject" : "center";
}

[[nodiscard]] inline DegeneratePolicy parse_degenerate_policy(std::string_view token) {
    if (token == "reject") return DegeneratePolicy::reject;
    if (token == "center") return DegeneratePolicy::center;
    throw ConfigError("unknown degenerate-feature policy '" + std::string(token) + "'");
}

/// Per-input-feature scaling statistics, fitted on training rows only.
/// mean/stddev are populated for standardization, min/max for normalization.
struct ScalerParams {
    ScalingMethod method = ScalingMethod::none;
    InputRow mean{};
    InputRow stddev{};
    InputRow min{};
    InputRow max{};
    std::array<bool, kNumInputs> constant{};  // centered-only features

    friend bool operator==(const ScalerParams&, const ScalerParams&) = default;
};

[[nodiscard]] inline ScalerParams fit(const Dataset& train, ScalingMethod method,
                                      DegeneratePolicy policy = DegeneratePolicy::reject) {
    if (train.empty()) throw ValidationError("cannot fit scaler on an empty training set");
    ScalerParams p;
    p.method = method;
    if (method == ScalingMethod::none) return p;

    const auto n = static_cast<double>(train.size());
    for (std::size_t f = 0; f < kNumInputs; ++f) {
        double lo = train.samples.front().inputs()[f];
        double hi = lo;
        double sum = 0.0;
        for (const auto& s : train.samples) {
            const double x = s.inputs()[f];
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            sum += x;
        }
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& s : train.samples) {
            const double dx = s.inputs()[f] - mean;
            ss += dx * dx;
        }
        const double stddev = std::sqrt(ss / n);

        const bool degenerate = method == ScalingMethod::standardization ? !(stddev > 0) : !(hi > lo);
        if (degenerate) {
            if (policy == DegeneratePolicy::reject) {
                throw ValidationError("degenerate feature '" + std::string(kInputNames[f]) +
                                      "': constant over the training set");
            }
            p.constant[f] = true;
        }
        if (method == ScalingMethod::standardization) {
            p.mean[f] = mean;
            p.stddev[f] = stddev;
        } else {
            p.min[f] = lo;
            p.max[f] = hi;
        }
    }
    return p;
}

[[nodiscard]] inline InputRow transform(const ScalerParams& p, const InputRow& x) noexcept {
    InputRow z = x;
    for (std::size_t f = 0; f < kNumInputs; ++f) {
        switch (p.method) {
            case ScalingMethod::none: break;
            case ScalingMethod::standardization:
                z[f] = p.constant[f] ? x[f] - p.mean[f] : (x[f] - p.mean[f]) / p.stddev[f];
                break;
            case ScalingMethod::normalization:
                z[f] = p.constant[f] ? x[f] - p.min[f] : (x[f] - p.min[f]) / (p.max[f] - p.min[f]);
                break;
        }
    }
    return z;
}

[[nodiscard]] inline InputRow inverse_transform(const ScalerParams& p, const InputRow& z) noexcept {
    InputRow x = z;
    for (std::size_t f = 0; f < kNumInputs; ++f) {
        switch (p.method) {
            case ScalingMethod::none: break;
            case ScalingMethod::standardization:
                x[f] = p.constant[f] ? z[f] + p.mean[f] : z[f] * p.stddev[f] + p.mean[f];
                break;
            case ScalingMethod::normalization:
                x[f] = p.constant[f] ? z[f] + p.min[f] : z[f] * (p.max[f] - p.min[f]) + p.min[f];
                break;
        }
    }
    return x;
}

/// FNV-1a over the bit patterns of every field.
[[nodiscard]] inline std::uint64_t fingerprint(const ScalerParams& p) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto feed = [&h](std::uint64_t word) {
        for (int b = 0; b < 8; ++b) {
            h ^= (word >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    feed(static_cast<std::uint64_t>(p.method));
    for (const auto* arr : {&p.mean, &p.stddev, &p.min, &p.max}) {
        for (const double v : *arr) feed(std::bit_cast<std::uint64_t>(v));
    }
    for (const bool c : p.constant) feed(c ? 1U : 0U);
    return h;
}

}  // namespace boltnet
