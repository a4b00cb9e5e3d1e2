#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "boltnet/dataset.hpp"
#include "boltnet/errors.hpp"
#include "boltnet/network.hpp"
#include "boltnet/preprocess.hpp"
#include "boltnet/text.hpp"

namespace boltnet {

inline constexpr double kDefaultBand = 0.05;

struct BandCheck {
    bool within = false;
    bool degenerate = false;  // target was zero; absolute tolerance used
};

/// |pred - target| <= band * |target|, inclusive. A zero target falls back to
/// the absolute tolerance band * 1e-6.
[[nodiscard]] inline BandCheck band_check(double predicted, double target, double band = kDefaultBand) noexcept {
    const double diff = std::abs(predicted - target);
    if (target == 0.0) return {diff <= band * 1e-6, true};
    return {diff <= band * std::abs(target), false};
}

[[nodiscard]] inline bool within_band(double predicted, double target, double band = kDefaultBand) noexcept {
    return band_check(predicted, target, band).within;
}

/// Network outputs for a dataset, scaled with the training scaler first.
[[nodiscard]] inline std::vector<TargetRow> predict(const Network& net, const Dataset& data, const ScalerParams& scaler) {
    std::vector<TargetRow> out;
    out.reserve(data.size());
    for (const auto& s : data.samples) {
        const InputRow z = transform(scaler, s.inputs());
        const Vector y = forward(net, Vector(std::span<const double>(z)));
        out.push_back({y[0], y[1], y[2]});
    }
    return out;
}

/// Share of (sample, output) pairs inside the band, as a percentage.
[[nodiscard]] inline double band_accuracy_pct(std::span<const TargetRow> targets, std::span<const TargetRow> predicted,
                                              double band = kDefaultBand) {
    if (targets.size() != predicted.size() || targets.empty()) {
        throw ShapeError("band accuracy needs equally sized, nonempty target and prediction lists");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        for (std::size_t k = 0; k < kNumOutputs; ++k) hits += within_band(predicted[i][k], targets[i][k], band) ? 1 : 0;
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(targets.size() * kNumOutputs);
}

struct Prediction {
    std::size_t sample_index = 0;
    std::size_t output = 0;  // index into kOutputNames
    double target = 0.0;
    double predicted = 0.0;
    bool within_band = false;
    bool degenerate = false;
};

struct SampleErrors {
    std::size_t sample_index = 0;
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
};

struct EvalReport {
    std::size_t num_samples = 0;
    double band = kDefaultBand;
    std::vector<Prediction> per_prediction;  // sample-major
    std::vector<SampleErrors> per_sample;
    std::array<double, kNumOutputs> per_output_accuracy{};
    double overall_accuracy = 0.0;
    std::array<std::vector<std::pair<double, double>>, kNumOutputs> scatter;  // (target, predicted)
    std::size_t degenerate_count = 0;

    [[nodiscard]] std::size_t within_band_count() const noexcept {
        std::size_t n = 0;
        for (const auto& p : per_prediction) n += p.within_band ? 1 : 0;
        return n;
    }
};

/// Assembles a report from aligned targets and predictions.
[[nodiscard]] inline EvalReport build_report(std::span<const TargetRow> targets, std::span<const TargetRow> predicted,
                                             double band = kDefaultBand) {
    if (targets.empty()) throw ValidationError("cannot evaluate an empty test set");
    if (targets.size() != predicted.size()) {
        throw ShapeError("report: " + std::to_string(targets.size()) + " targets vs " +
                         std::to_string(predicted.size()) + " predictions");
    }
    EvalReport r;
    r.num_samples = targets.size();
    r.band = band;
    std::array<std::size_t, kNumOutputs> hits{};
    std::size_t total_hits = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        double abs_sum = 0.0;
        double sq_sum = 0.0;
        for (std::size_t k = 0; k < kNumOutputs; ++k) {
            const double t = targets[i][k];
            const double p = predicted[i][k];
            const BandCheck check = band_check(p, t, band);
            r.per_prediction.push_back({i, k, t, p, check.within, check.degenerate});
            r.scatter[k].emplace_back(t, p);
            if (check.within) {
                ++hits[k];
                ++total_hits;
            }
            if (check.degenerate) ++r.degenerate_count;
            const double res = p - t;
            abs_sum += std::abs(res);
            sq_sum += res * res;
        }
        SampleErrors e;
        e.sample_index = i;
        e.mae = abs_sum / static_cast<double>(kNumOutputs);
        e.mse = sq_sum / static_cast<double>(kNumOutputs);
        e.rmse = std::sqrt(e.mse);
        r.per_sample.push_back(e);
    }
    const auto n = static_cast<double>(targets.size());
    for (std::size_t k = 0; k < kNumOutputs; ++k) r.per_output_accuracy[k] = 100.0 * static_cast<double>(hits[k]) / n;
    r.overall_accuracy = 100.0 * static_cast<double>(total_hits) / (n * static_cast<double>(kNumOutputs));
    return r;
}

/// Single unshuffled pass over the test rows; the network is not modified.
[[nodiscard]] inline EvalReport evaluate(const Network& net, const Dataset& test, const ScalerParams& scaler,
                                         double band = kDefaultBand) {
    if (test.empty()) throw ValidationError("cannot evaluate an empty test set");
    std::vector<TargetRow> targets;
    targets.reserve(test.size());
    for (const auto& s : test.samples) targets.push_back(s.targets());
    const auto predicted = predict(net, test, scaler);
    return build_report(targets, predicted, band);
}

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PersistenceError("cannot write " + path.string());
    return out;
}

inline void finish_write(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw PersistenceError("write failed: " + path.string());
}

}  // namespace detail

/// Writes scatter_<output>.csv, errors_per_sample.csv and summary.txt.
inline void export_report(const EvalReport& r, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw PersistenceError("cannot create " + dir.string() + ": " + ec.message());

    for (std::size_t k = 0; k < kNumOutputs; ++k) {
        const auto path = dir / ("scatter_" + std::string(kOutputNames[k]) + ".csv");
        auto out = detail::open_for_write(path);
        out << "target,predicted\n";
        for (const auto& [t, p] : r.scatter[k]) out << format_double(t) << ',' << format_double(p) << '\n';
        detail::finish_write(out, path);
    }
    {
        const auto path = dir / "errors_per_sample.csv";
        auto out = detail::open_for_write(path);
        out << "sample,mae,mse,rmse\n";
        for (const auto& e : r.per_sample) {
            out << e.sample_index << ',' << format_double(e.mae) << ',' << format_double(e.mse) << ','
                << format_double(e.rmse) << '\n';
        }
        detail::finish_write(out, path);
    }
    {
        const auto path = dir / "summary.txt";
        auto out = detail::open_for_write(path);
        out << "samples=" << r.num_samples << '\n';
        out << "band=" << format_double(r.band) << '\n';
        out << "within_band=" << r.within_band_count() << '/' << r.per_prediction.size() << '\n';
        out << "overall_accuracy_pct=" << format_double(r.overall_accuracy) << '\n';
        for (std::size_t k = 0; k < kNumOutputs; ++k) {
            out << "accuracy_pct." << kOutputNames[k] << '=' << format_double(r.per_output_accuracy[k]) << '\n';
        }
        out << "degenerate_comparisons=" << r.degenerate_count << '\n';
        detail::finish_write(out, path);
    }
}

}  // namespace boltnet
