#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "boltnet/dataset.hpp"
#include "boltnet/errors.hpp"
#include "boltnet/evaluation.hpp"
#include "boltnet/model_io.hpp"
#include "boltnet/network.hpp"
#include "boltnet/preprocess.hpp"
#include "boltnet/synth.hpp"
#include "boltnet/training.hpp"

namespace boltnet {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Run configuration

struct CsvSource {
    fs::path path;
    ForceUnit preload_unit = ForceUnit::N;
    ForceUnit load_unit = ForceUnit::N;
};

struct RunConfig {
    std::string label;
    std::variant<CsvSource, SynthConfig> data;
    std::optional<std::size_t> max_samples;  // keep the first N rows
    SplitSettings split;
    HyperParams hyperparams;
    fs::path output_dir = "out";
    bool debug_leak_targets = false;  // eval echoes targets as predictions

    void validate() const {
        if (const auto* csv = std::get_if<CsvSource>(&data)) {
            if (!fs::exists(csv->path)) throw PersistenceError("file not found: " + csv->path.string());
        } else {
            std::get<SynthConfig>(data).validate();
        }
        if (max_samples && *max_samples < 5) throw ConfigError("data.max_samples must be at least 5");
        hyperparams.validate();
    }
};

namespace detail {

inline SynthConfig synth_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("'data.synth' must be an object");
    const std::string path = "data.synth";
    const auto has = [&](const char* key) { return j.contains(key) && !j.at(key).is_null(); };
    SynthConfig cfg;
    if (has("plan")) {
        if (get_string(j, "plan", path) != "paper") throw ConfigError("field 'data.synth.plan': only \"paper\" is built in");
        cfg = SynthConfig::sample_plan(0, 0.0);
    }
    if (has("seed")) cfg.seed = get_uint(j, "seed", path);
    if (has("noise")) cfg.noise = get_number(j, "noise", path);
    const auto range = [&](const char* key, FrictionRange& r) {
        if (!has(key)) return;
        const auto v = get_numbers(j.at(key), path + "." + key);
        if (v.size() != 2) throw ConfigError("field '" + path + "." + key + "' must be [lo, hi]");
        r = {v[0], v[1]};
    };
    range("mu_head", cfg.mu_head);
    range("mu_thread", cfg.mu_thread);
    if (has("groups")) {
        const Json& groups = j.at("groups");
        if (!groups.is_array()) throw ConfigError("field 'data.synth.groups' must be an array");
        cfg.groups.clear();
        for (std::size_t i = 0; i < groups.size(); ++i) {
            const std::string gpath = path + ".groups[" + std::to_string(i) + "]";
            const Json& g = groups[i];
            const double grade = g.contains("grade") ? get_number(g, "grade", gpath) : 8.8;
            SampleGroup grp;
            grp.geometry = builtin_geometry(get_string(g, "bolt", gpath), grade);
            grp.nominal_preload_N = get_number(g, "preload_kN", gpath) * 1000.0;
            grp.count = get_uint(g, "count", gpath);
            if (g.contains("label")) grp.label = get_string(g, "label", gpath);
            cfg.groups.push_back(std::move(grp));
        }
    }
    return cfg;
}

inline Json synth_to_json(const SynthConfig& cfg) {
    Json groups = Json::array();
    for (const auto& g : cfg.groups) {
        groups.push_back({{"bolt", g.geometry.designation},
                          {"grade", g.geometry.strength_grade},
                          {"preload_kN", g.nominal_preload_N / 1000.0},
                          {"count", g.count},
                          {"label", SynthConfig::group_label(g)}});
    }
    return Json{{"seed", cfg.seed},
                {"noise", cfg.noise},
                {"mu_head", {cfg.mu_head.lo, cfg.mu_head.hi}},
                {"mu_thread", {cfg.mu_thread.lo, cfg.mu_thread.hi}},
                {"groups", std::move(groups)}};
}

}  // namespace detail

/// Parses a run configuration. Relative paths resolve against `base_dir`.
[[nodiscard]] inline RunConfig run_config_from_json(const Json& j, const fs::path& base_dir = {}) {
    using namespace detail;
    if (!j.is_object()) throw ConfigError("run configuration must be a JSON object");
    RunConfig rc;
    if (j.contains("label")) rc.label = get_string(j, "label", "");

    const Json& data = field(j, "data", "");
    const bool has_csv = data.contains("csv") && !data.at("csv").is_null();
    const bool has_synth = data.contains("synth") && !data.at("synth").is_null();
    if (has_csv == has_synth) throw ConfigError("field 'data' must contain exactly one of 'csv' or 'synth'");
    if (has_csv) {
        CsvSource src;
        src.path = get_string(data, "csv", "data");
        if (src.path.is_relative() && !base_dir.empty()) src.path = base_dir / src.path;
        if (data.contains("preload_unit")) src.preload_unit = parse_force_unit(get_string(data, "preload_unit", "data"));
        if (data.contains("load_unit")) src.load_unit = parse_force_unit(get_string(data, "load_unit", "data"));
        rc.data = std::move(src);
    } else {
        rc.data = synth_from_json(data.at("synth"));
    }
    if (data.contains("max_samples") && !data.at("max_samples").is_null()) {
        rc.max_samples = get_uint(data, "max_samples", "data");
    }

    if (j.contains("split")) {
        const Json& s = j.at("split");
        if (s.contains("seed")) rc.split.seed = get_uint(s, "seed", "split");
        if (s.contains("stratified")) rc.split.stratified = get_bool(s, "stratified", "split");
    }
    rc.hyperparams = hyperparams_from_json(j.contains("model") ? j.at("model") : Json::object());
    if (j.contains("output_dir")) {
        rc.output_dir = get_string(j, "output_dir", "");
        if (rc.output_dir.is_relative() && !base_dir.empty()) rc.output_dir = base_dir / rc.output_dir;
    }
    if (j.contains("debug_leak_targets")) rc.debug_leak_targets = get_bool(j, "debug_leak_targets", "");
    return rc;
}

[[nodiscard]] inline Json to_json(const RunConfig& rc) {
    Json data;
    if (const auto* csv = std::get_if<CsvSource>(&rc.data)) {
        data = {{"csv", fs::absolute(csv->path).lexically_normal().string()},
                {"preload_unit", to_string(csv->preload_unit)},
                {"load_unit", to_string(csv->load_unit)}};
    } else {
        data = {{"synth", detail::synth_to_json(std::get<SynthConfig>(rc.data))}};
    }
    data["max_samples"] = rc.max_samples ? Json(*rc.max_samples) : Json(nullptr);
    return Json{{"label", rc.label},
                {"data", std::move(data)},
                {"split", {{"seed", rc.split.seed}, {"stratified", rc.split.stratified}}},
                {"model", to_json(rc.hyperparams)},
                {"output_dir", fs::absolute(rc.output_dir).lexically_normal().string()}};
}

[[nodiscard]] inline Json read_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PersistenceError("file not found: " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

[[nodiscard]] inline RunConfig load_run_config(const fs::path& path) {
    return run_config_from_json(read_json_file(path), fs::absolute(path).parent_path());
}

inline void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PersistenceError("cannot write " + path.string());
    out << text;
    if (!out) throw PersistenceError("write failed: " + path.string());
}

inline void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw PersistenceError("cannot create " + dir.string() + ": " + ec.message());
}

// ---------------------------------------------------------------------------
// Commands

/// Raw data in file units (N for synthetic data), truncated to max_samples.
[[nodiscard]] inline Dataset load_source(const RunConfig& rc) {
    Dataset d;
    if (const auto* csv = std::get_if<CsvSource>(&rc.data)) {
        CsvSchema schema;
        schema.preload_unit = csv->preload_unit;
        schema.load_unit = csv->load_unit;
        d = load_csv(csv->path, schema);
    } else {
        d = generate(std::get<SynthConfig>(rc.data));
    }
    if (rc.max_samples) d = d.head(*rc.max_samples);
    return d;
}

/// Source data converted to the units the model trains in.
[[nodiscard]] inline Dataset load_training_data(const RunConfig& rc) {
    return convert_units(load_source(rc), rc.hyperparams.preload_unit, rc.hyperparams.load_unit);
}

struct TrainOutcome {
    ModelBundle model;
    TrainingHistory history;
    SplitDataset split;
    EvalReport test_report;
};

/// split -> fit scaler -> init -> train -> evaluate on the test rows.
[[nodiscard]] inline TrainOutcome run_training(const RunConfig& rc, std::optional<Clock::time_point> started = {},
                                               std::ostream* warnings = &std::cerr) {
    const auto t0 = started.value_or(Clock::now());
    rc.validate();
    const HyperParams& hp = rc.hyperparams;
    TrainOutcome out;
    out.split = boltnet::split(load_training_data(rc), rc.split.seed, rc.split.stratified);
    const ScalerParams scaler = fit(out.split.train, hp.scaling, hp.degenerate_features);
    Network net = init_network(hp.network_config(), warnings);
    TrainResult trained = train(std::move(net), out.split, scaler, hp, t0);
    out.history = std::move(trained.history);
    out.model = ModelBundle{std::move(trained.network), scaler, hp, rc.split};
    out.test_report = evaluate(out.model.network, out.split.test, out.model.scaler);
    return out;
}

struct TrainArtifacts {
    fs::path model;
    fs::path history;
    fs::path manifest;
};

/// model.json, history.csv and run_manifest.json. The manifest is itself a
/// valid run configuration; training from it reproduces model.json.
inline TrainArtifacts write_train_artifacts(const RunConfig& rc, const TrainOutcome& out, const fs::path& dir) {
    ensure_directory(dir);
    TrainArtifacts paths{dir / "model.json", dir / "history.csv", dir / "run_manifest.json"};
    save_model(out.model, paths.model);
    save_history_csv(out.history, paths.history);
    Json manifest = to_json(rc);
    manifest["manifest"] = {
        {"elapsed_seconds", out.history.elapsed_seconds},
        {"samples", out.split.train.size() + out.split.test.size()},
        {"train_size", out.split.train.size()},
        {"test_size", out.split.test.size()},
        {"test_indices", out.split.test_indices},
        {"final_train_accuracy_pct", out.history.accuracy_pct.empty() ? 0.0 : out.history.accuracy_pct.back()},
        {"test_accuracy_pct", out.test_report.overall_accuracy},
    };
    write_text_file(paths.manifest, manifest.dump(2) + "\n");
    return paths;
}

/// Rebuilds the model's split from its stored seed and evaluates the test rows.
[[nodiscard]] inline EvalReport run_evaluation(const RunConfig& rc, const ModelBundle& model) {
    RunConfig data_cfg = rc;
    data_cfg.hyperparams = model.hyperparams;
    const Dataset data = load_training_data(data_cfg);
    const SplitDataset sp = boltnet::split(data, model.split.seed, model.split.stratified);
    if (rc.debug_leak_targets) {
        std::vector<TargetRow> targets;
        for (const auto& s : sp.test.samples) targets.push_back(s.targets());
        return build_report(targets, targets);
    }
    return evaluate(model.network, sp.test, model.scaler);
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
    std::string label;
    bool ok = false;
    double accuracy_pct = 0.0;
    double elapsed_seconds = 0.0;
    std::string error;
};

/// Model 1-4 hyperparameter ladder as patches over a base configuration.
[[nodiscard]] inline std::vector<Json> model_ladder_patches() {
    const auto patch = [](const char* label, const char* act, const char* init, int epochs, const char* scaling,
                          const char* out_act, const char* pre, const char* load, Json max_samples) {
        return Json{{"label", label},
                    {"data", {{"max_samples", std::move(max_samples)}}},
                    {"model",
                     {{"hidden_activation", act},
                      {"init_method", init},
                      {"epochs", epochs},
                      {"scaling", scaling},
                      {"output_activation", out_act},
                      {"preload_unit", pre},
                      {"load_unit", load}}}};
    };
    return {
        patch("Model 1", "sigmoid", "random", 1000, "standardization", "identity", "N", "N", 28),
        patch("Model 2", "relu", "random", 1000, "standardization", "identity", "kN", "kN", 28),
        patch("Model 3", "sigmoid", "xavier", 5500, "normalization", "sigmoid", "kN", "kN", 28),
        patch("Model 4", "sigmoid", "xavier", 4800, "normalization", "sigmoid", "kN", "MN", nullptr),
    };
}

/// A sweep file holds either {"runs": [config | "path", ...]} or
/// {"base": config, "variants": [patch, ...] | "ladder"}.
[[nodiscard]] inline std::vector<Json> expand_sweep(const Json& sweep, const fs::path& base_dir) {
    std::vector<Json> configs;
    if (sweep.contains("runs")) {
        const Json& runs = sweep.at("runs");
        if (!runs.is_array() || runs.empty()) throw ConfigError("field 'runs' must be a nonempty array");
        for (const auto& r : runs) {
            if (r.is_string()) {
                const fs::path p = base_dir / r.get<std::string>();
                Json loaded = read_json_file(p);
                // Relative paths inside a referenced file are relative to that file.
                if (loaded.contains("data") && loaded["data"].contains("csv") && loaded["data"]["csv"].is_string()) {
                    const fs::path csv = loaded["data"]["csv"].get<std::string>();
                    if (csv.is_relative()) loaded["data"]["csv"] = (fs::absolute(p).parent_path() / csv).string();
                }
                configs.push_back(std::move(loaded));
            } else {
                configs.push_back(r);
            }
        }
        return configs;
    }
    if (!sweep.contains("base")) throw ConfigError("sweep file needs 'runs' or 'base'");
    std::vector<Json> patches;
    const Json variants = sweep.value("variants", Json("ladder"));
    if (variants.is_string()) {
        if (variants.get<std::string>() != "ladder") throw ConfigError("field 'variants': only \"ladder\" is built in");
        patches = model_ladder_patches();
    } else if (variants.is_array() && !variants.empty()) {
        patches.assign(variants.begin(), variants.end());
    } else {
        throw ConfigError("field 'variants' must be \"ladder\" or a nonempty array");
    }
    for (const auto& p : patches) {
        Json cfg = sweep.at("base");
        cfg.merge_patch(p);
        configs.push_back(std::move(cfg));
    }
    return configs;
}

/// Runs every configuration end to end. A failing configuration yields a
/// failed row; the rest still run. Each run writes to out_dir/<index>_<label>.
[[nodiscard]] inline std::vector<SweepRow> run_sweep(const std::vector<Json>& configs, const fs::path& base_dir,
                                                     const fs::path& out_dir, std::size_t jobs = 1) {
    const auto run_one = [&](std::size_t i) {
        SweepRow row;
        row.label = configs[i].value("label", "run " + std::to_string(i + 1));
        try {
            const auto t0 = Clock::now();
            RunConfig rc = run_config_from_json(configs[i], base_dir);
            std::string dirname = std::to_string(i + 1) + "_" + row.label;
            std::replace_if(dirname.begin(), dirname.end(), [](char c) { return !std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-'; }, '_');
            rc.output_dir = out_dir / dirname;
            const TrainOutcome out = run_training(rc, t0, nullptr);
            write_train_artifacts(rc, out, rc.output_dir);
            export_report(out.test_report, rc.output_dir / "report");
            row.ok = true;
            row.accuracy_pct = out.test_report.overall_accuracy;
            row.elapsed_seconds = out.history.elapsed_seconds;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        return row;
    };

    std::vector<SweepRow> rows(configs.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < configs.size(); ++i) rows[i] = run_one(i);
        return rows;
    }
    for (std::size_t start = 0; start < configs.size(); start += jobs) {
        std::vector<std::future<SweepRow>> pending;
        for (std::size_t i = start; i < std::min(configs.size(), start + jobs); ++i) {
            pending.push_back(std::async(std::launch::async, run_one, i));
        }
        for (std::size_t k = 0; k < pending.size(); ++k) rows[start + k] = pending[k].get();
    }
    return rows;
}

/// model,status,accuracy_pct,elapsed_s,error
inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "model,status,accuracy_pct,elapsed_s,error\n";
    for (const auto& r : rows) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out << r.label << ',' << (r.ok ? "ok" : "failed") << ',' << (r.ok ? format_double(r.accuracy_pct) : "") << ','
            << (r.ok ? format_double(r.elapsed_seconds) : "") << ',' << err << '\n';
    }
}

}  // namespace boltnet
