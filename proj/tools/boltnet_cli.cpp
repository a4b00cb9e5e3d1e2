// boltnet: synthesize bolted-joint data, train and evaluate the predictor,
// and sweep hyperparameter configurations.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "boltnet/boltnet.hpp"

namespace fs = std::filesystem;
using namespace boltnet;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::string model;
    std::size_t jobs = 1;
    bool leak_targets = false;
};

RunConfig load_with_overrides(const Options& opt) {
    RunConfig rc = load_run_config(opt.config);
    if (opt.seed) rc.hyperparams.seed = *opt.seed;
    if (opt.out) rc.output_dir = *opt.out;
    return rc;
}

int cmd_synth(const Options& opt) {
    RunConfig rc = load_run_config(opt.config);
    auto* synth = std::get_if<SynthConfig>(&rc.data);
    if (synth == nullptr) throw ConfigError("synth needs a 'data.synth' section");
    if (opt.seed) synth->seed = *opt.seed;
    if (opt.out) rc.output_dir = *opt.out;
    const Dataset d = generate(*synth);
    ensure_directory(rc.output_dir);
    const fs::path path = rc.output_dir / "dataset.csv";
    save_csv(d, path);

    std::map<std::string, std::size_t> counts;
    for (const auto& g : d.group_labels) ++counts[g];
    std::cout << "wrote " << d.size() << " samples to " << path.string() << '\n';
    for (const auto& grp : synth->groups) {
        const auto label = SynthConfig::group_label(grp);
        std::cout << "  " << label << ": " << counts[label] << '\n';
    }
    return 0;
}

int cmd_train(const Options& opt) {
    const auto t0 = Clock::now();
    const RunConfig rc = load_with_overrides(opt);
    const TrainOutcome out = run_training(rc, t0);
    const TrainArtifacts paths = write_train_artifacts(rc, out, rc.output_dir);
    std::cout << "model:    " << paths.model.string() << '\n'
              << "history:  " << paths.history.string() << '\n'
              << "manifest: " << paths.manifest.string() << '\n'
              << "train accuracy: " << format_double(out.history.accuracy_pct.back()) << " %\n"
              << "test accuracy:  " << format_double(out.test_report.overall_accuracy) << " %\n"
              << "elapsed:  " << format_double(out.history.elapsed_seconds) << " s\n";
    return 0;
}

int cmd_eval(const Options& opt) {
    RunConfig rc = load_with_overrides(opt);
    if (opt.leak_targets) rc.debug_leak_targets = true;
    const fs::path model_path = opt.model.empty() ? rc.output_dir / "model.json" : fs::path(opt.model);
    const ModelBundle model = load_model(model_path);
    const EvalReport report = run_evaluation(rc, model);
    const fs::path dir = rc.output_dir / "report";
    export_report(report, dir);
    std::cout << "report: " << dir.string() << '\n';
    for (std::size_t k = 0; k < kNumOutputs; ++k) {
        std::cout << "  " << kOutputNames[k] << ": " << format_double(report.per_output_accuracy[k]) << " %\n";
    }
    std::cout << "test accuracy:  " << format_double(report.overall_accuracy) << " %\n";
    return 0;
}

int cmd_sweep(const Options& opt) {
    const fs::path sweep_path = opt.config;
    const fs::path base_dir = fs::absolute(sweep_path).parent_path();
    std::vector<Json> configs = expand_sweep(read_json_file(sweep_path), base_dir);
    if (opt.seed) {
        for (auto& c : configs) c["model"]["seed"] = *opt.seed;
    }
    const fs::path out_dir = opt.out ? fs::path(*opt.out) : base_dir / "sweep";
    ensure_directory(out_dir);
    const auto rows = run_sweep(configs, base_dir, out_dir, opt.jobs);

    std::ostringstream csv;
    write_sweep_csv(rows, csv);
    write_text_file(out_dir / "sweep.csv", csv.str());
    std::cout << csv.str();
    for (const auto& r : rows) {
        if (!r.ok) std::cerr << "error: " << r.label << ": " << r.error << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bolted-joint load capacity and friction predictor"};
    app.require_subcommand(1);
    Options opt;

    const auto common = [&opt](CLI::App* sub) {
        sub->add_option("--config", opt.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", opt.seed, "Override the run seed");
        sub->add_option("--out", opt.out, "Override the output directory");
    };

    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset CSV");
    common(synth);
    auto* train = app.add_subcommand("train", "Train a model and write model, history and manifest");
    common(train);
    auto* eval = app.add_subcommand("eval", "Evaluate a trained model on its test split");
    common(eval);
    eval->add_option("--model", opt.model, "Model file (default: <out>/model.json)");
    eval->add_flag("--debug-leak-targets", opt.leak_targets, "Echo targets as predictions (pipeline check)");
    auto* sweep = app.add_subcommand("sweep", "Train and evaluate every configuration in a sweep file");
    common(sweep);
    sweep->add_option("--jobs", opt.jobs, "Parallel workers")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*synth) return cmd_synth(opt);
        if (*train) return cmd_train(opt);
        if (*eval) return cmd_eval(opt);
        if (*sweep) return cmd_sweep(opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::validation);
    }
    return 0;
}
