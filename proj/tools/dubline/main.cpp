// dubline command-line tool: synth, train, detect, eval, bench.

#include <CLI11.hpp>

#include <iostream>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "dubline/error.hpp"

namespace {

int fail(const std::string& code, const std::string& message, int exit_code) {
    std::cerr << nlohmann::json{{"error", code}, {"message", message}}.dump() << std::endl;
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace dubline::cli;

    CLI::App app{"Radon-domain line detection with ADMM and deep-unfolded ADMM"};
    app.require_subcommand(1);

    GlobalOptions global;
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Seed for every random choice")->capture_default_str();
    app.add_option("--config", global.config_path, "JSON file overriding module defaults")
        ->check(CLI::ExistingFile);
    app.add_option("--threads", global.threads, "Worker threads for per-image stages")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Write a seeded phantom suite");
    synth_cmd->add_option("--out", synth.out, "Output directory")->required();
    synth_cmd->add_option("--count", synth.count, "Number of phantoms")->capture_default_str();
    synth_cmd->add_option("--test-count", synth.test_count,
                          "Trailing phantoms placed in out/test (others in out/train)");

    TrainArgs train;
    std::size_t epochs = 0;
    double lr = 0.0;
    std::size_t limit = 0;
    auto* train_cmd = app.add_subcommand("train", "Train an unfolded network");
    train_cmd->add_option("--data", train.data, "Directory of images or a phantom manifest")->required();
    train_cmd->add_option("--layers", train.layers, "Unfolded layers K")
        ->check(CLI::Range(2, 10))
        ->capture_default_str();
    auto* epochs_opt = train_cmd->add_option("--epochs", epochs, "Epochs (default from config)");
    auto* lr_opt = train_cmd->add_option("--lr", lr, "Initial learning rate (default from config)");
    auto* limit_opt = train_cmd->add_option("--limit", limit, "Use only the first n images");
    train_cmd->add_option("--out", train.out, "Checkpoint path")->required();
    train_cmd->add_option("--report", train.report, "Also write the JSON-lines report here");

    DetectArgs detect;
    auto* detect_cmd = app.add_subcommand("detect", "Detect pleural, A- and B-lines");
    detect_cmd->add_option("--input", detect.input, "Image file or directory")->required()->check(CLI::ExistingPath);
    detect_cmd->add_option("--solver", detect.solver, "admm or unfolded")
        ->check(CLI::IsMember({"admm", "unfolded"}))
        ->capture_default_str();
    detect_cmd->add_option("--ckpt", detect.ckpt, "Checkpoint for --solver unfolded");
    detect_cmd->add_option("--out", detect.out, "Output directory")->required();
    detect_cmd->add_flag("--overlay", detect.overlay, "Write overlay PNGs");

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Score detections against ground truth");
    eval_cmd->add_option("--detections", eval.detections, "Directory of detection JSON")->required();
    eval_cmd->add_option("--truth", eval.truth, "Directory of ground-truth JSON")->required();
    eval_cmd->add_option("--format", eval.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    eval_cmd->add_option("--out", eval.out, "Write the report here instead of stdout");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Time ADMM against the unfolded network");
    bench_cmd->add_option("--data", bench.data, "Directory of images or a phantom manifest")->required();
    bench_cmd->add_option("--ckpt", bench.ckpt, "Checkpoint")->required();
    bench_cmd->add_option("--admm-iters", bench.admm_iters, "Fixed ADMM iteration count")->capture_default_str();
    bench_cmd->add_option("--reps", bench.repetitions, "Timed repetitions per image")->capture_default_str();
    bench_cmd->add_option("--limit", bench.limit, "Use only the first n images")->capture_default_str();
    bench_cmd->add_option("--out", bench.out, "Also write the report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    if (*seed_opt) global.seed = seed;
    if (*epochs_opt) train.epochs = epochs;
    if (*lr_opt) train.lr = lr;
    if (*limit_opt) train.limit = limit;

    try {
        const dubline::Config cfg = resolve_config(global);
        if (*synth_cmd) run_synth(cfg, synth);
        if (*train_cmd) run_train(cfg, train);
        if (*detect_cmd) run_detect(cfg, detect, global.threads);
        if (*eval_cmd) run_eval(cfg, eval, global.threads);
        if (*bench_cmd) run_bench(cfg, bench);
    } catch (const UsageError& e) {
        return fail("usage", e.what(), 2);
    } catch (const dubline::Error& e) {
        return fail(e.code(), e.what(), 1);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 1);
    }
    return 0;
}
