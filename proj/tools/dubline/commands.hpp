#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "dubline/config.hpp"

namespace dubline::cli {

/// Bad flag combinations detected after parsing. Exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::filesystem::path config_path;
    std::size_t threads = 1;
};

/// Defaults, then the --config file, then --seed.
Config resolve_config(const GlobalOptions& global);

struct SynthArgs {
    std::filesystem::path out;
    std::size_t count = 70;
    std::size_t test_count = 0;  ///< trailing phantoms written to out/test, the rest to out/train
};

struct TrainArgs {
    std::filesystem::path data;
    std::size_t layers = 8;
    std::optional<std::size_t> epochs;
    std::optional<double> lr;
    std::filesystem::path out;
    std::filesystem::path report;
    std::optional<std::size_t> limit;
};

struct DetectArgs {
    std::filesystem::path input;
    std::string solver = "admm";
    std::filesystem::path ckpt;
    std::filesystem::path out;
    bool overlay = false;
};

struct EvalArgs {
    std::filesystem::path detections;
    std::filesystem::path truth;
    std::string format = "json";
    std::filesystem::path out;
};

struct BenchArgs {
    std::filesystem::path data;
    std::filesystem::path ckpt;
    std::size_t admm_iters = 100;
    std::size_t repetitions = 3;
    std::size_t limit = 20;
    std::filesystem::path out;
};

void run_synth(const Config& cfg, const SynthArgs& args);
void run_train(const Config& cfg, const TrainArgs& args);
void run_detect(const Config& cfg, const DetectArgs& args, std::size_t threads);
void run_eval(const Config& cfg, const EvalArgs& args, std::size_t threads);
void run_bench(const Config& cfg, const BenchArgs& args);

}  // namespace dubline::cli
