#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "dubline/admm.hpp"
#include "dubline/detect.hpp"
#include "dubline/eval.hpp"
#include "dubline/prox.hpp"
#include "dubline/ssim.hpp"
#include "dubline/train.hpp"

namespace dubline {

struct UnfoldSettings {
    std::size_t layers = 8;
    std::size_t channels = 16;
    double leaky_slope = 0.01;
    double gamma = 1.0;
    ThresholdPolicy threshold = RowSumThreshold{0.1};

    LayerOptions layer_options() const { return {leaky_slope, gamma, threshold}; }
};

struct PhantomSettings {
    std::size_t width = 256;
    std::size_t height = 256;
    double speckle_sigma = 0.3;
};

/// Every tunable default in one place. JSON files override any subset.
struct Config {
    std::uint64_t seed = 0;
    std::size_t image_width = 256;
    std::size_t image_height = 256;
    double angle_step = 1.0;
    AdmmConfig admm;
    UnfoldSettings unfold;
    TrainConfig train;
    SsimConfig ssim;
    DetectConfig detect;
    MatchBand match_band = MatchBand::quarter_width;
    PhantomSettings phantom;

    void validate() const;
};

nlohmann::json config_to_json(const Config& cfg);
/// Overlays `overrides` onto the defaults. Unknown keys and wrong types throw
/// InvalidArgument naming the offending path.
Config config_from_json(const nlohmann::json& overrides);
Config load_config(const std::filesystem::path& path);

}  // namespace dubline
