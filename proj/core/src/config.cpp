#include "dubline/config.hpp"

#include "dubline/angle_set.hpp"
#include "dubline/error.hpp"
#include "dubline/json_io.hpp"

namespace dubline {

namespace {

Json to_json_value(const CgConfig& v) { return Json{{"tol", v.tol}, {"max_iter", v.max_iter}}; }

Json to_json_value(const AdmmConfig& v) {
    return Json{{"alpha", v.alpha},         {"gamma", v.gamma},       {"max_iter", v.max_iter},
                {"tol_primal", v.tol_primal}, {"tol_dual", v.tol_dual}, {"fixed_iterations", v.fixed_iterations},
                {"cg", to_json_value(v.cg)}};
}

Json to_json_value(const UnfoldSettings& v) {
    return Json{{"layers", v.layers},
                {"channels", v.channels},
                {"leaky_slope", v.leaky_slope},
                {"gamma", v.gamma},
                {"threshold", v.threshold}};
}

Json to_json_value(const TrainConfig& v) {
    return Json{{"epochs", v.epochs},           {"initial_lr", v.initial_lr},
                {"lr_decay_every", v.lr_decay_every}, {"lr_decay_factor", v.lr_decay_factor},
                {"batch_size", v.batch_size},   {"beta1", v.beta1},
                {"beta2", v.beta2},             {"epsilon", v.epsilon}};
}

Json to_json_value(const SsimConfig& v) {
    return Json{{"window", v.window},
                {"kind", v.kind == SsimWindow::gaussian ? "gaussian" : "uniform"},
                {"sigma", v.sigma},
                {"c1", v.c1},
                {"c2", v.c2},
                {"dynamic_range", v.dynamic_range}};
}

Json to_json_value(const DetectConfig& v) {
    return Json{{"dim_fraction", v.dim_fraction},
                {"dim_min_gain", v.dim_min_gain},
                {"peak_rel_threshold", v.peak_rel_threshold},
                {"peak_min_separation",
                 {{"radius_bins", v.peak_min_separation.radius_bins},
                  {"degrees", v.peak_min_separation.degrees}}},
                {"overpass_intensity_ratio", v.overpass_intensity_ratio},
                {"merge_tolerance_px", v.merge_tolerance_px},
                {"max_b_lines", v.max_b_lines},
                {"b_line_min_pleural_ratio", v.b_line_min_pleural_ratio},
                {"b_line_min_contrast", v.b_line_min_contrast},
                {"b_line_flank_px", v.b_line_flank_px}};
}

}  // namespace

// Readers live in the dubline namespace so ObjectReader finds them by ADL.
void read_value(const Json& j, const std::string& path, CgConfig& v) {
    ObjectReader(j, path).optional("tol", v.tol).optional("max_iter", v.max_iter).finish();
}

void read_value(const Json& j, const std::string& path, AdmmConfig& v) {
    ObjectReader(j, path)
        .optional("alpha", v.alpha)
        .optional("gamma", v.gamma)
        .optional("max_iter", v.max_iter)
        .optional("tol_primal", v.tol_primal)
        .optional("tol_dual", v.tol_dual)
        .optional("fixed_iterations", v.fixed_iterations)
        .optional("cg", v.cg)
        .finish();
}

void read_value(const Json& j, const std::string& path, UnfoldSettings& v) {
    ObjectReader(j, path)
        .optional("layers", v.layers)
        .optional("channels", v.channels)
        .optional("leaky_slope", v.leaky_slope)
        .optional("gamma", v.gamma)
        .optional("threshold", v.threshold)
        .finish();
}

void read_value(const Json& j, const std::string& path, TrainConfig& v) {
    ObjectReader(j, path)
        .optional("epochs", v.epochs)
        .optional("initial_lr", v.initial_lr)
        .optional("lr_decay_every", v.lr_decay_every)
        .optional("lr_decay_factor", v.lr_decay_factor)
        .optional("batch_size", v.batch_size)
        .optional("beta1", v.beta1)
        .optional("beta2", v.beta2)
        .optional("epsilon", v.epsilon)
        .finish();
}

void read_value(const Json& j, const std::string& path, SsimWindow& v) {
    std::string name;
    read_value(j, path, name);
    if (name == "gaussian") {
        v = SsimWindow::gaussian;
    } else if (name == "uniform") {
        v = SsimWindow::uniform;
    } else {
        throw InvalidArgument(path + ": expected \"gaussian\" or \"uniform\"");
    }
}

void read_value(const Json& j, const std::string& path, SsimConfig& v) {
    ObjectReader(j, path)
        .optional("window", v.window)
        .optional("kind", v.kind)
        .optional("sigma", v.sigma)
        .optional("c1", v.c1)
        .optional("c2", v.c2)
        .optional("dynamic_range", v.dynamic_range)
        .finish();
}

void read_value(const Json& j, const std::string& path, PeakSeparation& v) {
    ObjectReader(j, path).optional("radius_bins", v.radius_bins).optional("degrees", v.degrees).finish();
}

void read_value(const Json& j, const std::string& path, DetectConfig& v) {
    ObjectReader(j, path)
        .optional("dim_fraction", v.dim_fraction)
        .optional("dim_min_gain", v.dim_min_gain)
        .optional("peak_rel_threshold", v.peak_rel_threshold)
        .optional("peak_min_separation", v.peak_min_separation)
        .optional("overpass_intensity_ratio", v.overpass_intensity_ratio)
        .optional("merge_tolerance_px", v.merge_tolerance_px)
        .optional("max_b_lines", v.max_b_lines)
        .optional("b_line_min_pleural_ratio", v.b_line_min_pleural_ratio)
        .optional("b_line_min_contrast", v.b_line_min_contrast)
        .optional("b_line_flank_px", v.b_line_flank_px)
        .finish();
}

void read_value(const Json& j, const std::string& path, PhantomSettings& v) {
    ObjectReader(j, path)
        .optional("width", v.width)
        .optional("height", v.height)
        .optional("speckle_sigma", v.speckle_sigma)
        .finish();
}

void Config::validate() const {
    if (image_width < 8 || image_height < 8) throw InvalidArgument("image size must be at least 8x8");
    if (phantom.width < 8 || phantom.height < 8) throw InvalidArgument("phantom size must be at least 8x8");
    if (phantom.speckle_sigma < 0.0) throw InvalidArgument("speckle_sigma must be >= 0");
    if (!(angle_step > 0.0)) throw InvalidArgument("angle_step must be > 0");
    if (unfold.layers < UnfoldedModel::kMinDepth || unfold.layers > UnfoldedModel::kMaxDepth) {
        throw InvalidArgument("unfold.layers must lie in [2, 10]");
    }
    if (unfold.channels == 0) throw InvalidArgument("unfold.channels must be > 0");
    if (!(unfold.gamma > 0.0) || unfold.leaky_slope < 0.0) {
        throw InvalidArgument("unfold.gamma must be > 0 and leaky_slope >= 0");
    }
    dubline::validate(unfold.threshold);
    admm.validate();
    train.validate();
    ssim.validate();
    detect.validate();
    default_angle_set(angle_step);  // throws if the step cannot tile both bands
}

Json config_to_json(const Config& cfg) {
    return Json{{"seed", cfg.seed},
                {"image_width", cfg.image_width},
                {"image_height", cfg.image_height},
                {"angle_step", cfg.angle_step},
                {"admm", to_json_value(cfg.admm)},
                {"unfold", to_json_value(cfg.unfold)},
                {"train", to_json_value(cfg.train)},
                {"ssim", to_json_value(cfg.ssim)},
                {"detect", to_json_value(cfg.detect)},
                {"match_band", cfg.match_band},
                {"phantom",
                 {{"width", cfg.phantom.width},
                  {"height", cfg.phantom.height},
                  {"speckle_sigma", cfg.phantom.speckle_sigma}}}};
}

Config config_from_json(const Json& overrides) {
    Config cfg;
    ObjectReader(overrides, "$")
        .optional("seed", cfg.seed)
        .optional("image_width", cfg.image_width)
        .optional("image_height", cfg.image_height)
        .optional("angle_step", cfg.angle_step)
        .optional("admm", cfg.admm)
        .optional("unfold", cfg.unfold)
        .optional("train", cfg.train)
        .optional("ssim", cfg.ssim)
        .optional("detect", cfg.detect)
        .optional("match_band", cfg.match_band)
        .optional("phantom", cfg.phantom)
        .finish();
    cfg.train.seed = cfg.seed;
    cfg.validate();
    return cfg;
}

Config load_config(const std::filesystem::path& path) { return config_from_json(read_json_file(path)); }

}  // namespace dubline
