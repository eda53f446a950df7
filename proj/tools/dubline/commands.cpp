#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include "dubline/admm.hpp"
#include "dubline/checkpoint.hpp"
#include "dubline/detect.hpp"
#include "dubline/error.hpp"
#include "dubline/eval.hpp"
#include "dubline/json_io.hpp"
#include "dubline/phantom.hpp"
#include "dubline/radon.hpp"
#include "dubline/raster_io.hpp"
#include "dubline/train.hpp"
#include "dubline/unfold.hpp"

namespace dubline::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "manifest.json";

std::string phantom_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "phantom_%04zu", index);
    return buf;
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

std::vector<fs::path> list_files(const fs::path& dir, bool (*keep)(const fs::path&)) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && keep(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

bool is_json_file(const fs::path& p) { return p.extension() == ".json" && p.filename() != kManifest; }

/// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the first failure.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::mutex mutex;
    std::exception_ptr failure;
    std::size_t next = 0;
    auto worker = [&] {
        while (true) {
            std::size_t i;
            {
                std::lock_guard lock(mutex);
                if (failure || next == n) return;
                i = next++;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

struct NamedImage {
    std::string name;
    Image image;
};

Image fit(Image image, std::size_t width, std::size_t height) {
    if (image.width() == width && image.height() == height) return image;
    return resize(image, width, height);
}

/// Raster images in `dir`, or phantoms regenerated from its manifest when it
/// holds no images.
std::vector<NamedImage> load_dataset(const fs::path& dir, const Config& cfg, std::size_t width,
                                     std::size_t height) {
    std::vector<NamedImage> out;
    for (const auto& path : list_files(dir, is_raster_file)) {
        out.push_back({path.stem().string(), fit(load_image(path), width, height)});
    }
    if (out.empty() && fs::exists(dir / kManifest)) {
        const auto specs = parse_json<std::vector<PhantomSpec>>(read_json_file(dir / kManifest));
        for (std::size_t i = 0; i < specs.size(); ++i) {
            Phantom ph = generate(specs[i], cfg.phantom.width, cfg.phantom.height);
            out.push_back({phantom_name(i), fit(std::move(ph.image), width, height)});
        }
    }
    if (out.empty()) throw InvalidArgument("no images or manifest in " + dir.string());
    return out;
}

RadonOperator operator_from_config(const Config& cfg) {
    return build_operator(cfg.image_width, cfg.image_height, default_angle_set(cfg.angle_step));
}

RadonOperator operator_from_spec(const OperatorSpec& spec) {
    return build_operator(spec.width, spec.height, spec.angles, spec.radii_count);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

Config resolve_config(const GlobalOptions& global) {
    Config cfg = global.config_path.empty() ? Config{} : load_config(global.config_path);
    if (global.seed) {
        cfg.seed = *global.seed;
        cfg.train.seed = *global.seed;
    }
    cfg.validate();
    return cfg;
}

void run_synth(const Config& cfg, const SynthArgs& args) {
    if (args.test_count > args.count) throw UsageError("--test-count exceeds --count");
    ensure_directory(args.out);
    const bool split = args.test_count > 0;
    if (split) {
        ensure_directory(args.out / "train");
        ensure_directory(args.out / "test");
    }
    const auto specs = phantom_suite(args.count, cfg.seed, cfg.phantom.speckle_sigma);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const Phantom ph = generate(specs[i], cfg.phantom.width, cfg.phantom.height);
        const fs::path dir = !split ? args.out : args.out / (i + args.test_count < args.count ? "train" : "test");
        const std::string name = phantom_name(i);
        save_png(ph.image, dir / (name + ".png"));

        Json planted = Json::array();
        for (const auto& p : ph.planted) planted.push_back({{"kind", p.kind}, {"r", p.r}, {"omega", p.omega}});
        write_json_file(Json{{"name", name},
                             {"width", ph.image.width()},
                             {"height", ph.image.height()},
                             {"boxes", ph.boxes},
                             {"planted", std::move(planted)}},
                        dir / (name + ".json"));
    }
    write_json_file(Json(specs), args.out / kManifest);
    std::cout << Json{{"written", specs.size()}, {"out", args.out.string()}}.dump() << '\n';
}

void run_train(const Config& cfg, const TrainArgs& args) {
    if (args.layers < UnfoldedModel::kMinDepth || args.layers > UnfoldedModel::kMaxDepth) {
        throw UsageError("--layers must lie in [2, 10]");
    }
    const RadonOperator op = operator_from_config(cfg);
    auto named = load_dataset(args.data, cfg, op.image_width(), op.image_height());
    if (args.limit && *args.limit < named.size()) named.resize(*args.limit);
    std::vector<Image> images;
    for (auto& n : named) images.push_back(std::move(n.image));

    TrainConfig tc = cfg.train;
    if (args.epochs) tc.epochs = *args.epochs;
    if (args.lr) tc.initial_lr = *args.lr;
    tc.validate();

    std::ofstream report;
    if (!args.report.empty()) {
        report.open(args.report);
        if (!report) throw IoError("cannot open " + args.report.string());
    }
    UnfoldedModel model = init_model(args.layers, cfg.unfold.channels, cfg.seed, OperatorSpec::of(op),
                                     cfg.unfold.layer_options());
    train(model, op, images, tc, cfg.ssim, [&](const EpochRecord& rec) {
        const std::string line = Json(rec).dump();
        std::cout << line << std::endl;
        if (report.is_open()) report << line << '\n' << std::flush;
    });
    save_checkpoint(model, args.out);
    std::cout << Json{{"checkpoint", args.out.string()}, {"images", images.size()}}.dump() << '\n';
}

void run_detect(const Config& cfg, const DetectArgs& args, std::size_t threads) {
    if (args.solver != "admm" && args.solver != "unfolded") {
        throw UsageError("--solver must be admm or unfolded");
    }
    if (args.solver == "unfolded" && args.ckpt.empty()) throw UsageError("--solver unfolded requires --ckpt");

    std::optional<UnfoldedModel> model;
    if (args.solver == "unfolded") model = load_checkpoint(args.ckpt);
    const RadonOperator op = model ? operator_from_spec(model->operator_spec) : operator_from_config(cfg);
    const Solver solver = model ? Solver{UnfoldedSolver{&*model}} : Solver{AdmmSolver{cfg.admm}};

    std::vector<fs::path> inputs;
    if (fs::is_directory(args.input)) {
        inputs = list_files(args.input, is_raster_file);
        if (inputs.empty()) throw InvalidArgument("no images in " + args.input.string());
    } else {
        inputs.push_back(args.input);
    }
    ensure_directory(args.out);

    std::vector<std::string> summaries(inputs.size());
    parallel_for(inputs.size(), threads, [&](std::size_t i) {
        const std::string stem = inputs[i].stem().string();
        const Image y = fit(load_image(inputs[i]), op.image_width(), op.image_height());
        const DetectionResult result = detect_pipeline(y, op, solver, cfg.detect);
        write_json_file(Json(result.lines), args.out / (stem + ".json"));
        if (args.overlay) save_png(render_overlay(y, result.lines), args.out / (stem + "_overlay.png"));
        Json summary{{"image", inputs[i].string()},
                     {"b_lines", result.of_kind(LineKind::b_line).size()},
                     {"lines", result.lines.size()}};
        if (result.diagnostic) summary["diagnostic"] = *result.diagnostic;
        summaries[i] = summary.dump();
    });
    for (const auto& s : summaries) std::cout << s << '\n';
}

void run_eval(const Config& cfg, const EvalArgs& args, std::size_t threads) {
    if (args.format != "json" && args.format != "csv") throw UsageError("--format must be json or csv");
    const auto truth_files = list_files(args.truth, is_json_file);
    const auto detection_files = list_files(args.detections, is_json_file);
    std::set<std::string> truth_names, detection_names;
    for (const auto& p : truth_files) truth_names.insert(p.stem().string());
    for (const auto& p : detection_files) detection_names.insert(p.stem().string());
    if (truth_names != detection_names) {
        std::vector<std::string> diff;
        std::set_symmetric_difference(truth_names.begin(), truth_names.end(), detection_names.begin(),
                                      detection_names.end(), std::back_inserter(diff));
        throw InvalidArgument("detection and truth sets differ (first mismatch: " + diff.front() + ")");
    }

    std::vector<ImageEval> per_image(truth_files.size());
    parallel_for(truth_files.size(), threads, [&](std::size_t i) {
        const std::string name = truth_files[i].stem().string();
        const Json truth = read_json_file(truth_files[i]);
        std::vector<GroundTruthBox> boxes;
        std::string truth_name;
        std::size_t width = 0, height = 0;
        Json planted;
        ObjectReader(truth, truth_files[i].string())
            .optional("name", truth_name)
            .optional("width", width)
            .optional("height", height)
            .required("boxes", boxes)
            .optional("planted", planted)
            .finish();
        const auto detections =
            parse_json<std::vector<DetectedLine>>(read_json_file(args.detections / (name + ".json")));
        per_image[i] = {name, match(detections, boxes, cfg.match_band)};
    });
    const EvalReport report = evaluate(std::move(per_image));

    std::string text;
    if (args.format == "json") {
        text = Json(report).dump(2) + "\n";
    } else {
        auto row = [](const std::string& name, const MatchCounts& c) {
            const EvalReport m = metrics(c.tp, c.fp, c.fn);
            char buf[256];
            std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%zu,%.3f,%.3f,%.3f\n", name.c_str(), c.tp, c.fp,
                          c.fn, m.precision, m.recall, m.f1);
            return std::string(buf);
        };
        text = "name,tp,fp,fn,precision,recall,f1\n";
        for (const auto& e : report.per_image) text += row(e.name, e.counts);
        text += row("total", {report.tp, report.fp, report.fn});
    }
    if (args.out.empty()) {
        std::cout << text;
    } else {
        write_text(args.out, text);
    }
}

void run_bench(const Config& cfg, const BenchArgs& args) {
    if (args.ckpt.empty()) throw UsageError("bench requires --ckpt");
    if (args.admm_iters == 0) throw UsageError("--admm-iters must be >= 1");
    if (args.repetitions < 3) throw UsageError("--reps must be >= 3");
    const UnfoldedModel model = load_checkpoint(args.ckpt);
    const RadonOperator op = operator_from_spec(model.operator_spec);
    auto named = load_dataset(args.data, cfg, op.image_width(), op.image_height());
    if (named.size() > args.limit) named.resize(args.limit);
    std::vector<Image> images;
    for (auto& n : named) images.push_back(std::move(n.image));

    AdmmConfig admm = cfg.admm;
    admm.max_iter = args.admm_iters;
    admm.fixed_iterations = true;
    const std::vector<BenchSolver> solvers{
        {"admm", [&](const Image& y) { (void)solve(op, y, admm); }},
        {"unfolded", [&](const Image& y) { (void)forward(model, op, y); }},
    };
    const BenchReport report = bench(solvers, images, args.repetitions);
    const std::string text = Json(report).dump(2) + "\n";
    std::cout << text;
    if (!args.out.empty()) write_text(args.out, text);
}

}  // namespace dubline::cli
