#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Sandbox {
public:
    Sandbox() : root_(fs::temp_directory_path() / "dubline_cli_test") {
        fs::remove_all(root_);
        fs::create_directories(root_);
        std::ofstream(root_ / "small.json") << R"({
            "image_width": 64, "image_height": 64,
            "phantom": {"width": 64, "height": 64},
            "admm": {"max_iter": 30},
            "unfold": {"channels": 4},
            "train": {"epochs": 1}
        })";
    }
    ~Sandbox() { fs::remove_all(root_); }

    const fs::path& root() const { return root_; }

    Run run(const std::string& args) const {
        const fs::path out = root_ / "stdout.txt";
        const fs::path err = root_ / "stderr.txt";
        const std::string cmd = std::string("\"") + DUBLINE_CLI_PATH + "\" " + args + " > \"" + out.string() +
                                "\" 2> \"" + err.string() + "\"";
        const int status = std::system(cmd.c_str());
        Run r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    std::string small() const { return "--config \"" + (root_ / "small.json").string() + "\" "; }
    std::string path(const std::string& rel) const { return "\"" + (root_ / rel).string() + "\""; }

private:
    fs::path root_;
};

std::size_t count_with_extension(const fs::path& dir, const std::string& ext) {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ext;
    return n;
}

}  // namespace

TEST_CASE("synth with count 0 writes an empty manifest") {
    const Sandbox box;
    const Run r = box.run("synth --count 0 --out " + box.path("empty"));
    REQUIRE(r.code == 0);
    CHECK(json::parse(slurp(box.root() / "empty" / "manifest.json")) == json::array());
    CHECK(json::parse(r.out).at("written") == 0);
}

TEST_CASE("usage errors exit with 2 and a single JSON line") {
    const Sandbox box;
    Run r = box.run("train --data x --layers 11 --out y.ckpt");
    CHECK(r.code == 2);
    CHECK(r.err.find("10") != std::string::npos);
    CHECK(r.err.find('\n') == r.err.size() - 1);
    CHECK(json::parse(r.err).at("error") == "usage");

    fs::create_directories(box.root() / "in");
    r = box.run("detect --input " + box.path("in") + " --solver unfolded --out " + box.path("o"));
    CHECK(r.code == 2);
    CHECK(json::parse(r.err).at("error") == "usage");

    CHECK(box.run("frobnicate").code == 2);
    CHECK(box.run("").code == 2);
    CHECK(box.run("--help").code == 0);
}

TEST_CASE("synth, train, detect and eval end to end") {
    const Sandbox box;
    Run r = box.run(box.small() + "--seed 3 synth --count 4 --test-count 2 --out " + box.path("suite"));
    REQUIRE(r.code == 0);
    CHECK(count_with_extension(box.root() / "suite" / "train", ".png") == 2);
    CHECK(count_with_extension(box.root() / "suite" / "test", ".png") == 2);
    const json truth = json::parse(slurp(box.root() / "suite" / "test" / "phantom_0002.json"));
    CHECK(truth.at("width") == 64);
    CHECK(truth.contains("boxes"));

    // Same seed, same bytes.
    REQUIRE(box.run(box.small() + "--seed 3 synth --count 4 --test-count 2 --out " + box.path("again")).code == 0);
    CHECK(slurp(box.root() / "suite" / "test" / "phantom_0003.png") ==
          slurp(box.root() / "again" / "test" / "phantom_0003.png"));

    r = box.run(box.small() + "train --data " + box.path("suite/train") + " --layers 2 --out " +
                box.path("m.ckpt") + " --report " + box.path("report.jsonl"));
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(fs::exists(box.root() / "m.ckpt"));
    CHECK(json::parse(slurp(box.root() / "report.jsonl")).at("epoch") == 1);

    r = box.run(box.small() + "--threads 2 detect --input " + box.path("suite/test") +
                " --solver unfolded --ckpt " + box.path("m.ckpt") + " --out " + box.path("det_u") + " --overlay");
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(count_with_extension(box.root() / "det_u", ".json") == 2);
    CHECK(fs::exists(box.root() / "det_u" / "phantom_0002_overlay.png"));

    r = box.run(box.small() + "detect --input " + box.path("suite/test") + " --out " + box.path("det_a"));
    REQUIRE_MESSAGE(r.code == 0, r.err);

    r = box.run(box.small() + "--threads 2 eval --detections " + box.path("det_a") + " --truth " +
                box.path("suite/test"));
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const json report = json::parse(r.out);
    CHECK(report.at("per_image").size() == 2);
    CHECK(report.at("f1").get<double>() >= 0.0);

    r = box.run(box.small() + "bench --data " + box.path("suite/test") + " --ckpt " + box.path("m.ckpt") +
                " --admm-iters 5 --reps 3 --limit 1");
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const json bench = json::parse(r.out);
    CHECK(bench.at("repetitions") == 3);
    CHECK(bench.at("solvers").size() == 2);

    CHECK(box.run(box.small() + "bench --data " + box.path("suite/test") + " --ckpt " + box.path("m.ckpt") +
                  " --reps 2").code == 2);
}

TEST_CASE("eval counts match a hand-built fixture and reject mismatched sets") {
    const Sandbox box;
    fs::create_directories(box.root() / "truth");
    fs::create_directories(box.root() / "det");
    json boxes = json::array();
    for (int i = 0; i < 161; ++i) {
        boxes.push_back({{"x_center", 100.0 * i}, {"width", 20.0}, {"y_top", 50.0}, {"y_bottom", 255.0}});
    }
    json dets = json::array();
    for (int i = 0; i < 100; ++i) dets.push_back({{"kind", "b_line"}, {"r", 0.0}, {"omega", 0.0}, {"score", 1.0}, {"origin_x", 100.0 * i + 1.0}});
    for (int i = 0; i < 160; ++i) dets.push_back({{"kind", "b_line"}, {"r", 0.0}, {"omega", 0.0}, {"score", 0.5}, {"origin_x", 100.0 * i + 50.0}});
    std::ofstream(box.root() / "truth" / "scan.json") << json{{"boxes", boxes}}.dump();
    std::ofstream(box.root() / "det" / "scan.json") << dets.dump();

    Run r = box.run("eval --detections " + box.path("det") + " --truth " + box.path("truth") + " --format csv");
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(r.out.find("total,100,160,61,0.385,0.621,0.475") != std::string::npos);

    std::ofstream(box.root() / "det" / "scan.json") << "[]";
    r = box.run("eval --detections " + box.path("det") + " --truth " + box.path("truth"));
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("recall") == 0.0);

    std::ofstream(box.root() / "det" / "other.json") << "[]";
    r = box.run("eval --detections " + box.path("det") + " --truth " + box.path("truth"));
    CHECK(r.code == 1);
    CHECK(json::parse(r.err).at("error") == "invalid_argument");
}
