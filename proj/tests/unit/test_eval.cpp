#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dubline/error.hpp"
#include "dubline/eval.hpp"

using namespace dubline;

namespace {

DetectedLine b_line(double x, double score) {
    DetectedLine d;
    d.kind = LineKind::b_line;
    d.origin_x = x;
    d.score = score;
    return d;
}

GroundTruthBox box(double x, double width = 20.0) { return {x, width, 50.0, 255.0}; }

// With bands that cannot overlap, every box is matched iff some detection falls in its band.
MatchCounts isolated_band_oracle(const std::vector<DetectedLine>& dets, const std::vector<GroundTruthBox>& boxes,
                                 double half_band) {
    MatchCounts c;
    for (const auto& b : boxes) {
        const bool hit = std::any_of(dets.begin(), dets.end(), [&](const DetectedLine& d) {
            return std::abs(*d.origin_x - b.x_center) <= half_band;
        });
        c.tp += hit;
    }
    c.fp = dets.size() - c.tp;
    c.fn = boxes.size() - c.tp;
    return c;
}

}  // namespace

TEST_CASE("metrics reproduce reference values") {
    const EvalReport a = metrics(100, 160, 61);
    CHECK(round3(a.precision) == 0.385);
    CHECK(round3(a.recall) == 0.621);
    CHECK(round3(a.f1) == 0.475);
    const EvalReport b = metrics(74, 166, 87);
    CHECK(round3(b.precision) == 0.308);
    CHECK(round3(b.recall) == 0.460);
    CHECK(round3(b.f1) == 0.369);
}

TEST_CASE("metrics zero-denominator conventions and F1 symmetry") {
    const EvalReport none = metrics(0, 0, 0);
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
    CHECK(none.f1 == 0.0);
    CHECK(metrics(0, 0, 4).recall == 0.0);
    CHECK(metrics(0, 3, 0).precision == 0.0);
    for (std::size_t tp : {1u, 7u})
        for (std::size_t fp : {0u, 3u, 11u})
            for (std::size_t fn : {0u, 2u, 9u}) {
                const EvalReport m = metrics(tp, fp, fn);
                CHECK(m.f1 == doctest::Approx(metrics(tp, fn, fp).f1));
                CHECK(m.f1 == doctest::Approx(2.0 * tp / (2.0 * tp + fp + fn)));
            }
    CHECK(round3(0.0005) == 0.001);
    CHECK(round3(0.4744) == 0.474);
}

TEST_CASE("matching agrees with the isolated-band oracle") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<GroundTruthBox> boxes;
        const std::size_t nb = std::uniform_int_distribution<std::size_t>(0, 4)(rng);
        for (std::size_t i = 0; i < nb; ++i) boxes.push_back(box(30.0 + 50.0 * static_cast<double>(i)));
        std::vector<DetectedLine> dets;
        const std::size_t nd = std::uniform_int_distribution<std::size_t>(0, 4)(rng);
        std::uniform_real_distribution<double> x(0.0, 260.0), s(0.0, 1.0);
        for (std::size_t i = 0; i < nd; ++i) dets.push_back(b_line(x(rng), s(rng)));
        CHECK(match(dets, boxes) == isolated_band_oracle(dets, boxes, 5.0));
        CHECK(match(dets, boxes, MatchBand::half_width) == isolated_band_oracle(dets, boxes, 10.0));
    }
}

TEST_CASE("matching takes detections by score and the nearest free box") {
    const std::vector<GroundTruthBox> boxes{box(100.0), box(108.0)};
    // The stronger detection lies between both boxes and takes the nearer one (108).
    const std::vector<DetectedLine> dets{b_line(103.0, 0.2), b_line(105.0, 0.9)};
    CHECK(match(dets, boxes) == MatchCounts{2, 0, 0});
    const std::vector<DetectedLine> greedy{b_line(104.5, 0.9), b_line(109.5, 0.2)};
    // 104.5 goes first and takes 108; box 100 is out of band for 109.5.
    CHECK(match(greedy, boxes) == MatchCounts{1, 1, 1});

    DetectedLine no_origin;
    no_origin.kind = LineKind::b_line;
    CHECK(match(std::vector<DetectedLine>{no_origin}, boxes) == MatchCounts{0, 1, 2});
    DetectedLine pleural = b_line(100.0, 1.0);
    pleural.kind = LineKind::pleural;
    CHECK(match(std::vector<DetectedLine>{pleural}, boxes) == MatchCounts{0, 0, 2});
}

TEST_CASE("evaluate sums per-image counts") {
    const EvalReport r = evaluate({{"a", {2, 1, 0}}, {"b", {0, 0, 3}}, {"c", {1, 2, 1}}});
    CHECK(r.tp == 3);
    CHECK(r.fp == 3);
    CHECK(r.fn == 4);
    CHECK(r.per_image.size() == 3);
    CHECK(r.f1 == doctest::Approx(metrics(3, 3, 4).f1));
}

TEST_CASE("bench reports every sample and a near-unit self speedup") {
    volatile double sink = 0.0;
    auto work = [&](const Image& img) {
        double s = 0.0;
        for (int rep = 0; rep < 200; ++rep)
            for (double v : img.values()) s += std::sqrt(v + rep);
        sink = sink + s;
    };
    const std::vector<BenchSolver> solvers{{"first", work}, {"second", work}};
    const std::vector<Image> images(2, Image(64, 64, 0.5));
    const BenchReport r = bench(solvers, images, 3);
    REQUIRE(r.solvers.size() == 2);
    CHECK(r.image_count == 2);
    CHECK(r.repetitions == 3);
    for (const auto& t : r.solvers) {
        CHECK(t.samples.size() == 6);
        CHECK(t.min_seconds <= t.median_seconds);
        CHECK(t.min_seconds <= t.mean_seconds);
        CHECK(t.min_seconds == *std::min_element(t.samples.begin(), t.samples.end()));
    }
    CHECK(r.speedup == doctest::Approx(r.solvers[0].mean_seconds / r.solvers[1].mean_seconds));
    CHECK(r.speedup > 0.67);
    CHECK(r.speedup < 1.5);

    int calls = 0;
    const std::vector<BenchSolver> counting{{"count", [&](const Image&) { ++calls; }}};
    bench(counting, images, 4);
    CHECK(calls == 1 + 2 * 4);  // one warm-up, then every image per repetition

    CHECK_THROWS_AS(bench(solvers, images, 2), InvalidArgument);
    CHECK_THROWS_AS(bench(solvers, std::span<const Image>{}, 3), InvalidArgument);
    CHECK_THROWS_AS(bench(std::span<const BenchSolver>{}, images, 3), InvalidArgument);
}
