#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dubline/detect.hpp"
#include "dubline/error.hpp"
#include "dubline/phantom.hpp"
#include "support.hpp"

using namespace dubline;
using dubline::testing::random_image;

namespace {

double rad(double deg) { return deg * std::numbers::pi / 180.0; }

double nearest_origin_gap(const std::vector<DetectedLine>& lines, double x) {
    double best = 1e9;
    for (const auto& l : lines) best = std::min(best, std::abs(*l.origin_x - x));
    return best;
}

}  // namespace

TEST_CASE("intersect returns a point on both lines") {
    const double pairs[][4] = {{3.0, 90.0, -5.0, 0.0}, {10.0, 88.0, 2.0, -7.0}, {-4.0, 93.0, 6.0, 12.0}};
    for (const auto& p : pairs) {
        const auto pt = intersect(p[0], p[1], p[2], p[3]);
        REQUIRE(pt.has_value());
        CHECK(pt->x * std::cos(rad(p[1])) + pt->y * std::sin(rad(p[1])) == doctest::Approx(p[0]));
        CHECK(pt->x * std::cos(rad(p[3])) + pt->y * std::sin(rad(p[3])) == doctest::Approx(p[2]));
    }
    CHECK_FALSE(intersect(1.0, 30.0, 4.0, 30.0).has_value());
    CHECK_FALSE(intersect(1.0, 30.0, 4.0, 210.0).has_value());
}

TEST_CASE("line depth of horizontal and tilted lines") {
    CHECK(line_depth(12.0, 90.0) == doctest::Approx(12.0));
    CHECK(line_depth(-7.0, 90.0) == doctest::Approx(-7.0));
    CHECK(line_depth(10.0, 85.0) == doctest::Approx(10.0 / std::sin(rad(85.0))));
}

TEST_CASE("dim_top ramps the top rows and leaves the rest alone") {
    const DetectConfig cfg;
    const Image y = random_image(20, 40, 1, 0.5, 1.0);
    const Image d = dim_top(y, cfg);
    for (std::size_t c = 0; c < 20; ++c) CHECK(d(0, c) == doctest::Approx(cfg.dim_min_gain * y(0, c)));
    double previous_gain = 0.0;
    for (std::size_t r = 0; r < 40; ++r) {
        const double gain = d(r, 3) / y(r, 3);
        CHECK(gain >= previous_gain - 1e-12);
        CHECK(gain <= 1.0 + 1e-12);
        previous_gain = gain;
        if (static_cast<double>(r) >= cfg.dim_fraction * 40.0 + 1.0) {
            for (std::size_t c = 0; c < 20; ++c) CHECK(d(r, c) == y(r, c));
        }
    }
}

TEST_CASE("find_peaks thresholds, suppresses neighbours and sorts by score") {
    const AngleSet angles = default_angle_set();
    Sinogram s(41, angles);
    auto put = [&](std::size_t bin, double deg, double v) { s(bin, *angles.index_of(deg)) = v; };
    put(10, 0.0, 5.0);
    put(12, 1.0, 4.0);   // within the suppression window of the first
    put(30, -8.0, 3.0);
    put(20, 5.0, 1.0);   // below 0.4 of the band maximum
    put(5, 90.0, 9.0);   // outside the vertical band
    const DetectConfig cfg;
    const auto peaks = find_peaks(s, AngleSet::vertical_band(), cfg);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].bin == 10);
    CHECK(peaks[0].omega == 0.0);
    CHECK(peaks[0].score == 5.0);
    CHECK(peaks[0].r == doctest::Approx(s.radius_of(10)));
    CHECK(peaks[1].bin == 30);
    CHECK(peaks[1].omega == -8.0);

    const auto horizontal = find_peaks(s, AngleSet::horizontal_band(), cfg);
    REQUIRE(horizontal.size() == 1);
    CHECK(horizontal[0].omega == 90.0);
    CHECK(find_peaks(Sinogram(41, angles), AngleSet::vertical_band(), cfg).empty());
}

TEST_CASE("pipeline finds the pleural line and B-lines of a clean phantom") {
    PhantomSpec spec;
    spec.speckle_sigma = 0.0;
    spec.a_line_count = 1;
    spec.b_lines = {{0.3, 4.0, 0.6}, {0.7, 4.0, 0.6}};
    const std::size_t n = 128;
    const Phantom ph = generate(spec, n, n);
    const RadonOperator op = build_operator(n, n, default_angle_set());
    const DetectionResult res = detect_pipeline(ph.image, op, AdmmSolver{}, DetectConfig{});
    CHECK_FALSE(res.diagnostic.has_value());

    const auto pleural = res.of_kind(LineKind::pleural);
    REQUIRE(pleural.size() == 1);
    const double true_row = spec.pleural_depth * static_cast<double>(n);
    CHECK(std::abs(line_depth(pleural[0].r, pleural[0].omega) + 0.5 * (n - 1) - true_row) <= 2.0);

    const auto b = res.of_kind(LineKind::b_line);
    REQUIRE(b.size() == 2);
    for (const auto& box : ph.boxes) CHECK(nearest_origin_gap(b, box.x_center) <= 3.0);
    for (const auto& l : b) CHECK(l.omega >= -15.0);
    CHECK(res.of_kind(LineKind::a_line).size() >= 1);
}

TEST_CASE("a vertical line that stops at an A-line is not a B-line") {
    PhantomSpec spec;
    spec.speckle_sigma = 0.0;
    spec.a_line_count = 2;
    spec.b_lines = {{0.25, 4.0, 0.6}};
    spec.truncated_lines = {{0.7, 4.0, 0.6, 0}};
    const std::size_t n = 128;
    const Phantom ph = generate(spec, n, n);
    REQUIRE(ph.boxes.size() == 1);
    const RadonOperator op = build_operator(n, n, default_angle_set());
    const auto b = detect_pipeline(ph.image, op, AdmmSolver{}, DetectConfig{}).of_kind(LineKind::b_line);
    REQUIRE(b.size() == 1);
    CHECK(std::abs(*b[0].origin_x - ph.boxes[0].x_center) <= 3.0);
}

TEST_CASE("speckle without B-lines yields no B-lines") {
    PhantomSpec spec;
    spec.b_lines.clear();
    spec.a_line_count = 1;
    const std::size_t n = 128;
    const Phantom ph = generate(spec, n, n);
    const RadonOperator op = build_operator(n, n, default_angle_set());
    const DetectionResult res = detect_pipeline(ph.image, op, AdmmSolver{}, DetectConfig{});
    CHECK(res.of_kind(LineKind::pleural).size() == 1);
    CHECK(res.of_kind(LineKind::b_line).empty());
}

TEST_CASE("blank image yields no lines and a diagnostic") {
    const RadonOperator op = build_operator(32, 32, default_angle_set());
    const DetectionResult res = detect_pipeline(Image(32, 32), op, AdmmSolver{}, DetectConfig{});
    CHECK(res.lines.empty());
    CHECK(res.diagnostic.has_value());
}

TEST_CASE("detect config validation and unfolded solver guard") {
    DetectConfig cfg;
    cfg.peak_rel_threshold = 1.5;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = DetectConfig{};
    cfg.b_line_flank_px = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    const RadonOperator op = build_operator(16, 16, default_angle_set());
    CHECK_THROWS(restore(Image(16, 16), op, UnfoldedSolver{nullptr}));
}
