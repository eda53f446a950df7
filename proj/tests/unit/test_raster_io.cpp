#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "dubline/error.hpp"
#include "dubline/raster_io.hpp"
#include "support.hpp"

using namespace dubline;
using dubline::testing::random_image;

namespace {

std::filesystem::path temp(const char* name) { return std::filesystem::temp_directory_path() / name; }

Image quantized(const Image& img) {
    Image q = img;
    for (double& v : q.values()) v = std::round(v * 255.0) / 255.0;
    return q;
}

}  // namespace

TEST_CASE("PNG and PGM round trips are exact at 8-bit levels") {
    const Image img = quantized(random_image(23, 17, 4));
    for (const char* name : {"dubline_rt.png", "dubline_rt.pgm"}) {
        const auto path = temp(name);
        if (path.extension() == ".png") save_png(img, path); else save_pgm(img, path);
        const Image back = load_image(path);
        std::filesystem::remove(path);
        REQUIRE(back.width() == 23);
        REQUIRE(back.height() == 17);
        for (std::size_t i = 0; i < img.size(); ++i) CHECK(back.values()[i] == doctest::Approx(img.values()[i]).epsilon(1e-12));
    }
}

TEST_CASE("ASCII PGM with 16-bit samples") {
    const auto path = temp("dubline_ascii.pgm");
    std::ofstream(path) << "P2\n# comment\n3 2\n65535\n0 65535 32768\n1 2 3\n";
    const Image img = load_image(path);
    std::filesystem::remove(path);
    REQUIRE(img.width() == 3);
    REQUIRE(img.height() == 2);
    CHECK(img(0, 0) == 0.0);
    CHECK(img(0, 1) == 1.0);
    CHECK(img(0, 2) == doctest::Approx(32768.0 / 65535.0));
    CHECK(img(1, 2) == doctest::Approx(3.0 / 65535.0));
}

TEST_CASE("load errors") {
    CHECK_THROWS_AS(load_image(temp("dubline_missing.png")), IoError);
    const auto junk = temp("dubline_junk.png");
    std::ofstream(junk) << "not a png";
    CHECK_THROWS(load_image(junk));
    std::filesystem::remove(junk);
    CHECK(is_raster_file("a/b.PNG"));
    CHECK(is_raster_file("x.pgm"));
    CHECK_FALSE(is_raster_file("x.json"));
}

TEST_CASE("resize preserves constants and identity") {
    const Image img = random_image(12, 9, 2);
    CHECK(resize(img, 12, 9) == img);
    const Image flat = resize(Image(10, 10, 0.4), 23, 7);
    CHECK(flat.width() == 23);
    CHECK(flat.height() == 7);
    for (double v : flat.values()) CHECK(v == doctest::Approx(0.4));
    // A horizontal ramp stays a ramp: pixel-centre aligned sampling of x.
    Image ramp(8, 4);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 8; ++c) ramp(r, c) = static_cast<double>(c);
    const Image up = resize(ramp, 16, 4);
    for (std::size_t c = 1; c + 1 < 16; ++c) CHECK(up(1, c) == doctest::Approx((static_cast<double>(c) + 0.5) / 2.0 - 0.5));
}

TEST_CASE("overlay marks detected lines in their colours") {
    const Image img(32, 32, 0.5);
    DetectedLine b;
    b.kind = LineKind::b_line;
    b.r = 0.0;
    b.omega = 0.0;
    DetectedLine pl;
    pl.kind = LineKind::pleural;
    pl.r = -8.0;
    pl.omega = 90.0;
    const RgbImage out = render_overlay(img, {b, pl});
    REQUIRE(out.data.size() == 32 * 32 * 3);
    auto px = [&](std::size_t r, std::size_t c) { return &out.data[(r * 32 + c) * 3]; };
    // Vertical line through x = 15.5 touches columns 15 and 16.
    CHECK(px(28, 15)[1] > px(28, 15)[0]);
    CHECK(px(28, 15)[1] > px(28, 15)[2]);
    CHECK(px(28, 2)[0] == px(28, 2)[1]);
    const auto* yellow = px(7, 3);  // row 15.5 - 8 = 7.5
    CHECK(yellow[0] > yellow[2]);
    CHECK(yellow[1] > yellow[2]);
}
