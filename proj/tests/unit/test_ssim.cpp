#include <doctest.h>

#include <cmath>

#include "dubline/error.hpp"
#include "dubline/ssim.hpp"
#include "support.hpp"

using namespace dubline;
using dubline::testing::random_image;

namespace {

// Per-window SSIM with explicit 2-D weights, averaged over all full windows.
double ssim_oracle(const Image& a, const Image& b, const SsimConfig& cfg) {
    const std::size_t n = cfg.window;
    std::vector<double> w1(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(i) - 0.5 * static_cast<double>(n - 1);
        w1[i] = cfg.kind == SsimWindow::gaussian ? std::exp(-d * d / (2 * cfg.sigma * cfg.sigma)) : 1.0;
        s += w1[i];
    }
    for (double& v : w1) v /= s;

    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t r0 = 0; r0 + n <= a.height(); ++r0) {
        for (std::size_t c0 = 0; c0 + n <= a.width(); ++c0) {
            double ma = 0, mb = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    ma += w1[i] * w1[j] * a(r0 + i, c0 + j);
                    mb += w1[i] * w1[j] * b(r0 + i, c0 + j);
                }
            double va = 0, vb = 0, cov = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const double da = a(r0 + i, c0 + j) - ma, db = b(r0 + i, c0 + j) - mb;
                    va += w1[i] * w1[j] * da * da;
                    vb += w1[i] * w1[j] * db * db;
                    cov += w1[i] * w1[j] * da * db;
                }
            total += ((2 * ma * mb + cfg.c1) * (2 * cov + cfg.c2)) /
                     ((ma * ma + mb * mb + cfg.c1) * (va + vb + cfg.c2));
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

}  // namespace

TEST_CASE("SSIM of an image with itself is one") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Image a = random_image(20, 17, seed);
        CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("SSIM is symmetric and bounded") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Image a = random_image(16, 16, seed, -1.0, 1.0);
        const Image b = random_image(16, 16, seed + 100, -1.0, 1.0);
        const double ab = ssim(a, b);
        CHECK(std::abs(ab - ssim(b, a)) <= 1e-10);
        CHECK(ab >= -1.0);
        CHECK(ab <= 1.0);
    }
    Image a = random_image(16, 16, 1);
    Image neg = a;
    for (double& v : neg.values()) v = 1.0 - v;
    const double anti = ssim(a, neg);
    CHECK(anti >= -1.0);
    CHECK(anti < 0.0);
}

TEST_CASE("SSIM between constant images has a closed form") {
    const SsimConfig cfg;
    const double got = ssim(Image(16, 16, 0.0), Image(16, 16, 1.0), cfg);
    CHECK(std::abs(got - cfg.c1 / (1.0 + cfg.c1)) <= 1e-10);
    // General constants p, q: (2pq + c1) / (p^2 + q^2 + c1).
    const double p = 0.3, q = 0.7;
    CHECK(ssim(Image(12, 12, p), Image(12, 12, q), cfg) ==
          doctest::Approx((2 * p * q + cfg.c1) / (p * p + q * q + cfg.c1)).epsilon(1e-12));
}

TEST_CASE("SSIM matches the direct windowed definition") {
    SsimConfig uniform;
    uniform.kind = SsimWindow::uniform;
    uniform.window = 7;
    for (const SsimConfig& cfg : {SsimConfig{}, uniform}) {
        const Image a = random_image(19, 14, 3);
        const Image b = random_image(19, 14, 4);
        CHECK(ssim(a, b, cfg) == doctest::Approx(ssim_oracle(a, b, cfg)).epsilon(1e-12));
    }
}

TEST_CASE("SSIM gradient matches central differences") {
    const SsimConfig cfg;
    const Image a = random_image(14, 13, 5);
    const Image b = random_image(14, 13, 6);
    Image grad;
    const double value = ssim_with_gradient(a, b, cfg, grad);
    CHECK(value == doctest::Approx(ssim(a, b, cfg)).epsilon(1e-14));
    const double h = 1e-6;
    for (std::size_t i = 0; i < a.size(); i += 3) {
        Image p = a, m = a;
        p.values()[i] += h;
        m.values()[i] -= h;
        const double fd = (ssim(p, b, cfg) - ssim(m, b, cfg)) / (2 * h);
        CHECK(grad.values()[i] == doctest::Approx(fd).epsilon(1e-5).scale(1e-3));
    }
}

TEST_CASE("SSIM input validation") {
    CHECK_THROWS_AS(ssim(Image(16, 16), Image(16, 15)), ShapeMismatch);
    CHECK_THROWS_AS(ssim(Image(10, 10), Image(10, 10)), InvalidArgument);
    SsimConfig even;
    even.window = 4;
    CHECK_THROWS_AS(ssim(Image(16, 16), Image(16, 16), even), InvalidArgument);
    const SsimConfig scaled = SsimConfig::for_range(255.0);
    CHECK(scaled.c1 == doctest::Approx(2.55 * 2.55));
    CHECK(scaled.c2 == doctest::Approx(7.65 * 7.65));
}
