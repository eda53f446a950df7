#include "dubline/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "dubline/error.hpp"

namespace dubline {

namespace {

constexpr double kFwhmToSigma = 0.4246609001440095;  // 1 / (2 sqrt(2 ln 2))
// Fraction of the height occupied by the bright near-field tissue band.
constexpr double kNearFieldExtent = 0.1;
constexpr double kNearFieldGain = 0.25;

double gaussian_profile(double distance, double fwhm) {
    const double sigma = fwhm * kFwhmToSigma;
    return std::exp(-0.5 * distance * distance / (sigma * sigma));
}

// Smooth 0 -> 1 ramp over one pixel around `edge`.
double soft_step(double v, double edge) { return std::clamp(v - edge + 0.5, 0.0, 1.0); }

Image gaussian_blur(const Image& in, double sigma) {
    const auto radius = static_cast<long>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (long i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;

    const auto h = static_cast<long>(in.height());
    const auto w = static_cast<long>(in.width());
    Image tmp(in.width(), in.height());
    for (long r = 0; r < h; ++r) {
        for (long c = 0; c < w; ++c) {
            double acc = 0.0;
            for (long i = -radius; i <= radius; ++i) {
                const long cc = std::clamp(c + i, 0L, w - 1);
                acc += k[static_cast<std::size_t>(i + radius)] *
                       in(static_cast<std::size_t>(r), static_cast<std::size_t>(cc));
            }
            tmp(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc;
        }
    }
    Image out(in.width(), in.height());
    for (long r = 0; r < h; ++r) {
        for (long c = 0; c < w; ++c) {
            double acc = 0.0;
            for (long i = -radius; i <= radius; ++i) {
                const long rr = std::clamp(r + i, 0L, h - 1);
                acc += k[static_cast<std::size_t>(i + radius)] *
                       tmp(static_cast<std::size_t>(rr), static_cast<std::size_t>(c));
            }
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc;
        }
    }
    return out;
}

std::vector<double> a_line_rows(const PhantomSpec& spec, std::size_t height) {
    const auto h = static_cast<double>(height);
    const double pleural_row = spec.pleural_depth * h;
    const double spacing = (spec.a_line_spacing > 0.0 ? spec.a_line_spacing : spec.pleural_depth) * h;
    std::vector<double> rows;
    for (std::size_t j = 0; j < spec.a_line_count; ++j) {
        const double row = pleural_row + static_cast<double>(j + 1) * spacing;
        if (row > h - 1.0 - 2.0 * spec.line_width_px) break;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

void PhantomSpec::validate(std::size_t width, std::size_t height, double merge_tolerance_px) const {
    auto fraction = [](double v) { return v > 0.0 && v < 1.0; };
    if (width < 8 || height < 8) throw InvalidArgument("phantom must be at least 8x8");
    if (!fraction(pleural_depth)) throw InvalidArgument("pleural_depth must lie in (0, 1)");
    if (a_line_spacing < 0.0 || a_line_spacing >= 1.0) {
        throw InvalidArgument("a_line_spacing must lie in [0, 1)");
    }
    if (!(line_width_px > 0.0) || !(box_width_px > 0.0)) {
        throw InvalidArgument("line and box widths must be > 0");
    }
    if (pleural_intensity < 0.0 || a_line_intensity < 0.0 || a_line_decay < 0.0 ||
        background_gain < 0.0 || speckle_sigma < 0.0 || blur_radius < 0.0) {
        throw InvalidArgument("phantom intensities and noise levels must be >= 0");
    }
    const auto w = static_cast<double>(width);
    for (std::size_t i = 0; i < b_lines.size(); ++i) {
        const auto& b = b_lines[i];
        if (!fraction(b.origin)) throw InvalidArgument("B-line origin must lie in (0, 1)");
        if (!(b.width_px > 0.0) || b.intensity < 0.0) {
            throw InvalidArgument("B-line width must be > 0 and intensity >= 0");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(b.origin - b_lines[j].origin) * w <= merge_tolerance_px) {
                std::ostringstream msg;
                msg << "B-line origins " << b_lines[j].origin << " and " << b.origin
                    << " are within the merge tolerance";
                throw InvalidArgument(msg.str());
            }
        }
    }
    const std::size_t rendered_a_lines = a_line_rows(*this, height).size();
    for (const auto& t : truncated_lines) {
        if (!fraction(t.origin) || !(t.width_px > 0.0) || t.intensity < 0.0) {
            throw InvalidArgument("invalid truncated line");
        }
        if (t.stop_a_line >= rendered_a_lines) {
            throw InvalidArgument("truncated line stops at an A-line that is not rendered");
        }
    }
}

Phantom generate(const PhantomSpec& spec, std::size_t width, std::size_t height) {
    spec.validate(width, height);
    const auto w = static_cast<double>(width);
    const auto h = static_cast<double>(height);
    const double cx = 0.5 * (w - 1.0);
    const double cy = 0.5 * (h - 1.0);
    const double pleural_row = spec.pleural_depth * h;
    const auto a_rows = a_line_rows(spec, height);

    Phantom out;
    out.planted.push_back({LineKind::pleural, pleural_row - cy, 90.0});
    for (double row : a_rows) out.planted.push_back({LineKind::a_line, row - cy, 90.0});
    for (const auto& b : spec.b_lines) {
        const double col = b.origin * w;
        out.planted.push_back({LineKind::b_line, col - cx, 0.0});
        out.boxes.push_back({col, spec.box_width_px, pleural_row, h - 1.0});
    }

    Image img(width, height);
    const double near_rows = kNearFieldExtent * h;
    for (std::size_t r = 0; r < height; ++r) {
        const auto row = static_cast<double>(r);
        double base = spec.background_gain;
        if (row < near_rows) base += kNearFieldGain * (1.0 - row / near_rows);
        double horizontal = spec.pleural_intensity * gaussian_profile(row - pleural_row, spec.line_width_px);
        double a_gain = spec.a_line_intensity;
        for (double a_row : a_rows) {
            horizontal += a_gain * gaussian_profile(row - a_row, spec.line_width_px);
            a_gain *= spec.a_line_decay;
        }
        const double below_pleura = soft_step(row, pleural_row);
        for (std::size_t c = 0; c < width; ++c) {
            const auto col = static_cast<double>(c);
            double vertical = 0.0;
            for (const auto& b : spec.b_lines) {
                vertical += b.intensity * below_pleura * gaussian_profile(col - b.origin * w, b.width_px);
            }
            for (const auto& t : spec.truncated_lines) {
                const double stop = a_rows[t.stop_a_line];
                const double span = below_pleura * (1.0 - soft_step(row, stop));
                vertical += t.intensity * span * gaussian_profile(col - t.origin * w, t.width_px);
            }
            img(r, c) = base + horizontal + vertical;
        }
    }

    if (spec.speckle_sigma > 0.0) {
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        const double shift = 0.5 * spec.speckle_sigma * spec.speckle_sigma;
        for (double& v : img.values()) v *= std::exp(spec.speckle_sigma * normal(rng) - shift);
    }
    if (spec.blur_radius > 0.0) img = gaussian_blur(img, spec.blur_radius);
    for (double& v : img.values()) v = std::clamp(v, 0.0, 1.0);
    out.image = std::move(img);
    return out;
}

PhantomSpec random_phantom_spec(std::uint64_t seed, double speckle_sigma) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    auto integer = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

    PhantomSpec spec;
    spec.seed = seed;
    spec.speckle_sigma = speckle_sigma;
    spec.pleural_depth = uniform(0.25, 0.35);
    spec.pleural_intensity = uniform(0.65, 0.85);
    spec.a_line_count = static_cast<std::size_t>(integer(0, 2));
    spec.a_line_intensity = uniform(0.3, 0.45);
    spec.background_gain = uniform(0.1, 0.2);

    const int b_count = integer(0, 3);
    // Keep origins apart by more than a ground-truth box width.
    const double min_gap = 1.2 * spec.box_width_px / 256.0;
    for (int attempt = 0; attempt < 1000 && static_cast<int>(spec.b_lines.size()) < b_count; ++attempt) {
        const double origin = uniform(0.15, 0.85);
        const bool clear = std::all_of(spec.b_lines.begin(), spec.b_lines.end(),
                                       [&](const BLineSpec& b) { return std::abs(b.origin - origin) > min_gap; });
        if (!clear) continue;
        spec.b_lines.push_back({origin, uniform(3.0, 6.0), uniform(0.4, 0.7)});
    }
    std::sort(spec.b_lines.begin(), spec.b_lines.end(),
              [](const BLineSpec& a, const BLineSpec& b) { return a.origin < b.origin; });
    return spec;
}

std::vector<PhantomSpec> phantom_suite(std::size_t count, std::uint64_t first_seed,
                                       double speckle_sigma) {
    std::vector<PhantomSpec> specs;
    specs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        specs.push_back(random_phantom_spec(first_seed + i, speckle_sigma));
    }
    return specs;
}

Image straight_line_phantom(std::size_t width, std::size_t height,
                            const std::vector<StraightLine>& lines, double width_px) {
    if (!(width_px > 0.0)) throw InvalidArgument("line width must be > 0");
    Image img(width, height);
    const double cx = 0.5 * static_cast<double>(width - 1);
    const double cy = 0.5 * static_cast<double>(height - 1);
    for (const auto& line : lines) {
        const double c = std::cos(line.omega * std::numbers::pi / 180.0);
        const double s = std::sin(line.omega * std::numbers::pi / 180.0);
        for (std::size_t r = 0; r < height; ++r) {
            const double y = static_cast<double>(r) - cy;
            for (std::size_t col = 0; col < width; ++col) {
                const double x = static_cast<double>(col) - cx;
                img(r, col) += line.intensity * gaussian_profile(x * c + y * s - line.r, width_px);
            }
        }
    }
    for (double& v : img.values()) v = std::clamp(v, 0.0, 1.0);
    return img;
}

}  // namespace dubline
