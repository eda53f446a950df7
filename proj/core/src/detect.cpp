#include "dubline/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dubline/error.hpp"

namespace dubline {

std::string_view to_string(LineKind kind) noexcept {
    switch (kind) {
        case LineKind::pleural: return "pleural";
        case LineKind::a_line: return "a_line";
        case LineKind::b_line: return "b_line";
    }
    return "b_line";
}

LineKind line_kind_from_string(std::string_view name) {
    if (name == "pleural") return LineKind::pleural;
    if (name == "a_line") return LineKind::a_line;
    if (name == "b_line") return LineKind::b_line;
    throw InvalidArgument("unknown line kind '" + std::string(name) + "'");
}

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kHorizontalLo = 85.0;
constexpr double kHorizontalHi = 95.0;
constexpr double kVerticalLo = -15.0;
constexpr double kVerticalHi = 15.0;
// Rows skipped on either side of a horizontal line when sampling intensities.
constexpr double kSampleMargin = 3.0;

AngleSet band_of(const AngleSet& angles, double lo, double hi) {
    std::vector<double> picked;
    for (double a : angles.degrees()) {
        if (a >= lo - 1e-9 && a <= hi + 1e-9) picked.push_back(a);
    }
    if (picked.empty()) {
        std::ostringstream msg;
        msg << "restored sinogram has no angles in [" << lo << ", " << hi << "]";
        throw InvalidArgument(msg.str());
    }
    return AngleSet(std::move(picked), angles.step());
}

double bilinear(const Image& img, double row, double col) {
    if (row < 0.0 || col < 0.0) return 0.0;
    const auto h = static_cast<double>(img.height());
    const auto w = static_cast<double>(img.width());
    if (row > h - 1.0 || col > w - 1.0) return 0.0;
    const auto r0 = static_cast<std::size_t>(std::floor(row));
    const auto c0 = static_cast<std::size_t>(std::floor(col));
    const std::size_t r1 = std::min(r0 + 1, img.height() - 1);
    const std::size_t c1 = std::min(c0 + 1, img.width() - 1);
    const double fr = row - static_cast<double>(r0);
    const double fc = col - static_cast<double>(c0);
    return (1 - fr) * ((1 - fc) * img(r0, c0) + fc * img(r0, c1)) +
           fr * ((1 - fc) * img(r1, c0) + fc * img(r1, c1));
}

// Mean intensity along a near-vertical line between two offsets from the
// image centre (y pointing down). Returns nullopt when the segment is empty.
std::optional<double> mean_along(const Image& img, double r, double omega, double y_from,
                                 double y_to) {
    const double cx = 0.5 * static_cast<double>(img.width() - 1);
    const double cy = 0.5 * static_cast<double>(img.height() - 1);
    const double c = std::cos(omega * kDegToRad);
    const double s = std::sin(omega * kDegToRad);
    const double lo = std::max(y_from, -cy);
    const double hi = std::min(y_to, cy);
    double sum = 0.0;
    std::size_t count = 0;
    for (double y = std::ceil(lo); y <= hi; y += 1.0) {
        const double x = (r - y * s) / c;
        sum += bilinear(img, y + cy, x + cx);
        ++count;
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

// Mean along the line minus the mean along parallel lines shifted
// horizontally by +-offset. Flanks leaving the image are skipped.
double flank_contrast(const Image& img, double r, double omega, double y_from, double y_to,
                      double offset) {
    const auto centre = mean_along(img, r, omega, y_from, y_to);
    if (!centre) return 0.0;
    const double shift = offset * std::cos(omega * kDegToRad);
    const double half_width = 0.5 * static_cast<double>(img.width() - 1);
    double flank_sum = 0.0;
    int flanks = 0;
    for (double side : {-1.0, 1.0}) {
        const double rs = r + side * shift;
        if (std::abs(rs) > half_width) continue;
        if (const auto m = mean_along(img, rs, omega, y_from, y_to)) {
            flank_sum += *m;
            ++flanks;
        }
    }
    if (flanks == 0) return 0.0;
    return *centre - flank_sum / flanks;
}

}  // namespace

std::optional<Point> intersect(double r1, double omega1, double r2, double omega2) noexcept {
    const double c1 = std::cos(omega1 * kDegToRad);
    const double s1 = std::sin(omega1 * kDegToRad);
    const double c2 = std::cos(omega2 * kDegToRad);
    const double s2 = std::sin(omega2 * kDegToRad);
    const double det = c1 * s2 - s1 * c2;
    if (std::abs(det) < 1e-12) return std::nullopt;
    return Point{(r1 * s2 - r2 * s1) / det, (c1 * r2 - c2 * r1) / det};
}

double line_depth(double r, double omega) noexcept { return r / std::sin(omega * kDegToRad); }

void DetectConfig::validate() const {
    auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
    if (!in_unit(dim_fraction) || !in_unit(dim_min_gain) || !in_unit(peak_rel_threshold) ||
        !in_unit(overpass_intensity_ratio)) {
        throw InvalidArgument("detection fractions must lie in (0, 1]");
    }
    if (!(merge_tolerance_px > 0.0) || peak_min_separation.radius_bins == 0 ||
        !(peak_min_separation.degrees > 0.0)) {
        throw InvalidArgument("detection tolerances must be positive");
    }
    if (!(b_line_min_pleural_ratio >= 0.0)) {
        throw InvalidArgument("b_line_min_pleural_ratio must be >= 0");
    }
    if (!std::isfinite(b_line_min_contrast) || !(b_line_flank_px > 0.0)) {
        throw InvalidArgument("b_line_min_contrast must be finite and b_line_flank_px > 0");
    }
}

Image dim_top(const Image& y, const DetectConfig& cfg) {
    cfg.validate();
    Image out = y;
    const auto rows =
        static_cast<std::size_t>(std::floor(cfg.dim_fraction * static_cast<double>(y.height()) + 1e-9));
    for (std::size_t r = 0; r < rows; ++r) {
        const double gain = cfg.dim_min_gain + (1.0 - cfg.dim_min_gain) * static_cast<double>(r) /
                                                   static_cast<double>(rows);
        for (double& v : out.pixels().row(r)) v *= gain;
    }
    return out;
}

std::vector<Peak> find_peaks(const Sinogram& restored, const AngleSet& band,
                             const DetectConfig& cfg) {
    cfg.validate();
    if (band.empty()) throw InvalidArgument("peak search band is empty");
    std::vector<std::size_t> cols;
    for (double a : band.degrees()) {
        const auto idx = restored.angles().index_of(a);
        if (!idx) {
            std::ostringstream msg;
            msg << "band angle " << a << " is not part of the sinogram";
            throw InvalidArgument(msg.str());
        }
        cols.push_back(*idx);
    }

    const std::size_t rows = restored.radii_count();
    const std::size_t n = cols.size();
    double band_max = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < n; ++j) band_max = std::max(band_max, restored(r, cols[j]));
    }
    if (!(band_max > 0.0)) return {};
    const double floor_score = cfg.peak_rel_threshold * band_max;

    std::vector<Peak> candidates;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = restored(r, cols[j]);
            if (!(v > 0.0) || v < floor_score) continue;
            bool is_max = true;
            for (int dr = -1; dr <= 1 && is_max; ++dr) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (dr == 0 && dj == 0) continue;
                    const long rr = static_cast<long>(r) + dr;
                    const long jj = static_cast<long>(j) + dj;
                    if (rr < 0 || jj < 0 || rr >= static_cast<long>(rows) || jj >= static_cast<long>(n)) {
                        continue;
                    }
                    if (restored(static_cast<std::size_t>(rr), cols[static_cast<std::size_t>(jj)]) > v) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) {
                candidates.push_back({restored.radius_of(r), restored.angles()[cols[j]], v, r, cols[j]});
            }
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Peak& a, const Peak& b) { return a.score > b.score; });

    std::vector<Peak> kept;
    for (const Peak& p : candidates) {
        const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Peak& q) {
            const auto dbin = p.bin > q.bin ? p.bin - q.bin : q.bin - p.bin;
            return dbin <= cfg.peak_min_separation.radius_bins &&
                   std::abs(p.omega - q.omega) <= cfg.peak_min_separation.degrees;
        });
        if (!suppressed) kept.push_back(p);
    }
    return kept;
}

DetectedLine detect_pleural(const Sinogram& restored, const DetectConfig& cfg) {
    const AngleSet band = band_of(restored.angles(), kHorizontalLo, kHorizontalHi);
    const auto peaks = find_peaks(restored, band, cfg);
    if (peaks.empty()) throw DetectionError("no pleural line candidate above threshold");
    const Peak& best = peaks.front();
    return {best.r, best.omega, best.score, LineKind::pleural, std::nullopt};
}

std::vector<DetectedLine> detect_a_lines(const Sinogram& restored, const DetectedLine& pleural,
                                         const DetectConfig& cfg) {
    const AngleSet band = band_of(restored.angles(), kHorizontalLo, kHorizontalHi);
    const double pleural_depth = line_depth(pleural.r, pleural.omega);
    std::vector<DetectedLine> out;
    for (const Peak& p : find_peaks(restored, band, cfg)) {
        if (line_depth(p.r, p.omega) > pleural_depth) {
            out.push_back({p.r, p.omega, p.score, LineKind::a_line, std::nullopt});
        }
    }
    return out;
}

std::vector<DetectedLine> detect_b_lines(const Sinogram& restored, const Image& y,
                                         const DetectedLine& pleural,
                                         const std::vector<DetectedLine>& a_lines,
                                         const DetectConfig& cfg) {
    const AngleSet band = band_of(restored.angles(), kVerticalLo, kVerticalHi);
    const double cx = 0.5 * static_cast<double>(y.width() - 1);
    const double bottom = 0.5 * static_cast<double>(y.height() - 1);
    const double min_score = cfg.b_line_min_pleural_ratio * pleural.score;

    std::vector<DetectedLine> survivors;
    for (const Peak& p : find_peaks(restored, band, cfg)) {
        if (p.score < min_score) continue;
        const auto origin = intersect(p.r, p.omega, pleural.r, pleural.omega);
        if (!origin) continue;
        const double origin_col = origin->x + cx;
        if (origin_col < 0.0 || origin_col > static_cast<double>(y.width() - 1)) continue;

        bool over_passed = false;
        for (const DetectedLine& a : a_lines) {
            const auto cross = intersect(p.r, p.omega, a.r, a.omega);
            if (!cross || cross->y <= origin->y) continue;
            const auto between =
                mean_along(y, p.r, p.omega, origin->y + kSampleMargin, cross->y - kSampleMargin);
            const auto below = mean_along(y, p.r, p.omega, cross->y + kSampleMargin, bottom);
            if (between && below && *below < cfg.overpass_intensity_ratio * *between) {
                over_passed = true;
                break;
            }
        }
        if (over_passed) continue;
        if (flank_contrast(y, p.r, p.omega, origin->y + kSampleMargin, bottom, cfg.b_line_flank_px) <
            cfg.b_line_min_contrast) {
            continue;
        }
        survivors.push_back({p.r, p.omega, p.score, LineKind::b_line, origin_col});
    }

    std::stable_sort(survivors.begin(), survivors.end(),
                     [](const DetectedLine& a, const DetectedLine& b) { return a.score > b.score; });
    std::vector<DetectedLine> merged;
    for (const DetectedLine& cand : survivors) {
        const bool same_origin = std::any_of(merged.begin(), merged.end(), [&](const DetectedLine& m) {
            return std::abs(*m.origin_x - *cand.origin_x) <= cfg.merge_tolerance_px;
        });
        if (!same_origin) merged.push_back(cand);
        if (merged.size() == cfg.max_b_lines) break;
    }
    return merged;
}

Sinogram restore(const Image& y, const RadonOperator& op, const Solver& solver) {
    if (const auto* admm = std::get_if<AdmmSolver>(&solver)) return solve(op, y, admm->config).x;
    const auto& unfolded = std::get<UnfoldedSolver>(solver);
    if (!unfolded.model) throw InvalidArgument("unfolded solver has no model");
    return forward(*unfolded.model, op, y).restored();
}

std::vector<DetectedLine> DetectionResult::of_kind(LineKind kind) const {
    std::vector<DetectedLine> out;
    for (const auto& l : lines) {
        if (l.kind == kind) out.push_back(l);
    }
    return out;
}

DetectionResult detect_pipeline(const Image& y, const RadonOperator& op, const Solver& solver,
                                const DetectConfig& cfg) {
    cfg.validate();
    const Image dimmed = dim_top(y, cfg);
    const Sinogram restored = restore(dimmed, op, solver);

    DetectionResult result;
    DetectedLine pleural;
    try {
        pleural = detect_pleural(restored, cfg);
    } catch (const DetectionError& e) {
        result.diagnostic = e.what();
        return result;
    }
    const auto a_lines = detect_a_lines(restored, pleural, cfg);
    const auto b_lines = detect_b_lines(restored, y, pleural, a_lines, cfg);
    result.lines.push_back(pleural);
    result.lines.insert(result.lines.end(), a_lines.begin(), a_lines.end());
    result.lines.insert(result.lines.end(), b_lines.begin(), b_lines.end());
    return result;
}

}  // namespace dubline
