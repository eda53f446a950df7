#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dubline/image.hpp"
#include "dubline/lines.hpp"

namespace dubline {

struct BLineSpec {
    double origin = 0.5;  ///< column as a fraction of the width
    double width_px = 4.0;
    double intensity = 0.6;

    bool operator==(const BLineSpec&) const = default;
};

/// A vertical artefact that stops at an A-line instead of reaching the bottom.
struct TruncatedLineSpec {
    double origin = 0.5;
    double width_px = 4.0;
    double intensity = 0.6;
    std::size_t stop_a_line = 0;

    bool operator==(const TruncatedLineSpec&) const = default;
};

struct PhantomSpec {
    double pleural_depth = 0.3;  ///< fraction of the height
    double pleural_intensity = 0.75;
    double line_width_px = 3.0;  ///< FWHM of pleural and A-line profiles
    std::size_t a_line_count = 1;
    double a_line_spacing = 0.0;  ///< fraction of the height; 0 repeats at pleural_depth
    double a_line_intensity = 0.45;
    double a_line_decay = 0.7;
    std::vector<BLineSpec> b_lines;
    std::vector<TruncatedLineSpec> truncated_lines;
    double speckle_sigma = 0.3;
    double blur_radius = 1.0;
    double background_gain = 0.15;
    double box_width_px = 20.0;
    std::uint64_t seed = 0;

    void validate(std::size_t width, std::size_t height, double merge_tolerance_px = 5.0) const;
    bool operator==(const PhantomSpec&) const = default;
};

struct GroundTruthBox {
    double x_center = 0.0;
    double width = 0.0;
    double y_top = 0.0;
    double y_bottom = 0.0;

    bool operator==(const GroundTruthBox&) const = default;
};

struct PlantedLine {
    LineKind kind = LineKind::b_line;
    double r = 0.0;
    double omega = 0.0;
};

struct Phantom {
    Image image;
    std::vector<GroundTruthBox> boxes;
    std::vector<PlantedLine> planted;
};

/// Renders a lung-ultrasound-like phantom: background, pleural line, A-line
/// repeats, a bright near-field band at the top, B-lines from the pleural
/// line to the bottom, multiplicative
/// log-normal speckle, Gaussian blur, clamp to [0, 1].
Phantom generate(const PhantomSpec& spec, std::size_t width = 256, std::size_t height = 256);

/// Randomized spec with 0-3 B-lines; fully determined by `seed`.
PhantomSpec random_phantom_spec(std::uint64_t seed, double speckle_sigma = 0.3);

/// Specs for seeds first_seed .. first_seed + count - 1.
std::vector<PhantomSpec> phantom_suite(std::size_t count, std::uint64_t first_seed = 0,
                                       double speckle_sigma = 0.3);

struct StraightLine {
    double r = 0.0;
    double omega = 0.0;
    double intensity = 1.0;
};

/// Noise-free image of full-length straight lines with Gaussian cross
/// profiles of the given FWHM on a black background.
Image straight_line_phantom(std::size_t width, std::size_t height,
                            const std::vector<StraightLine>& lines, double width_px = 2.0);

}  // namespace dubline
