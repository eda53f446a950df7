#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dubline/admm.hpp"
#include "dubline/lines.hpp"
#include "dubline/radon.hpp"
#include "dubline/unfold.hpp"

namespace dubline {

struct PeakSeparation {
    std::size_t radius_bins = 5;
    double degrees = 3.0;
};

struct DetectConfig {
    double dim_fraction = 0.15;
    double dim_min_gain = 0.2;
    double peak_rel_threshold = 0.4;
    PeakSeparation peak_min_separation;
    double overpass_intensity_ratio = 0.5;
    double merge_tolerance_px = 5.0;
    std::size_t max_b_lines = 10;
    /// Vertical candidates scoring below this fraction of the pleural score
    /// are discarded.
    double b_line_min_pleural_ratio = 0.1;
    /// Image-domain test below the pleural line: mean intensity along the
    /// candidate minus the mean along parallel lines b_line_flank_px to
    /// either side must reach this value.
    double b_line_min_contrast = 0.25;
    double b_line_flank_px = 8.0;

    void validate() const;
};

/// Scales the top dim_fraction of rows by a linear ramp from dim_min_gain at
/// row 0 to 1 at the boundary row.
Image dim_top(const Image& y, const DetectConfig& cfg);

struct Peak {
    double r = 0.0;
    double omega = 0.0;
    double score = 0.0;
    std::size_t bin = 0;
    std::size_t angle_index = 0;
};

/// Positive local maxima inside `band`, above peak_rel_threshold times the
/// band maximum, thinned by greedy non-maximum suppression. Descending score.
std::vector<Peak> find_peaks(const Sinogram& restored, const AngleSet& band,
                             const DetectConfig& cfg);

/// Highest-scoring near-horizontal peak. Throws DetectionError if none.
DetectedLine detect_pleural(const Sinogram& restored, const DetectConfig& cfg);

/// Near-horizontal peaks strictly deeper than the pleural line.
std::vector<DetectedLine> detect_a_lines(const Sinogram& restored, const DetectedLine& pleural,
                                         const DetectConfig& cfg);

/// Near-vertical peaks anchored on the pleural line, with over-passed
/// candidates removed and same-origin candidates merged.
std::vector<DetectedLine> detect_b_lines(const Sinogram& restored, const Image& y,
                                         const DetectedLine& pleural,
                                         const std::vector<DetectedLine>& a_lines,
                                         const DetectConfig& cfg);

struct AdmmSolver {
    AdmmConfig config;
};

struct UnfoldedSolver {
    const UnfoldedModel* model = nullptr;
};

using Solver = std::variant<AdmmSolver, UnfoldedSolver>;

/// Radon-domain restoration of y by the chosen solver.
Sinogram restore(const Image& y, const RadonOperator& op, const Solver& solver);

struct DetectionResult {
    std::vector<DetectedLine> lines;
    std::optional<std::string> diagnostic;

    std::vector<DetectedLine> of_kind(LineKind kind) const;
};

/// dim_top -> restore -> pleural -> A-lines -> B-lines. An image without a
/// usable pleural line yields no lines and a diagnostic.
DetectionResult detect_pipeline(const Image& y, const RadonOperator& op, const Solver& solver,
                                const DetectConfig& cfg);

}  // namespace dubline
