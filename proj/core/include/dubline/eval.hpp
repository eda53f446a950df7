#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dubline/image.hpp"
#include "dubline/lines.hpp"
#include "dubline/phantom.hpp"

namespace dubline {

enum class MatchBand {
    quarter_width,  ///< |dx| <= width / 4
    half_width,     ///< |dx| <= width / 2
};

struct MatchCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    bool operator==(const MatchCounts&) const = default;
};

/// Greedy one-to-one matching of B-line detections to boxes in descending
/// score order. Each detection takes the nearest free box within the band;
/// B-lines without origin_x count as false positives.
MatchCounts match(std::span<const DetectedLine> detections, std::span<const GroundTruthBox> boxes,
                  MatchBand band = MatchBand::quarter_width);

struct ImageEval {
    std::string name;
    MatchCounts counts;
};

struct EvalReport {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::vector<ImageEval> per_image;
};

/// Precision, recall and F1, with 0 for any zero denominator.
EvalReport metrics(std::size_t tp, std::size_t fp, std::size_t fn);
EvalReport evaluate(std::vector<ImageEval> per_image);

double round3(double value);

struct BenchSolver {
    std::string name;
    std::function<void(const Image&)> run;
};

struct SolverTiming {
    std::string name;
    double mean_seconds = 0.0;
    double median_seconds = 0.0;
    double min_seconds = 0.0;
    std::vector<double> samples;
};

struct BenchReport {
    std::vector<SolverTiming> solvers;
    std::size_t image_count = 0;
    std::size_t repetitions = 0;
    /// mean(first solver) / mean(second solver)
    double speedup = 0.0;
};

/// Times every solver on every image `repetitions` times after one untimed
/// warm-up call each. Solvers run sequentially. Requires repetitions >= 3.
BenchReport bench(std::span<const BenchSolver> solvers, std::span<const Image> images,
                  std::size_t repetitions);

}  // namespace dubline
