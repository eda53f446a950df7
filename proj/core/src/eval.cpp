#include "dubline/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "dubline/error.hpp"

namespace dubline {

MatchCounts match(std::span<const DetectedLine> detections, std::span<const GroundTruthBox> boxes,
                  MatchBand band) {
    std::vector<const DetectedLine*> b_lines;
    for (const auto& d : detections) {
        if (d.kind == LineKind::b_line) b_lines.push_back(&d);
    }
    std::stable_sort(b_lines.begin(), b_lines.end(),
                     [](const DetectedLine* a, const DetectedLine* b) { return a->score > b->score; });

    std::vector<bool> taken(boxes.size(), false);
    MatchCounts counts;
    for (const DetectedLine* d : b_lines) {
        if (!d->origin_x) {  // a B-line without an origin cannot be located
            ++counts.fp;
            continue;
        }
        const double x = *d->origin_x;
        std::size_t best = boxes.size();
        double best_dx = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            if (taken[i]) continue;
            const double limit = boxes[i].width * (band == MatchBand::quarter_width ? 0.25 : 0.5);
            const double dx = std::abs(x - boxes[i].x_center);
            if (dx <= limit && dx < best_dx) {
                best = i;
                best_dx = dx;
            }
        }
        if (best == boxes.size()) {
            ++counts.fp;
        } else {
            taken[best] = true;
            ++counts.tp;
        }
    }
    counts.fn = static_cast<std::size_t>(std::count(taken.begin(), taken.end(), false));
    return counts;
}

EvalReport metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
    EvalReport r;
    r.tp = tp;
    r.fp = fp;
    r.fn = fn;
    const auto t = static_cast<double>(tp);
    r.precision = tp + fp > 0 ? t / static_cast<double>(tp + fp) : 0.0;
    r.recall = tp + fn > 0 ? t / static_cast<double>(tp + fn) : 0.0;
    r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

EvalReport evaluate(std::vector<ImageEval> per_image) {
    MatchCounts total;
    for (const auto& e : per_image) {
        total.tp += e.counts.tp;
        total.fp += e.counts.fp;
        total.fn += e.counts.fn;
    }
    EvalReport r = metrics(total.tp, total.fp, total.fn);
    r.per_image = std::move(per_image);
    return r;
}

double round3(double value) { return std::round(value * 1000.0) / 1000.0; }

BenchReport bench(std::span<const BenchSolver> solvers, std::span<const Image> images,
                  std::size_t repetitions) {
    if (solvers.empty() || images.empty()) throw InvalidArgument("bench needs at least one solver and image");
    if (repetitions < 3) throw InvalidArgument("bench needs at least 3 repetitions");
    using Clock = std::chrono::steady_clock;
    BenchReport report;
    report.image_count = images.size();
    report.repetitions = repetitions;
    for (const auto& solver : solvers) {
        solver.run(images.front());  // warm-up
        SolverTiming timing;
        timing.name = solver.name;
        for (std::size_t rep = 0; rep < repetitions; ++rep) {
            for (const auto& img : images) {
                const auto start = Clock::now();
                solver.run(img);
                timing.samples.push_back(std::chrono::duration<double>(Clock::now() - start).count());
            }
        }
        auto sorted = timing.samples;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        timing.mean_seconds = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
        timing.median_seconds = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        timing.min_seconds = sorted.front();
        report.solvers.push_back(std::move(timing));
    }
    if (report.solvers.size() >= 2 && report.solvers[1].mean_seconds > 0.0) {
        report.speedup = report.solvers[0].mean_seconds / report.solvers[1].mean_seconds;
    }
    return report;
}

}  // namespace dubline
