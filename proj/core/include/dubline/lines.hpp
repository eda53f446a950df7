#pragma once

#include <optional>
#include <string_view>

namespace dubline {

enum class LineKind { pleural, a_line, b_line };

std::string_view to_string(LineKind kind) noexcept;
LineKind line_kind_from_string(std::string_view name);

/// A straight line in Radon coordinates: the set of points p with
/// p . (cos omega, sin omega) = r, measured from the image centre with x to
/// the right and y pointing down.
struct DetectedLine {
    double r = 0.0;
    double omega = 0.0;
    double score = 0.0;
    LineKind kind = LineKind::b_line;
    /// Column where a B-line meets the pleural line.
    std::optional<double> origin_x;

    bool operator==(const DetectedLine&) const = default;
};

/// Offset from the image centre (x right, y down) of the crossing of two
/// lines given in Radon coordinates. Returns nullopt for parallel lines.
struct Point {
    double x = 0.0;
    double y = 0.0;
};
std::optional<Point> intersect(double r1, double omega1, double r2, double omega2) noexcept;

/// Vertical offset from the image centre of a near-horizontal line at x = 0.
double line_depth(double r, double omega) noexcept;

}  // namespace dubline
