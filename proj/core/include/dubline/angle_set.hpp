#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dubline {

/// Ordered set of projection angles in degrees, measured from the image
/// horizontal axis. Angle 0 integrates along image columns, 90 along rows.
class AngleSet {
public:
    AngleSet() = default;
    AngleSet(std::vector<double> degrees, double step);

    /// Inclusive range first, first+step, ..., last.
    static AngleSet range(double first, double last, double step = 1.0);

    /// Near-vertical lines: [-15, 15] degrees.
    static AngleSet vertical_band(double step = 1.0);
    /// Near-horizontal lines: [85, 95] degrees.
    static AngleSet horizontal_band(double step = 1.0);

    std::span<const double> degrees() const noexcept { return degrees_; }
    std::size_t size() const noexcept { return degrees_.size(); }
    bool empty() const noexcept { return degrees_.empty(); }
    double step() const noexcept { return step_; }
    double operator[](std::size_t i) const noexcept { return degrees_[i]; }

    std::optional<std::size_t> index_of(double degree, double tol = 1e-9) const noexcept;
    bool contains(double degree, double tol = 1e-9) const noexcept {
        return index_of(degree, tol).has_value();
    }
    /// True when every angle of `other` is present here.
    bool includes(const AngleSet& other) const noexcept;

    bool operator==(const AngleSet&) const = default;

private:
    std::vector<double> degrees_;
    double step_ = 1.0;
};

/// Sorted union of two disjoint angle sets. Throws InvalidArgument on overlap.
AngleSet concat_angle_sets(const AngleSet& a, const AngleSet& b);

/// Joint angle set used by the solvers: vertical band followed by horizontal band.
AngleSet default_angle_set(double step = 1.0);

}  // namespace dubline
