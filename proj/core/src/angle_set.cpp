#include "dubline/angle_set.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dubline/error.hpp"

namespace dubline {

AngleSet::AngleSet(std::vector<double> degrees, double step)
    : degrees_(std::move(degrees)), step_(step) {
    if (!(step_ > 0.0) || !std::isfinite(step_)) {
        throw InvalidArgument("angle step must be positive");
    }
    for (std::size_t i = 0; i < degrees_.size(); ++i) {
        const double a = degrees_[i];
        if (!std::isfinite(a) || a < -90.0 || a >= 180.0) {
            std::ostringstream msg;
            msg << "angle " << a << " outside [-90, 180)";
            throw InvalidArgument(msg.str());
        }
        if (i > 0 && !(a > degrees_[i - 1])) {
            throw InvalidArgument("angles must be strictly increasing");
        }
    }
}

AngleSet AngleSet::range(double first, double last, double step) {
    if (!(step > 0.0)) throw InvalidArgument("angle step must be positive");
    if (last < first) throw InvalidArgument("angle range is empty");
    const auto count = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
    std::vector<double> degrees(count);
    for (std::size_t i = 0; i < count; ++i) degrees[i] = first + static_cast<double>(i) * step;
    return AngleSet(std::move(degrees), step);
}

AngleSet AngleSet::vertical_band(double step) { return range(-15.0, 15.0, step); }

AngleSet AngleSet::horizontal_band(double step) { return range(85.0, 95.0, step); }

std::optional<std::size_t> AngleSet::index_of(double degree, double tol) const noexcept {
    auto it = std::lower_bound(degrees_.begin(), degrees_.end(), degree - tol);
    if (it != degrees_.end() && std::abs(*it - degree) <= tol) {
        return static_cast<std::size_t>(it - degrees_.begin());
    }
    return std::nullopt;
}

bool AngleSet::includes(const AngleSet& other) const noexcept {
    return std::all_of(other.degrees_.begin(), other.degrees_.end(),
                       [this](double a) { return contains(a); });
}

AngleSet concat_angle_sets(const AngleSet& a, const AngleSet& b) {
    std::vector<double> merged;
    merged.reserve(a.size() + b.size());
    for (double d : a.degrees()) {
        if (b.contains(d)) {
            std::ostringstream msg;
            msg << "angle sets overlap at " << d << " degrees";
            throw InvalidArgument(msg.str());
        }
        merged.push_back(d);
    }
    merged.insert(merged.end(), b.degrees().begin(), b.degrees().end());
    std::sort(merged.begin(), merged.end());
    const double step = a.empty() ? b.step() : b.empty() ? a.step() : std::min(a.step(), b.step());
    return AngleSet(std::move(merged), step);
}

AngleSet default_angle_set(double step) {
    return concat_angle_sets(AngleSet::vertical_band(step), AngleSet::horizontal_band(step));
}

}  // namespace dubline
