#include "dubline/image.hpp"

#include <algorithm>
#include <cmath>

#include "dubline/error.hpp"

namespace dubline {

Image::Image(std::size_t width, std::size_t height, double fill) : pixels_(height, width, fill) {}

Image::Image(Matrix pixels) : pixels_(std::move(pixels)) {}

Sinogram::Sinogram(std::size_t radii_count, AngleSet angles, double fill)
    : angles_(std::move(angles)), values_(radii_count, angles_.size(), fill) {}

Sinogram::Sinogram(AngleSet angles, Matrix values)
    : angles_(std::move(angles)), values_(std::move(values)) {
    if (values_.cols() != angles_.size()) {
        throw ShapeMismatch("sinogram column count differs from its angle count");
    }
}

double Sinogram::radius_of(std::size_t bin) const noexcept {
    return static_cast<double>(bin) - 0.5 * static_cast<double>(radii_count() - 1);
}

std::size_t Sinogram::bin_of(double r) const noexcept {
    const double pos = std::round(r + 0.5 * static_cast<double>(radii_count() - 1));
    const double hi = static_cast<double>(radii_count() - 1);
    return static_cast<std::size_t>(std::clamp(pos, 0.0, hi));
}

}  // namespace dubline
