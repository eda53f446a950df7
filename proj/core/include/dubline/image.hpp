#pragma once

#include <cstddef>
#include <span>

#include "dubline/angle_set.hpp"
#include "dubline/matrix.hpp"

namespace dubline {

/// Grayscale raster, row-major, intensities nominally in [0, 1].
class Image {
public:
    Image() = default;
    Image(std::size_t width, std::size_t height, double fill = 0.0);
    explicit Image(Matrix pixels);

    std::size_t width() const noexcept { return pixels_.cols(); }
    std::size_t height() const noexcept { return pixels_.rows(); }
    std::size_t size() const noexcept { return pixels_.size(); }

    double& operator()(std::size_t row, std::size_t col) noexcept { return pixels_(row, col); }
    double operator()(std::size_t row, std::size_t col) const noexcept { return pixels_(row, col); }

    Matrix& pixels() noexcept { return pixels_; }
    const Matrix& pixels() const noexcept { return pixels_; }
    std::span<double> values() noexcept { return pixels_.values(); }
    std::span<const double> values() const noexcept { return pixels_.values(); }

    bool same_dims(const Image& other) const noexcept { return pixels_.same_shape(other.pixels_); }
    bool operator==(const Image&) const = default;

private:
    Matrix pixels_;
};

/// Radon-domain matrix indexed (radius bin, angle index). Radius bins are
/// spaced one pixel apart and centred on the image centre.
class Sinogram {
public:
    Sinogram() = default;
    Sinogram(std::size_t radii_count, AngleSet angles, double fill = 0.0);
    Sinogram(AngleSet angles, Matrix values);

    std::size_t radii_count() const noexcept { return values_.rows(); }
    std::size_t angle_count() const noexcept { return values_.cols(); }
    const AngleSet& angles() const noexcept { return angles_; }

    /// Signed radius, in pixels, of bin `bin`.
    double radius_of(std::size_t bin) const noexcept;
    /// Nearest bin to radius `r`, clamped to the valid range.
    std::size_t bin_of(double r) const noexcept;

    double& operator()(std::size_t bin, std::size_t angle) noexcept { return values_(bin, angle); }
    double operator()(std::size_t bin, std::size_t angle) const noexcept { return values_(bin, angle); }

    Matrix& matrix() noexcept { return values_; }
    const Matrix& matrix() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_.values(); }
    std::span<const double> values() const noexcept { return values_.values(); }

    bool same_shape(const Sinogram& other) const noexcept {
        return values_.same_shape(other.values_) && angles_ == other.angles_;
    }
    bool operator==(const Sinogram&) const = default;

private:
    AngleSet angles_;
    Matrix values_;
};

}  // namespace dubline
