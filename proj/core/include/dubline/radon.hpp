#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "dubline/angle_set.hpp"
#include "dubline/image.hpp"
#include "dubline/linear_operator.hpp"

namespace dubline {

/// Smallest radius-bin count accepted for a width x height image.
double image_diagonal(std::size_t width, std::size_t height) noexcept;
/// Default radius-bin count: ceil(diagonal) + 1.
std::size_t default_radii_count(std::size_t width, std::size_t height) noexcept;

/**
 * Discrete Radon transform over a restricted angle set.
 *
 * Each (radius, angle) bin is a ray through the image sampled every half
 * pixel with bilinear interpolation. The sampling weights are assembled once
 * into a sparse matrix, so `project` and `synthesize` apply the same
 * coefficients and are exact transposes of one another.
 *
 * The scale is 1 / |angles| times the sample step: synthesizing an all-ones
 * sinogram gives (approximately) an all-ones image inside the inscribed disc.
 */
class RadonOperator final : public LinearOperator {
public:
    static constexpr double kRayStep = 0.5;
    static constexpr std::size_t kMinDimension = 8;

    RadonOperator(std::size_t width, std::size_t height, AngleSet angles, std::size_t radii_count);

    std::size_t image_width() const noexcept override { return width_; }
    std::size_t image_height() const noexcept override { return height_; }
    std::size_t radii_count() const noexcept { return radii_count_; }
    const AngleSet& angles() const noexcept { return angles_; }
    double scale() const noexcept { return scale_; }
    std::size_t nonzeros() const noexcept { return values_.size(); }

    Sinogram zero_sinogram() const override;
    Sinogram project(const Image& image) const override;
    Image synthesize(const Sinogram& sinogram) const override;

    /// Radius of bin `bin` in pixels from the image centre.
    double radius_of(std::size_t bin) const noexcept;

private:
    void check_image(const Image& image) const;
    void check_sinogram(const Sinogram& sinogram) const;
    std::uint32_t transpose_index(std::uint32_t idx) const noexcept;
    std::uint32_t untranspose_index(std::uint32_t idx) const noexcept;
    void sort_row(std::size_t begin);
    /// Offset in the (bin, angle) sinogram matrix of angle-major ray `row`.
    std::size_t sinogram_index(std::size_t row) const noexcept;

    std::size_t width_;
    std::size_t height_;
    AngleSet angles_;
    std::size_t radii_count_;
    double scale_;

    // CSR over rays in angle-major order (parallel neighbours adjacent),
    // columns = pixel index, column-major for angles flagged below.
    std::vector<bool> column_major_;
    std::vector<std::size_t> row_start_;
    std::vector<std::uint32_t> pixel_;  // only during construction
    std::vector<float> values_;
    // Column indices, narrowed to 16 bits when they fit (halves index traffic).
    using IndexArray = std::variant<std::vector<std::uint16_t>, std::vector<std::uint32_t>>;
    IndexArray row_index_;
    // The same entries transposed: CSC over pixels, indices are sinogram rows.
    std::vector<std::size_t> col_start_;
    std::vector<std::uint32_t> bin_;  // only during construction
    IndexArray col_index_;
    std::vector<float> col_values_;
};

/// radii_count 0 selects default_radii_count(width, height).
RadonOperator build_operator(std::size_t width, std::size_t height, const AngleSet& angles,
                             std::size_t radii_count = 0);

inline Sinogram project(const RadonOperator& op, const Image& image) { return op.project(image); }
inline Image synthesize(const RadonOperator& op, const Sinogram& sinogram) {
    return op.synthesize(sinogram);
}

}  // namespace dubline
