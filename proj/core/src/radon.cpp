#include "dubline/radon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dubline/error.hpp"

namespace dubline {

namespace {

template <class Index>
double dot_row(std::size_t begin, std::size_t end, const Index* index, const float* values,
               const double* src) noexcept {
    // Four partial sums break the dependency chain of a single accumulator.
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t k = begin;
    for (; k + 4 <= end; k += 4) {
        acc[0] += static_cast<double>(values[k]) * src[index[k]];
        acc[1] += static_cast<double>(values[k + 1]) * src[index[k + 1]];
        acc[2] += static_cast<double>(values[k + 2]) * src[index[k + 2]];
        acc[3] += static_cast<double>(values[k + 3]) * src[index[k + 3]];
    }
    for (; k < end; ++k) acc[0] += static_cast<double>(values[k]) * src[index[k]];
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

template <class Variant>
Variant narrow(std::vector<std::uint32_t>& wide, std::size_t max_index) {
    Variant out;
    if (max_index <= 0xFFFF) {
        out = std::vector<std::uint16_t>(wide.begin(), wide.end());
    } else {
        out = std::vector<std::uint32_t>(wide.begin(), wide.end());
    }
    wide.clear();
    wide.shrink_to_fit();
    return out;
}

}  // namespace

double image_diagonal(std::size_t width, std::size_t height) noexcept {
    return std::hypot(static_cast<double>(width), static_cast<double>(height));
}

std::size_t default_radii_count(std::size_t width, std::size_t height) noexcept {
    return static_cast<std::size_t>(std::ceil(image_diagonal(width, height))) + 1;
}

RadonOperator::RadonOperator(std::size_t width, std::size_t height, AngleSet angles,
                             std::size_t radii_count)
    : width_(width), height_(height), angles_(std::move(angles)), radii_count_(radii_count) {
    if (width_ < kMinDimension || height_ < kMinDimension) {
        std::ostringstream msg;
        msg << "image " << width_ << "x" << height_ << " is smaller than " << kMinDimension << "x"
            << kMinDimension;
        throw InvalidArgument(msg.str());
    }
    if (angles_.empty()) throw InvalidArgument("angle set is empty");
    const double diagonal = image_diagonal(width_, height_);
    if (static_cast<double>(radii_count_) < diagonal) {
        std::ostringstream msg;
        msg << radii_count_ << " radius bins cannot cover the image diagonal " << diagonal;
        throw InvalidArgument(msg.str());
    }

    const std::size_t n_angles = angles_.size();
    scale_ = 1.0 / static_cast<double>(n_angles);
    const double sample_weight = scale_ * kRayStep;

    const double cx = 0.5 * static_cast<double>(width_ - 1);
    const double cy = 0.5 * static_cast<double>(height_ - 1);
    const auto half_steps = static_cast<long>(std::ceil(0.5 * diagonal / kRayStep));
    const auto w = static_cast<long>(width_);
    const auto h = static_cast<long>(height_);

    std::vector<double> cosines(n_angles), sines(n_angles);
    for (std::size_t a = 0; a < n_angles; ++a) {
        const double rad = angles_[a] * std::numbers::pi / 180.0;
        cosines[a] = std::cos(rad);
        sines[a] = std::sin(rad);
    }

    std::vector<double> accum(width_ * height_, 0.0);
    std::vector<char> seen(width_ * height_, 0);
    std::vector<std::uint32_t> touched;
    touched.reserve(8 * (width_ + height_));

    row_start_.reserve(radii_count_ * n_angles + 1);
    row_start_.push_back(0);

    auto deposit = [&](long row, long col, double weight) {
        if (weight == 0.0 || row < 0 || row >= h || col < 0 || col >= w) return;
        const auto idx = static_cast<std::uint32_t>(row * w + col);
        if (!seen[idx]) {
            seen[idx] = 1;
            touched.push_back(idx);
        }
        accum[idx] += weight;
    };

    // Rays closer to vertical walk down columns; store them against a
    // column-major copy of the image so consecutive samples are contiguous.
    column_major_.resize(n_angles);
    for (std::size_t a = 0; a < n_angles; ++a) {
        column_major_[a] = std::abs(cosines[a]) > std::abs(sines[a]);
    }

    for (std::size_t a = 0; a < n_angles; ++a) {
        const double c = cosines[a];
        const double s = sines[a];
        for (std::size_t bin = 0; bin < radii_count_; ++bin) {
            const double r = radius_of(bin);
            for (long k = -half_steps; k <= half_steps; ++k) {
                const double t = static_cast<double>(k) * kRayStep;
                const double px = r * c - t * s + cx;
                const double py = r * s + t * c + cy;
                if (px <= -1.0 || py <= -1.0 || px >= static_cast<double>(w) ||
                    py >= static_cast<double>(h)) {
                    continue;
                }
                const double fx = std::floor(px);
                const double fy = std::floor(py);
                const double tx = px - fx;
                const double ty = py - fy;
                const auto col = static_cast<long>(fx);
                const auto row = static_cast<long>(fy);
                deposit(row, col, sample_weight * (1.0 - tx) * (1.0 - ty));
                deposit(row, col + 1, sample_weight * tx * (1.0 - ty));
                deposit(row + 1, col, sample_weight * (1.0 - tx) * ty);
                deposit(row + 1, col + 1, sample_weight * tx * ty);
            }
            for (std::uint32_t idx : touched) {
                pixel_.push_back(column_major_[a] ? transpose_index(idx) : idx);
                values_.push_back(static_cast<float>(accum[idx]));
                accum[idx] = 0.0;
                seen[idx] = 0;
            }
            sort_row(row_start_.back());
            touched.clear();
            row_start_.push_back(pixel_.size());
        }
    }

    // Pixel-major copy so synthesize is a gather as well.
    col_start_.assign(width_ * height_ + 1, 0);
    for (std::size_t row = 0; row + 1 < row_start_.size(); ++row) {
        const bool transposed = column_major_[row / radii_count_];
        for (std::size_t k = row_start_[row]; k < row_start_[row + 1]; ++k) {
            ++col_start_[(transposed ? untranspose_index(pixel_[k]) : pixel_[k]) + 1];
        }
    }
    for (std::size_t p = 0; p < width_ * height_; ++p) col_start_[p + 1] += col_start_[p];
    bin_.resize(pixel_.size());
    col_values_.resize(pixel_.size());
    std::vector<std::size_t> cursor(col_start_.begin(), col_start_.end() - 1);
    for (std::size_t row = 0; row + 1 < row_start_.size(); ++row) {
        const auto entry = static_cast<std::uint32_t>(sinogram_index(row));
        const bool transposed = column_major_[row / radii_count_];
        for (std::size_t k = row_start_[row]; k < row_start_[row + 1]; ++k) {
            const std::uint32_t pixel = transposed ? untranspose_index(pixel_[k]) : pixel_[k];
            const std::size_t dst = cursor[pixel]++;
            bin_[dst] = entry;
            col_values_[dst] = values_[k];
        }
    }
    row_index_ = narrow<IndexArray>(pixel_, width_ * height_ - 1);
    col_index_ = narrow<IndexArray>(bin_, radii_count_ * n_angles - 1);
}

std::uint32_t RadonOperator::transpose_index(std::uint32_t idx) const noexcept {
    const auto w = static_cast<std::uint32_t>(width_);
    const auto h = static_cast<std::uint32_t>(height_);
    return (idx % w) * h + idx / w;
}

std::uint32_t RadonOperator::untranspose_index(std::uint32_t idx) const noexcept {
    const auto w = static_cast<std::uint32_t>(width_);
    const auto h = static_cast<std::uint32_t>(height_);
    return (idx % h) * w + idx / h;
}

void RadonOperator::sort_row(std::size_t begin) {
    std::vector<std::pair<std::uint32_t, float>> entries;
    entries.reserve(pixel_.size() - begin);
    for (std::size_t k = begin; k < pixel_.size(); ++k) entries.emplace_back(pixel_[k], values_[k]);
    std::sort(entries.begin(), entries.end());
    for (std::size_t k = begin; k < pixel_.size(); ++k) {
        pixel_[k] = entries[k - begin].first;
        values_[k] = entries[k - begin].second;
    }
}

std::size_t RadonOperator::sinogram_index(std::size_t row) const noexcept {
    const std::size_t a = row / radii_count_;
    const std::size_t bin = row % radii_count_;
    return bin * angles_.size() + a;
}


double RadonOperator::radius_of(std::size_t bin) const noexcept {
    return static_cast<double>(bin) - 0.5 * static_cast<double>(radii_count_ - 1);
}

Sinogram RadonOperator::zero_sinogram() const { return Sinogram(radii_count_, angles_); }

void RadonOperator::check_image(const Image& image) const {
    if (image.width() != width_ || image.height() != height_) {
        std::ostringstream msg;
        msg << "image is " << image.width() << "x" << image.height() << ", operator expects "
            << width_ << "x" << height_;
        throw ShapeMismatch(msg.str());
    }
}

void RadonOperator::check_sinogram(const Sinogram& sinogram) const {
    if (sinogram.radii_count() != radii_count_ || sinogram.angle_count() != angles_.size()) {
        std::ostringstream msg;
        msg << "sinogram is " << sinogram.radii_count() << "x" << sinogram.angle_count()
            << ", operator expects " << radii_count_ << "x" << angles_.size();
        throw ShapeMismatch(msg.str());
    }
}

Sinogram RadonOperator::project(const Image& image) const {
    check_image(image);
    Sinogram out = zero_sinogram();
    const double* src = image.values().data();
    double* dst = out.values().data();
    std::vector<double> columns(width_ * height_);
    for (std::size_t r = 0; r < height_; ++r) {
        for (std::size_t c = 0; c < width_; ++c) columns[c * height_ + r] = src[r * width_ + c];
    }
    std::visit(
        [&](const auto& index) {
            for (std::size_t row = 0; row + 1 < row_start_.size(); ++row) {
                const double* from = column_major_[row / radii_count_] ? columns.data() : src;
                dst[sinogram_index(row)] =
                    dot_row(row_start_[row], row_start_[row + 1], index.data(), values_.data(), from);
            }
        },
        row_index_);
    return out;
}

Image RadonOperator::synthesize(const Sinogram& sinogram) const {
    check_sinogram(sinogram);
    Image out(width_, height_);
    const double* src = sinogram.values().data();
    double* dst = out.values().data();
    std::visit(
        [&](const auto& index) {
            for (std::size_t p = 0; p + 1 < col_start_.size(); ++p) {
                dst[p] = dot_row(col_start_[p], col_start_[p + 1], index.data(), col_values_.data(), src);
            }
        },
        col_index_);
    return out;
}

RadonOperator build_operator(std::size_t width, std::size_t height, const AngleSet& angles,
                             std::size_t radii_count) {
    if (radii_count == 0) radii_count = default_radii_count(width, height);
    return RadonOperator(width, height, angles, radii_count);
}

}  // namespace dubline
