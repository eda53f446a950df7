#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "dubline/image.hpp"
#include "dubline/lines.hpp"

namespace dubline {

struct RgbImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> data;  ///< interleaved RGB, row-major

    RgbImage() = default;
    RgbImage(std::size_t width, std::size_t height)
        : width(width), height(height), data(width * height * 3, 0) {}
};

/// Reads 8/16-bit PNG (gray, gray+alpha, RGB, RGBA) or binary/ASCII PGM.
/// Colour is converted to luma; intensities are normalized to [0, 1].
Image load_image(const std::filesystem::path& path);

/// Writes an 8-bit grayscale PNG, clamping to [0, 1].
void save_png(const Image& image, const std::filesystem::path& path);
void save_png(const RgbImage& image, const std::filesystem::path& path);
void save_pgm(const Image& image, const std::filesystem::path& path);

/// Bilinear resampling with pixel-centre alignment.
Image resize(const Image& image, std::size_t width, std::size_t height);

/// Input image in gray with each detected line drawn on top: B-lines green,
/// pleural line yellow, A-lines cyan.
RgbImage render_overlay(const Image& image, const std::vector<DetectedLine>& lines);

bool is_raster_file(const std::filesystem::path& path);

}  // namespace dubline
