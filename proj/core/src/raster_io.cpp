#include "dubline/raster_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "dubline/error.hpp"

namespace dubline {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

Image load_png(const std::filesystem::path& path) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.string().c_str())) {
        throw FormatError(path.string() + ": " + png.message);
    }
    // Simplified API: palette, alpha and 16-bit samples are reduced to 8-bit gray or RGB.
    const bool colour = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
    png.format = colour ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
        const std::string msg = png.message;
        png_image_free(&png);
        throw FormatError(path.string() + ": " + msg);
    }
    Image img(png.width, png.height);
    auto values = img.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = colour ? 0.299 * buffer[3 * i] + 0.587 * buffer[3 * i + 1] + 0.114 * buffer[3 * i + 2]
                                : buffer[i];
        values[i] = v / 255.0;
    }
    return img;
}

void skip_pgm_space(std::istream& in) {
    while (true) {
        const int ch = in.peek();
        if (ch == '#') {
            std::string comment;
            std::getline(in, comment);
        } else if (std::isspace(ch)) {
            in.get();
        } else {
            return;
        }
    }
}

std::size_t read_pgm_value(std::istream& in, const std::string& what) {
    skip_pgm_space(in);
    long v = -1;
    in >> v;
    if (!in || v < 0) throw FormatError("bad PGM " + what);
    return static_cast<std::size_t>(v);
}

Image load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string magic(2, '\0');
    in.read(magic.data(), 2);
    if (magic != "P2" && magic != "P5") throw FormatError(path.string() + " is not a PGM file");
    const std::size_t width = read_pgm_value(in, "width");
    const std::size_t height = read_pgm_value(in, "height");
    const std::size_t maxval = read_pgm_value(in, "maxval");
    if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) {
        throw FormatError("bad PGM header in " + path.string());
    }
    Image img(width, height);
    const auto scale = static_cast<double>(maxval);
    if (magic == "P2") {
        for (double& v : img.values()) v = static_cast<double>(read_pgm_value(in, "sample")) / scale;
        return img;
    }
    in.get();  // single whitespace after maxval
    const std::size_t bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(width * height * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
        throw FormatError("truncated PGM data in " + path.string());
    }
    auto values = img.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = bytes == 2 ? raw[2 * i] * 256.0 + raw[2 * i + 1] : raw[i];
        values[i] = v / scale;
    }
    return img;
}

std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

void write_png(const std::filesystem::path& path, std::size_t width, std::size_t height,
               std::uint32_t format, const std::uint8_t* data) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(width);
    png.height = static_cast<png_uint_32>(height);
    png.format = format;
    if (!png_image_write_to_file(&png, path.string().c_str(), 0, data, 0, nullptr)) {
        throw IoError(path.string() + ": " + png.message);
    }
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) throw IoError("no such file: " + path.string());
    const auto ext = lower_extension(path);
    if (ext == ".pgm") return load_pgm(path);
    if (ext == ".png") return load_png(path);
    throw FormatError("unsupported image format: " + path.string());
}

void save_png(const Image& image, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes(image.values().size());
    std::transform(image.values().begin(), image.values().end(), bytes.begin(), to_byte);
    write_png(path, image.width(), image.height(), PNG_FORMAT_GRAY, bytes.data());
}

void save_png(const RgbImage& image, const std::filesystem::path& path) {
    if (image.data.size() != image.width * image.height * 3) {
        throw ShapeMismatch("RGB buffer does not match its dimensions");
    }
    write_png(path, image.width, image.height, PNG_FORMAT_RGB, image.data.data());
}

void save_pgm(const Image& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string());
    out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
    for (double v : image.values()) out.put(static_cast<char>(to_byte(v)));
    if (!out) throw IoError("write failed for " + path.string());
}

Image resize(const Image& image, std::size_t width, std::size_t height) {
    if (width == 0 || height == 0) throw InvalidArgument("resize target must be non-empty");
    Image out(width, height);
    const double sx = static_cast<double>(image.width()) / static_cast<double>(width);
    const double sy = static_cast<double>(image.height()) / static_cast<double>(height);
    const auto max_c = static_cast<double>(image.width() - 1);
    const auto max_r = static_cast<double>(image.height() - 1);
    for (std::size_t r = 0; r < height; ++r) {
        const double y = std::clamp((static_cast<double>(r) + 0.5) * sy - 0.5, 0.0, max_r);
        const auto r0 = static_cast<std::size_t>(y);
        const std::size_t r1 = std::min(r0 + 1, image.height() - 1);
        const double fy = y - static_cast<double>(r0);
        for (std::size_t c = 0; c < width; ++c) {
            const double x = std::clamp((static_cast<double>(c) + 0.5) * sx - 0.5, 0.0, max_c);
            const auto c0 = static_cast<std::size_t>(x);
            const std::size_t c1 = std::min(c0 + 1, image.width() - 1);
            const double fx = x - static_cast<double>(c0);
            out(r, c) = (1 - fy) * ((1 - fx) * image(r0, c0) + fx * image(r0, c1)) +
                        fy * ((1 - fx) * image(r1, c0) + fx * image(r1, c1));
        }
    }
    return out;
}

RgbImage render_overlay(const Image& image, const std::vector<DetectedLine>& lines) {
    RgbImage out(image.width(), image.height());
    for (std::size_t i = 0; i < image.values().size(); ++i) {
        const auto g = to_byte(image.values()[i]);
        out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = g;
    }
    const double cx = 0.5 * static_cast<double>(image.width() - 1);
    const double cy = 0.5 * static_cast<double>(image.height() - 1);
    for (const auto& line : lines) {
        std::array<std::uint8_t, 3> colour{0, 255, 0};
        if (line.kind == LineKind::pleural) colour = {255, 255, 0};
        if (line.kind == LineKind::a_line) colour = {0, 255, 255};
        const double c = std::cos(line.omega * std::numbers::pi / 180.0);
        const double s = std::sin(line.omega * std::numbers::pi / 180.0);
        for (std::size_t r = 0; r < image.height(); ++r) {
            const double y = static_cast<double>(r) - cy;
            for (std::size_t col = 0; col < image.width(); ++col) {
                const double x = static_cast<double>(col) - cx;
                if (std::abs(x * c + y * s - line.r) > 0.75) continue;
                const std::size_t idx = 3 * (r * image.width() + col);
                std::copy(colour.begin(), colour.end(), out.data.begin() + static_cast<std::ptrdiff_t>(idx));
            }
        }
    }
    return out;
}

bool is_raster_file(const std::filesystem::path& path) {
    const auto ext = lower_extension(path);
    return ext == ".png" || ext == ".pgm";
}

}  // namespace dubline
