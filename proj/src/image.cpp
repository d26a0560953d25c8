#include "advsmo/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "advsmo/error.hpp"

namespace advsmo {

namespace {

bool in_unit_range(double v) { return v >= 0.0 && v <= 1.0; }

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

// IHDR is always the first chunk: 8 signature bytes, 4 length, 4 type, then
// width(4) height(4) bit_depth(1) color_type(1).
constexpr std::size_t kIhdrBitDepth = 24;
constexpr std::size_t kIhdrColorType = 25;

}  // namespace

Channel::Channel(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
    if (width <= 0 || height <= 0) {
        throw Error(ErrorCode::invalid_argument, "channel dimensions must be positive");
    }
    if (values_.size() != static_cast<std::size_t>(width) * height) {
        throw Error(ErrorCode::invalid_argument, "channel value count does not match width*height");
    }
    if (!std::all_of(values_.begin(), values_.end(), in_unit_range)) {
        throw Error(ErrorCode::invalid_argument, "channel values must lie in [0, 1]");
    }
}

Image::Image(int width, int height, int channels, std::vector<double> pixels)
    : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
    if (width <= 0 || height <= 0) {
        throw Error(ErrorCode::invalid_argument, "image dimensions must be positive");
    }
    if (channels != 1 && channels != 3) {
        throw Error(ErrorCode::invalid_argument, "image must have 1 or 3 channels");
    }
    if (pixels_.size() != static_cast<std::size_t>(width) * height * channels) {
        throw Error(ErrorCode::invalid_argument, "pixel count does not match width*height*channels");
    }
    if (!std::all_of(pixels_.begin(), pixels_.end(), in_unit_range)) {
        throw Error(ErrorCode::invalid_argument, "pixel values must lie in [0, 1]");
    }
}

Image Image::filled(int width, int height, int channels, double value) {
    return Image(width, height, channels,
                 std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0) *
                                         std::max(channels, 0),
                                     value));
}

Channel Image::plane(int c) const {
    if (c < 0 || c >= channels_) {
        throw Error(ErrorCode::invalid_argument, "channel index out of range");
    }
    std::vector<double> values(static_cast<std::size_t>(width_) * height_);
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = pixels_[i * channels_ + c];
    }
    return Channel(width_, height_, std::move(values));
}

Image from_planes(std::span<const Channel> planes) {
    if (planes.size() != 1 && planes.size() != 3) {
        throw Error(ErrorCode::invalid_argument, "expected 1 or 3 planes");
    }
    const int w = planes[0].width();
    const int h = planes[0].height();
    const auto n = static_cast<int>(planes.size());
    std::vector<double> pixels(static_cast<std::size_t>(w) * h * n);
    for (int c = 0; c < n; ++c) {
        if (planes[c].width() != w || planes[c].height() != h) {
            throw Error(ErrorCode::dimension_mismatch, "planes differ in size");
        }
        const auto values = planes[c].values();
        for (std::size_t i = 0; i < values.size(); ++i) {
            pixels[i * n + c] = values[i];
        }
    }
    return Image(w, h, n, std::move(pixels));
}

Channel to_luma(const Image& img) {
    if (img.channels() == 1) {
        return img.plane(0);
    }
    const auto px = img.pixels();
    std::vector<double> values(static_cast<std::size_t>(img.width()) * img.height());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double y = 0.299 * px[3 * i] + 0.587 * px[3 * i + 1] + 0.114 * px[3 * i + 2];
        values[i] = std::clamp(y, 0.0, 1.0);
    }
    return Channel(img.width(), img.height(), std::move(values));
}

std::uint8_t to_byte(double v) noexcept {
    const double scaled = std::floor(v * 255.0 + 0.5);
    return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

Image quantize8(const Image& img) {
    std::vector<double> pixels(img.size());
    std::transform(img.pixels().begin(), img.pixels().end(), pixels.begin(),
                   [](double v) { return to_byte(v) / 255.0; });
    return Image(img.width(), img.height(), img.channels(), std::move(pixels));
}

std::vector<std::uint8_t> encode_png(const Image& img) {
    std::vector<std::uint8_t> raw(img.size());
    std::transform(img.pixels().begin(), img.pixels().end(), raw.begin(), to_byte);

    png_image desc;
    std::memset(&desc, 0, sizeof(desc));
    desc.version = PNG_IMAGE_VERSION;
    desc.width = static_cast<png_uint_32>(img.width());
    desc.height = static_cast<png_uint_32>(img.height());
    desc.format = img.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&desc, nullptr, &size, 0, raw.data(), 0, nullptr)) {
        std::string msg = desc.message;
        png_image_free(&desc);
        throw Error(ErrorCode::io_failure, "png encode failed: " + msg);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&desc, out.data(), &size, 0, raw.data(), 0, nullptr)) {
        std::string msg = desc.message;
        png_image_free(&desc);
        throw Error(ErrorCode::io_failure, "png encode failed: " + msg);
    }
    out.resize(size);
    return out;
}

Image decode_png(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 33 || !std::equal(std::begin(kPngSignature), std::end(kPngSignature), bytes.begin())) {
        throw Error(ErrorCode::corrupt_file, "missing PNG signature");
    }
    if (std::memcmp(bytes.data() + 12, "IHDR", 4) != 0) {
        throw Error(ErrorCode::corrupt_file, "first chunk is not IHDR");
    }
    const int bit_depth = bytes[kIhdrBitDepth];
    const int color_type = bytes[kIhdrColorType];
    if (bit_depth != 8) {
        throw Error(ErrorCode::unsupported_bit_depth, "only 8-bit PNG is supported, got " + std::to_string(bit_depth));
    }

    png_image desc;
    std::memset(&desc, 0, sizeof(desc));
    desc.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&desc, bytes.data(), bytes.size())) {
        std::string msg = desc.message;
        png_image_free(&desc);
        throw Error(ErrorCode::corrupt_file, msg);
    }

    // Read with alpha kept so it can be dropped verbatim instead of composited.
    const bool gray = (color_type & PNG_COLOR_MASK_COLOR) == 0;
    const int stored = gray ? 2 : 4;
    desc.format = gray ? PNG_FORMAT_GA : PNG_FORMAT_RGBA;
    std::vector<std::uint8_t> raw(PNG_IMAGE_SIZE(desc));
    if (!png_image_finish_read(&desc, nullptr, raw.data(), 0, nullptr)) {
        std::string msg = desc.message;
        png_image_free(&desc);
        throw Error(ErrorCode::corrupt_file, msg);
    }

    const int w = static_cast<int>(desc.width);
    const int h = static_cast<int>(desc.height);
    const int channels = gray ? 1 : 3;
    std::vector<double> pixels(static_cast<std::size_t>(w) * h * channels);
    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
        for (int c = 0; c < channels; ++c) {
            pixels[i * channels + c] = raw[i * stored + c] / 255.0;
        }
    }
    return Image(w, h, channels, std::move(pixels));
}

Image load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::file_missing, path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_png(bytes);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void save_image(const Image& img, const std::filesystem::path& path) {
    write_file(path, encode_png(img));
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::io_failure, "cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(ErrorCode::io_failure, "write failed: " + path.string());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace advsmo
