#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace advsmo {

/// Single-plane view used by SSIM and GLCM. Values are row-major in [0, 1].
class Channel {
public:
    Channel(int width, int height, std::vector<double> values);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    double at(int x, int y) const noexcept { return values_[static_cast<std::size_t>(y) * width_ + x]; }
    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const Channel&, const Channel&) = default;

private:
    int width_;
    int height_;
    std::vector<double> values_;
};

/// Normalized pixel raster with 1 or 3 interleaved channels, values in [0, 1].
///
/// Images are immutable once built; every operation returns a new image.
class Image {
public:
    Image(int width, int height, int channels, std::vector<double> pixels);

    static Image filled(int width, int height, int channels, double value);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    std::size_t size() const noexcept { return pixels_.size(); }

    double at(int x, int y, int c = 0) const noexcept {
        return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    std::span<const double> pixels() const noexcept { return pixels_; }

    /// Extracts channel `c` as its own plane.
    Channel plane(int c) const;

    bool same_shape(const Image& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int width_;
    int height_;
    int channels_;
    std::vector<double> pixels_;
};

/// Builds an image from per-channel planes (all the same size).
Image from_planes(std::span<const Channel> planes);

/// Rec. 601 luma for RGB; identity copy for grayscale.
Channel to_luma(const Image& img);

/// 8-bit storage value for a unit-scale pixel: round-half-up of v*255, clamped.
std::uint8_t to_byte(double v) noexcept;

/// Snaps every pixel to the nearest representable 8-bit level.
Image quantize8(const Image& img);

std::vector<std::uint8_t> encode_png(const Image& img);
Image decode_png(std::span<const std::uint8_t> bytes);

Image load_image(const std::filesystem::path& path);
void save_image(const Image& img, const std::filesystem::path& path);

/// Writes raw bytes, creating parent directories. Throws io_failure.
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace advsmo
