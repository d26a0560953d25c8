#include "advsmo/gabor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "advsmo/error.hpp"
#include "advsmo/filter2d.hpp"

namespace advsmo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kMinRawSum = 1e-6;

void require_same_shape(const Image& a, const Image& b) {
    if (!a.same_shape(b)) {
        throw Error(ErrorCode::dimension_mismatch, "images differ in width, height or channel count");
    }
}

}  // namespace

void GaborParams::validate() const {
    if (kernel_scale < 3 || kernel_scale % 2 == 0) {
        throw Error(ErrorCode::invalid_argument, "kernel scale must be odd and >= 3, got " + std::to_string(kernel_scale));
    }
    if (!(wavelength > 0.0) || !(sigma > 0.0) || !(aspect > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "wavelength, sigma and aspect must be positive");
    }
    if (!std::isfinite(theta) || !std::isfinite(phase) || !std::isfinite(wavelength) || !std::isfinite(sigma)) {
        throw Error(ErrorCode::invalid_argument, "gabor parameters must be finite");
    }
}

double sigma_for_bandwidth(double wavelength, double octaves) {
    const double spread = std::pow(2.0, octaves);
    return wavelength / std::numbers::pi * std::sqrt(std::log(2.0) / 2.0) * (spread + 1.0) / (spread - 1.0);
}

GaborParams GaborDefaults::params_for(int k1, double theta_deg) const {
    GaborParams p;
    p.wavelength = lambda_ratio * k1;
    p.phase = phase;
    p.aspect = aspect;
    p.sigma = sigma_for_bandwidth(p.wavelength, bandwidth);
    p.theta = normalize_theta(theta_deg);
    p.kernel_scale = k1;
    return p;
}

double normalize_theta(double theta_deg) {
    double t = std::fmod(theta_deg, 180.0);
    if (t < 0.0) t += 180.0;
    return t >= 180.0 ? 0.0 : t;
}

std::pair<double, double> rotate_coords(double k1, double k2, double theta_deg) {
    const double t = theta_deg * kDegToRad;
    const double c = std::cos(t);
    const double s = std::sin(t);
    return {k1 * c + k2 * s, -k1 * s + k2 * c};
}

Kernel gabor_kernel_raw(const GaborParams& p) {
    p.validate();
    const int side = p.kernel_scale;
    const int half = (side - 1) / 2;
    const double two_sigma_sq = 2.0 * p.sigma * p.sigma;
    const double gamma_sq = p.aspect * p.aspect;
    const double theta = normalize_theta(p.theta);

    Kernel k{side, std::vector<double>(static_cast<std::size_t>(side) * side)};
    for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx) {
            const auto [u, v] = rotate_coords(dx, dy, theta);
            const double envelope = std::exp(-(u * u + gamma_sq * v * v) / two_sigma_sq);
            const double carrier = std::cos(2.0 * std::numbers::pi * u / p.wavelength + p.phase);
            k.weights[static_cast<std::size_t>(dy + half) * side + (dx + half)] = envelope * carrier;
        }
    }
    return k;
}

Kernel gabor_kernel(const GaborParams& p) {
    Kernel k = gabor_kernel_raw(p);
    double sum = 0.0;
    for (double w : k.weights) sum += w;
    if (!(sum > kMinRawSum)) {
        throw Error(ErrorCode::degenerate_kernel,
                    "raw kernel sum " + std::to_string(sum) + " for k1=" + std::to_string(p.kernel_scale) +
                        " theta=" + std::to_string(p.theta));
    }
    for (double& w : k.weights) w /= sum;
    return k;
}

Image smooth(const Image& img, const GaborParams& p) {
    p.validate();
    if (p.kernel_scale > std::min(img.width(), img.height())) {
        throw Error(ErrorCode::kernel_larger_than_image,
                    "kernel side " + std::to_string(p.kernel_scale) + " exceeds image " + std::to_string(img.width()) +
                        "x" + std::to_string(img.height()));
    }
    const Kernel k = gabor_kernel(p);
    std::vector<Channel> planes;
    planes.reserve(img.channels());
    for (int c = 0; c < img.channels(); ++c) {
        const Channel in = img.plane(c);
        auto out = detail::convolve_plane(in.values(), img.width(), img.height(), k.weights, k.side);
        for (double& v : out) v = std::clamp(v, 0.0, 1.0);
        planes.emplace_back(img.width(), img.height(), std::move(out));
    }
    return from_planes(planes);
}

Image extract_texture(const Image& benign, const Image& smoothed) {
    require_same_shape(benign, smoothed);
    std::vector<double> residual(benign.size());
    const auto b = benign.pixels();
    const auto s = smoothed.pixels();
    for (std::size_t i = 0; i < residual.size(); ++i) {
        residual[i] = (b[i] - s[i] + 1.0) / 2.0;
    }
    return Image(benign.width(), benign.height(), benign.channels(), std::move(residual));
}

Image reconstruct_benign(const Image& smoothed, const Image& residual) {
    require_same_shape(smoothed, residual);
    std::vector<double> out(smoothed.size());
    const auto s = smoothed.pixels();
    const auto r = residual.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::clamp(s[i] + (2.0 * r[i] - 1.0), 0.0, 1.0);
    }
    return Image(smoothed.width(), smoothed.height(), smoothed.channels(), std::move(out));
}

}  // namespace advsmo
