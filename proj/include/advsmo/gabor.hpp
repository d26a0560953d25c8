#pragma once

#include <utility>
#include <vector>

#include "advsmo/image.hpp"

namespace advsmo {

/// Parameters of one real Gabor kernel. Angles are in degrees.
struct GaborParams {
    double wavelength;    // lambda, pixels
    double phase = 0.0;   // psi, radians
    double aspect = 0.5;  // gamma
    double sigma;         // envelope width, pixels
    double theta = 0.0;   // stripe orientation, degrees
    int kernel_scale = 3; // odd side length; the kernel is square

    /// Throws invalid_argument unless k is odd >= 3 and lambda, sigma, gamma > 0.
    void validate() const;
};

/// How per-pair parameters are filled in for a (k1, theta) candidate.
struct GaborDefaults {
    double lambda_ratio = 2.0;  // lambda = lambda_ratio * k1
    double phase = 0.0;
    double aspect = 0.5;
    double bandwidth = 1.0;  // octaves; fixes sigma relative to lambda

    GaborParams params_for(int k1, double theta_deg) const;
};

/// sigma for a given wavelength at `octaves` of half-response bandwidth.
double sigma_for_bandwidth(double wavelength, double octaves);

/// Maps any finite angle into [0, 180).
double normalize_theta(double theta_deg);

std::pair<double, double> rotate_coords(double k1, double k2, double theta_deg);

/// Square kernel, row-major; row index is the vertical offset k2, column the horizontal offset k1.
struct Kernel {
    int side = 0;
    std::vector<double> weights;

    double at(int dx, int dy) const {
        const int half = (side - 1) / 2;
        return weights[static_cast<std::size_t>(dy + half) * side + (dx + half)];
    }
};

/// Real part of the Gabor function sampled on the integer grid, before normalization.
Kernel gabor_kernel_raw(const GaborParams& p);

/// DC-normalized kernel (weights sum to one). Throws degenerate_kernel if the raw sum is <= 1e-6.
Kernel gabor_kernel(const GaborParams& p);

Image smooth(const Image& img, const GaborParams& p);

/// Signed residual benign - smoothed, stored shifted as (r + 1) / 2.
Image extract_texture(const Image& benign, const Image& smoothed);

/// Inverse of extract_texture: smoothed + (2 * residual - 1), clamped to [0, 1].
Image reconstruct_benign(const Image& smoothed, const Image& residual);

}  // namespace advsmo
