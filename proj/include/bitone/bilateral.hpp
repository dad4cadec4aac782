#pragma once

#include "bitone/image.hpp"

namespace bitone {

// Brute-force bilateral filter. Spatial Gaussian (std sigma_space) truncated
// at 3 sigma, range Gaussian (std sigma_range); weights renormalised per
// pixel over in-bounds neighbours. O(N * sigma_space^2); a reference for
// bilateral_fast and for small test images.
LuminanceMap bilateral_exact(const LuminanceMap& in, double sigma_space,
                             double sigma_range);

struct FastBilateralOptions {
  // Grid cell size in pixels is max(1, round(sigma_space * downsample_ratio)).
  double downsample_ratio = 0.5;
  // Intensity layer spacing in units of sigma_range. Linear interpolation
  // between layers one sigma_range apart misses by up to 0.2 log10 units next
  // to strong edges; a quarter keeps the error near 0.03.
  double range_spacing = 0.25;
};

// Layered approximation: range weights are evaluated at evenly spaced
// intensity levels, accumulated on a downsampled spatial grid, blurred there,
// and sliced back with trilinear interpolation.
LuminanceMap bilateral_fast(const LuminanceMap& in, double sigma_space,
                            double sigma_range,
                            const FastBilateralOptions& options = {});

// PSNR in dB with the peak taken as the dynamic range (max - min) of
// `reference`. Returns +inf for identical inputs.
double psnr(const LuminanceMap& reference, const LuminanceMap& test);
double max_abs_difference(const LuminanceMap& a, const LuminanceMap& b);

}  // namespace bitone
