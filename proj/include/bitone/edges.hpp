#pragma once

#include <cstdint>

#include "bitone/image.hpp"

namespace bitone {

using EdgeMask = Plane<std::uint8_t>;

struct CannyParams {
  double sigma = 1.4;
  // Hysteresis thresholds as fractions of the maximum gradient magnitude.
  double low_frac = 0.1;
  double high_frac = 0.2;

  void validate() const;
};

struct Gradient {
  LuminanceMap gx;
  LuminanceMap gy;
  LuminanceMap magnitude;
};

// Gaussian smoothing (replicated border) followed by Sobel derivatives.
Gradient smoothed_gradient(const LuminanceMap& luma, double sigma);

// Gaussian smoothing, Sobel gradients, 4-direction non-maximum suppression,
// double threshold relative to the maximum magnitude and 8-connected
// hysteresis. A constant image yields an empty mask.
EdgeMask canny(const LuminanceMap& luma, const CannyParams& params = {});
EdgeMask canny(const LdrImage& view, const CannyParams& params = {});

std::size_t count_edges(const EdgeMask& mask);

}  // namespace bitone
