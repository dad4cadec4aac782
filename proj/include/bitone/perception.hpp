#pragma once

#include "bitone/image.hpp"

namespace bitone {

struct FusionParams {
  double alpha_degrees = 120.0;
  int fusion_radius = 16;
  // Legge-type contrast combination constants.
  double s = 3.47;
  double t = 3.03;
  double z = 4.76;

  void validate() const;
};

// Mean luminance over the lattice disc dx^2 + dy^2 <= radius^2, averaged over
// in-bounds pixels only. Radius 0 is the identity.
BrightnessMap local_brightness(const LuminanceMap& luma, int radius);
BrightnessMap local_brightness(const LdrImage& view, int radius);

// Vector summation of the two eyes' brightness with phase alpha.
double fuse_brightness(double left, double right, double alpha_degrees);

// 100 * (max - min) of luminance over the in-bounds 3x3 window.
ContrastMap contour_contrast(const LuminanceMap& luma);
ContrastMap contour_contrast(const LdrImage& view);

// (cL^s + cR^t)^(s/t) / (z + cL^s + cR^t), with contrasts in percent.
// Not symmetric in its arguments since s != t.
double fuse_contrast(double left, double right, const FusionParams& params);

// Per-view quantities reused by every energy evaluation involving the view.
struct ViewFeatures {
  BrightnessMap brightness;
  ContrastMap contrast;

  int width() const { return brightness.width(); }
  int height() const { return brightness.height(); }
};

ViewFeatures compute_features(const LdrImage& view, const FusionParams& params);

}  // namespace bitone
