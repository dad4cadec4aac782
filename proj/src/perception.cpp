#include "bitone/perception.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace bitone {

void FusionParams::validate() const {
  if (fusion_radius < 0) throw InputError("fusion radius must be >= 0");
  if (!(s > 0.0) || !(t > 0.0) || !(z >= 0.0))
    throw InputError("contrast fusion constants must be positive");
  if (!std::isfinite(alpha_degrees)) throw InputError("alpha must be finite");
}

BrightnessMap local_brightness(const LuminanceMap& luma, int radius) {
  const int w = luma.width();
  const int h = luma.height();
  if (radius <= 0) return luma;

  // Row prefix sums: prefix[y][x] = sum of luma(0..x-1, y).
  std::vector<double> prefix(static_cast<std::size_t>(w + 1) * h, 0.0);
  for (int y = 0; y < h; ++y) {
    double* row = prefix.data() + static_cast<std::size_t>(y) * (w + 1);
    for (int x = 0; x < w; ++x) row[x + 1] = row[x] + luma(x, y);
  }
  std::vector<int> half_width(2 * radius + 1);
  for (int dy = -radius; dy <= radius; ++dy) {
    int hw = static_cast<int>(std::floor(std::sqrt(
        static_cast<double>(radius * radius - dy * dy))));
    while ((hw + 1) * (hw + 1) + dy * dy <= radius * radius) ++hw;
    while (hw * hw + dy * dy > radius * radius) --hw;
    half_width[dy + radius] = hw;
  }

  BrightnessMap out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sum = 0.0;
      long count = 0;
      const int dy_lo = std::max(-radius, -y);
      const int dy_hi = std::min(radius, h - 1 - y);
      for (int dy = dy_lo; dy <= dy_hi; ++dy) {
        const int hw = half_width[dy + radius];
        const int x0 = std::max(0, x - hw);
        const int x1 = std::min(w - 1, x + hw);
        const double* row =
            prefix.data() + static_cast<std::size_t>(y + dy) * (w + 1);
        sum += row[x1 + 1] - row[x0];
        count += x1 - x0 + 1;
      }
      out(x, y) = sum / static_cast<double>(count);
    }
  }
  return out;
}

BrightnessMap local_brightness(const LdrImage& view, int radius) {
  return local_brightness(luminance(view), radius);
}

namespace {

// Exact cosine at multiples of 30 degrees where the value is rational, so
// alpha = 120 gives exactly -0.5.
double cos_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  constexpr double kIrrational = 2.0;
  static constexpr double kTable[12] = {
      1.0,  kIrrational, 0.5,  0.0, -0.5, kIrrational,
      -1.0, kIrrational, -0.5, 0.0, 0.5,  kIrrational};
  if (std::fmod(r, 30.0) == 0.0) {
    const double c = kTable[static_cast<int>(r / 30.0) % 12];
    if (c != kIrrational) return c;
  }
  return std::cos(r * std::numbers::pi / 180.0);
}

}  // namespace

double fuse_brightness(double left, double right, double alpha_degrees) {
  const double c = cos_degrees(alpha_degrees);
  const double radicand = left * left + right * right + 2.0 * left * right * c;
  const double fused = std::sqrt(std::max(0.0, radicand));
  if (c == -0.5) {
    // The min/max envelope is exact at -0.5; keep it under rounding too.
    return std::clamp(fused, std::min(left, right), std::max(left, right));
  }
  return fused;
}

ContrastMap contour_contrast(const LuminanceMap& luma) {
  const int w = luma.width();
  const int h = luma.height();
  ContrastMap out(w, h);
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - 1);
    const int y1 = std::min(h - 1, y + 1);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - 1);
      const int x1 = std::min(w - 1, x + 1);
      double lo = luma(x, y);
      double hi = lo;
      for (int yy = y0; yy <= y1; ++yy) {
        for (int xx = x0; xx <= x1; ++xx) {
          lo = std::min(lo, luma(xx, yy));
          hi = std::max(hi, luma(xx, yy));
        }
      }
      out(x, y) = 100.0 * (hi - lo);
    }
  }
  return out;
}

ContrastMap contour_contrast(const LdrImage& view) {
  return contour_contrast(luminance(view));
}

double fuse_contrast(double left, double right, const FusionParams& params) {
  const double ls = std::pow(left, params.s);
  const double rt = std::pow(right, params.t);
  const double sum = ls + rt;
  if (sum == 0.0) return 0.0;
  return std::pow(sum, params.s / params.t) / (params.z + sum);
}

ViewFeatures compute_features(const LdrImage& view, const FusionParams& params) {
  const LuminanceMap luma = luminance(view);
  return {local_brightness(luma, params.fusion_radius), contour_contrast(luma)};
}

}  // namespace bitone
