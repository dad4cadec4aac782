#include "bitone/edges.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace bitone {
namespace {

LuminanceMap gaussian_smooth(const LuminanceMap& in, double sigma) {
  if (!(sigma > 0.0)) return in;
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + r];
  }
  for (double& v : k) v /= sum;

  const int w = in.width();
  const int h = in.height();
  LuminanceMap tmp(w, h);
  LuminanceMap out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i)
        acc += k[i + r] * in(std::clamp(x + i, 0, w - 1), y);
      tmp(x, y) = acc;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i)
        acc += k[i + r] * tmp(x, std::clamp(y + i, 0, h - 1));
      out(x, y) = acc;
    }
  return out;
}

}  // namespace

void CannyParams::validate() const {
  if (!(low_frac > 0.0 && low_frac < high_frac && high_frac <= 1.0))
    throw InputError("canny thresholds need 0 < low < high <= 1");
  if (!(sigma >= 0.0)) throw InputError("canny sigma must be >= 0");
}

Gradient smoothed_gradient(const LuminanceMap& luma, double sigma) {
  const LuminanceMap s = gaussian_smooth(luma, sigma);
  const int w = s.width();
  const int h = s.height();
  Gradient g{LuminanceMap(w, h), LuminanceMap(w, h), LuminanceMap(w, h)};
  auto at = [&](int x, int y) {
    return s(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (at(x + 1, y - 1) + 2 * at(x + 1, y) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2 * at(x - 1, y) + at(x - 1, y + 1));
      const double gy = (at(x - 1, y + 1) + 2 * at(x, y + 1) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2 * at(x, y - 1) + at(x + 1, y - 1));
      g.gx(x, y) = gx;
      g.gy(x, y) = gy;
      g.magnitude(x, y) = std::sqrt(gx * gx + gy * gy);
    }
  }
  return g;
}

EdgeMask canny(const LuminanceMap& luma, const CannyParams& params) {
  params.validate();
  const int w = luma.width();
  const int h = luma.height();
  EdgeMask mask(w, h, 0);
  const Gradient g = smoothed_gradient(luma, params.sigma);
  const double max_mag =
      *std::max_element(g.magnitude.values().begin(), g.magnitude.values().end());
  if (!(max_mag > 0.0)) return mask;

  // tan(22.5 deg) and tan(67.5 deg) sector boundaries, compared without atan2
  // so that scaling the input leaves the quantisation untouched.
  constexpr double kTan22 = 0.41421356237309503;
  constexpr double kTan67 = 2.4142135623730949;
  LuminanceMap thin(w, h, 0.0);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const double m = g.magnitude(x, y);
      if (m == 0.0) continue;
      const double gx = g.gx(x, y);
      const double gy = g.gy(x, y);
      const double ax = std::abs(gx);
      const double ay = std::abs(gy);
      int dx = 0, dy = 0;
      if (ay <= kTan22 * ax) {
        dx = 1;
      } else if (ay >= kTan67 * ax) {
        dy = 1;
      } else if ((gx > 0) == (gy > 0)) {
        dx = 1;
        dy = 1;
      } else {
        dx = 1;
        dy = -1;
      }
      const double ahead = g.magnitude(x + dx, y + dy);
      const double behind = g.magnitude(x - dx, y - dy);
      // Asymmetric tie-break keeps exactly one of two equal neighbours.
      if (m > ahead && m >= behind) thin(x, y) = m;
    }
  }

  const double high = params.high_frac * max_mag;
  const double low = params.low_frac * max_mag;
  std::vector<int> stack;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (thin(x, y) >= high && thin(x, y) > 0.0) {
        mask(x, y) = 1;
        stack.push_back(y * w + x);
      }
  while (!stack.empty()) {
    const int idx = stack.back();
    stack.pop_back();
    const int cx = idx % w;
    const int cy = idx / w;
    for (int ny = std::max(0, cy - 1); ny <= std::min(h - 1, cy + 1); ++ny)
      for (int nx = std::max(0, cx - 1); nx <= std::min(w - 1, cx + 1); ++nx)
        if (!mask(nx, ny) && thin(nx, ny) >= low && thin(nx, ny) > 0.0) {
          mask(nx, ny) = 1;
          stack.push_back(ny * w + nx);
        }
  }
  return mask;
}

EdgeMask canny(const LdrImage& view, const CannyParams& params) {
  return canny(luminance(view), params);
}

std::size_t count_edges(const EdgeMask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.values().begin(), mask.values().end(),
                    [](std::uint8_t v) { return v != 0; }));
}

}  // namespace bitone
