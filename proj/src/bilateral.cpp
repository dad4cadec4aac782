#include "bitone/bilateral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace bitone {
namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(0, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  if (sigma <= 0.0) {
    k.assign(1, 1.0);
    return k;
  }
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int i = -radius; i <= radius; ++i) k[i + radius] = std::exp(-i * i * inv);
  return k;
}

// Separable blur with zero padding; both the value and weight grids go
// through the same kernel, so the border falloff cancels in their ratio.
void blur_zero_padded(double* grid, int gw, int gh,
                      const std::vector<double>& k) {
  const int r = static_cast<int>(k.size() / 2);
  std::vector<double> tmp(static_cast<std::size_t>(gw) * gh);
  for (int y = 0; y < gh; ++y) {
    for (int x = 0; x < gw; ++x) {
      double acc = 0.0;
      const int lo = std::max(-r, -x);
      const int hi = std::min(r, gw - 1 - x);
      for (int i = lo; i <= hi; ++i) acc += k[i + r] * grid[y * gw + x + i];
      tmp[y * gw + x] = acc;
    }
  }
  for (int y = 0; y < gh; ++y) {
    for (int x = 0; x < gw; ++x) {
      double acc = 0.0;
      const int lo = std::max(-r, -y);
      const int hi = std::min(r, gh - 1 - y);
      for (int i = lo; i <= hi; ++i) acc += k[i + r] * tmp[(y + i) * gw + x];
      grid[y * gw + x] = acc;
    }
  }
}

struct Bilerp {
  int x0, x1, y0, y1;
  double fx, fy;
};

Bilerp grid_coord(int x, int y, int ds, int gw, int gh) {
  // Cell c covers pixels [c*ds, c*ds + ds); its centre sits at c*ds + (ds-1)/2.
  const double half = (ds - 1) * 0.5;
  auto axis = [&](int p, int n, int& c0, int& c1, double& f) {
    double g = (p - half) / ds;
    g = std::clamp(g, 0.0, static_cast<double>(n - 1));
    c0 = static_cast<int>(std::floor(g));
    c1 = std::min(c0 + 1, n - 1);
    f = g - c0;
  };
  Bilerp b{};
  axis(x, gw, b.x0, b.x1, b.fx);
  axis(y, gh, b.y0, b.y1, b.fy);
  return b;
}

double sample(const std::vector<double>& grid, std::size_t offset, int gw,
              const Bilerp& b) {
  const double* g = grid.data() + offset;
  const double top = g[b.y0 * gw + b.x0] * (1 - b.fx) + g[b.y0 * gw + b.x1] * b.fx;
  const double bot = g[b.y1 * gw + b.x0] * (1 - b.fx) + g[b.y1 * gw + b.x1] * b.fx;
  return top * (1 - b.fy) + bot * b.fy;
}

}  // namespace

LuminanceMap bilateral_exact(const LuminanceMap& in, double sigma_space,
                             double sigma_range) {
  const int w = in.width();
  const int h = in.height();
  if (std::adjacent_find(in.values().begin(), in.values().end(),
                         std::not_equal_to<>()) == in.values().end())
    return in;
  const int r = static_cast<int>(std::ceil(3.0 * sigma_space));
  const double inv_s = 1.0 / (2.0 * sigma_space * sigma_space);
  const double inv_r = 1.0 / (2.0 * sigma_range * sigma_range);
  const double cutoff = 9.0 * sigma_space * sigma_space;

  struct Tap {
    int dx, dy;
    double w;
  };
  std::vector<Tap> taps;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (dx * dx + dy * dy <= cutoff)
        taps.push_back({dx, dy, std::exp(-(dx * dx + dy * dy) * inv_s)});

  LuminanceMap out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double centre = in(x, y);
      double num = 0.0;
      double den = 0.0;
      for (const Tap& t : taps) {
        const int qx = x + t.dx;
        const int qy = y + t.dy;
        if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
        const double v = in(qx, qy);
        const double d = v - centre;
        const double wt = t.w * std::exp(-d * d * inv_r);
        num += wt * v;
        den += wt;
      }
      out(x, y) = num / den;
    }
  }
  return out;
}

LuminanceMap bilateral_fast(const LuminanceMap& in, double sigma_space,
                            double sigma_range,
                            const FastBilateralOptions& options) {
  const int w = in.width();
  const int h = in.height();
  const auto [mn_it, mx_it] = std::minmax_element(in.values().begin(),
                                                  in.values().end());
  const double lo = *mn_it;
  const double hi = *mx_it;
  if (!(hi > lo)) return in;

  const int ds = std::max(
      1, static_cast<int>(std::lround(sigma_space * options.downsample_ratio)));
  const int gw = (w + ds - 1) / ds;
  const int gh = (h + ds - 1) / ds;
  // Box splatting already contributes (ds^2 - 1)/12 of spatial variance.
  const double grid_var =
      std::max(0.0, sigma_space * sigma_space - (ds * ds - 1) / 12.0);
  const auto kernel = gaussian_kernel(std::sqrt(grid_var) / ds);

  const double spacing = sigma_range * options.range_spacing;
  const int levels =
      std::max(2, static_cast<int>(std::ceil((hi - lo) / spacing)) + 1);
  const double step = (hi - lo) / (levels - 1);
  const double inv_r = 1.0 / (2.0 * sigma_range * sigma_range);

  const std::size_t cells = static_cast<std::size_t>(gw) * gh;
  const std::size_t L = static_cast<std::size_t>(levels);
  // Splat cell-major (all levels of a cell adjacent), then transpose to one
  // plane per level for blurring and slicing. Along the levels the Gaussian
  // g_j = exp(-(v - lo - j*step)^2 * inv_r) obeys g_{j+1} = g_j * r_j with
  // r_{j+1} = r_j * exp(-2 step^2 inv_r), so each pixel costs two exp calls.
  const double decay = std::exp(-2.0 * step * step * inv_r);
  constexpr double kNegligible = 1e-30;
  std::vector<double> wsplat(cells * L, 0.0);
  std::vector<double> vsplat(cells * L, 0.0);
  for (int y = 0; y < h; ++y) {
    const int cy = y / ds;
    for (int x = 0; x < w; ++x) {
      const double v = in(x, y);
      const std::size_t c = (static_cast<std::size_t>(cy) * gw + x / ds) * L;
      const int jc = std::clamp(static_cast<int>(std::lround((v - lo) / step)),
                                0, levels - 1);
      const double d = v - (lo + jc * step);
      const double gc = std::exp(-d * d * inv_r);
      const double up0 = std::exp((2.0 * d * step - step * step) * inv_r);
      double g = gc;
      double ratio = up0;
      for (int j = jc; j < levels && g > kNegligible; ++j) {
        wsplat[c + j] += g;
        vsplat[c + j] += g * v;
        g *= ratio;
        ratio *= decay;
      }
      // Downward: g_{j-1} = g_j / r_{j-1}, and 1/r_{j-1} = (1/r_j) / decay
      // starting from 1/r_{jc-1} = exp((-2 d step - step^2) inv_r).
      g = gc;
      ratio = std::exp((-2.0 * d * step - step * step) * inv_r);
      for (int j = jc - 1; j >= 0; --j) {
        g *= ratio;
        ratio *= decay;
        if (!(g > kNegligible)) break;
        wsplat[c + j] += g;
        vsplat[c + j] += g * v;
      }
    }
  }
  std::vector<double> weight(cells * L);
  std::vector<double> value(cells * L);
  for (std::size_t c = 0; c < cells; ++c)
    for (std::size_t j = 0; j < L; ++j) {
      weight[j * cells + c] = wsplat[c * L + j];
      value[j * cells + c] = vsplat[c * L + j];
    }
  for (int j = 0; j < levels; ++j) {
    blur_zero_padded(weight.data() + j * cells, gw, gh, kernel);
    blur_zero_padded(value.data() + j * cells, gw, gh, kernel);
  }

  LuminanceMap out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = in(x, y);
      const double pos = std::clamp((v - lo) / step, 0.0, levels - 1.0);
      const int j0 = std::min(static_cast<int>(pos), levels - 2);
      const double t = pos - j0;
      const Bilerp b = grid_coord(x, y, ds, gw, gh);
      auto layer = [&](int j) {
        const double wsum = sample(weight, j * cells, gw, b);
        const double vsum = sample(value, j * cells, gw, b);
        return wsum > std::numeric_limits<double>::min() ? vsum / wsum : v;
      };
      out(x, y) = (1 - t) * layer(j0) + t * layer(j0 + 1);
    }
  }
  return out;
}

double psnr(const LuminanceMap& reference, const LuminanceMap& test) {
  if (!reference.same_shape(test)) throw InputError("psnr: size mismatch");
  const auto [mn, mx] = std::minmax_element(reference.values().begin(),
                                            reference.values().end());
  const double peak = *mx - *mn;
  double se = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference[i] - test[i];
    se += d * d;
  }
  if (se == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = se / static_cast<double>(reference.size());
  return 10.0 * std::log10(peak * peak / mse);
}

double max_abs_difference(const LuminanceMap& a, const LuminanceMap& b) {
  if (!a.same_shape(b)) throw InputError("size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace bitone
