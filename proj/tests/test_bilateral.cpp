#include <doctest.h>

#include <chrono>
#include <cmath>

#include "bitone/bilateral.hpp"
#include "bitone/image_io.hpp"
#include "bitone/tonemap.hpp"
#include "test_support.hpp"

using namespace bitone;
using namespace bitone::test;

namespace {

LuminanceMap step_image(int n, double low, double high) {
  LuminanceMap m(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) m(x, y) = x < n / 2 ? low : high;
  return m;
}

// Direct convolution with the 3-sigma disc kernel, normalised over the
// in-bounds taps.
LuminanceMap gaussian_oracle(const LuminanceMap& in, double sigma) {
  const int r = static_cast<int>(std::ceil(3 * sigma));
  LuminanceMap out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < in.width(); ++x) {
      double num = 0, den = 0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          if (dx * dx + dy * dy > 9 * sigma * sigma) continue;
          const int qx = x + dx, qy = y + dy;
          if (qx < 0 || qy < 0 || qx >= in.width() || qy >= in.height()) continue;
          const double w = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
          num += w * in(qx, qy);
          den += w;
        }
      out(x, y) = num / den;
    }
  return out;
}

LuminanceMap natural_log_luminance(int w, int h) {
  const auto img = load_hdr(corpus_dir() / "astronaut.hdr");
  return log_luminance(upsample_bilinear(img, w, h));
}

}  // namespace

TEST_CASE("constant input passes through both filters unchanged") {
  const LuminanceMap c(40, 30, -1.25);
  CHECK(bilateral_exact(c, 2.0, 0.4) == c);
  CHECK(bilateral_fast(c, 2.0, 0.4) == c);
  CHECK(bilateral_fast(c, 9.0, 0.4) == c);
}

TEST_CASE("exact filter preserves a step of ten range sigmas") {
  const double sigma_r = 0.4;
  const double sigma_s = 3.0;
  const double height = 10 * sigma_r;
  const auto in = step_image(64, 0.0, height);
  const auto out = bilateral_exact(in, sigma_s, sigma_r);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      const double dist = std::abs((x + 0.5) - 32.0);
      if (dist < 3 * sigma_s) continue;
      CHECK(std::abs(out(x, y) - in(x, y)) < 0.01 * height);
    }
}

TEST_CASE("huge range sigma turns the exact filter into a Gaussian blur") {
  LuminanceMap impulse(31, 27, 0.0);
  impulse(15, 13) = 1.0;
  impulse(2, 3) = 0.5;
  const auto out = bilateral_exact(impulse, 2.5, 1e9);
  const auto oracle = gaussian_oracle(impulse, 2.5);
  CHECK(max_abs_difference(out, oracle) < 1e-14);
}

TEST_CASE("fast filter tracks the exact one on synthetic texture") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto logy = log_luminance(textured_hdr(96, 72, 4.0, seed));
    const double sigma_s = 0.02 * 72;
    const auto exact = bilateral_exact(logy, sigma_s, 0.4);
    const auto fast = bilateral_fast(logy, sigma_s, 0.4);
    CHECK(psnr(exact, fast) >= 40.0);
    CHECK(max_abs_difference(exact, fast) <= 0.05);
  }
}

TEST_CASE("fast filter reaches 40 dB against the exact one at 800x600") {
  const auto logy = natural_log_luminance(800, 600);
  const double sigma_s = 0.02 * 600;
  const auto exact = bilateral_exact(logy, sigma_s, 0.4);
  const auto fast = bilateral_fast(logy, sigma_s, 0.4);
  const double p = psnr(exact, fast);
  MESSAGE("PSNR at 800x600: " << p << " dB, max error "
                              << max_abs_difference(exact, fast));
  CHECK(p >= 40.0);
}

TEST_CASE("fast filter runs within 0.3 s at 800x600") {
  const auto logy = natural_log_luminance(800, 600);
  double best = 1e9;
  for (int i = 0; i < 3; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = bilateral_fast(logy, 12.0, 0.4);
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    best = std::min(best, dt.count());
    CHECK(out.width() == 800);
  }
  MESSAGE("bilateral_fast at 800x600: " << best << " s");
  CHECK(best <= 0.3);
}

TEST_CASE("psnr and max difference helpers") {
  const auto a = step_image(8, 0.0, 1.0);
  CHECK(std::isinf(psnr(a, a)));
  CHECK(max_abs_difference(a, a) == 0.0);
  auto b = a;
  b(0, 0) += 0.5;
  CHECK(max_abs_difference(a, b) == 0.5);
  CHECK(psnr(a, b) == doctest::Approx(10 * std::log10(64 / 0.25)));
  CHECK_THROWS_AS(psnr(a, LuminanceMap(4, 4)), InputError);
}
