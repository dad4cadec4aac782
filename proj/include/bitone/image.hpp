#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bitone {

// Thrown for bad files, bad arguments and shape mismatches (CLI exit code 1).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when an energy evaluation goes non-finite (CLI exit code 2).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Single-channel raster, row-major.
template <typename T>
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    if (width < 0 || height < 0) throw InputError("negative plane size");
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  bool same_shape(int w, int h) const { return width_ == w && height_ == h; }
  template <typename U>
  bool same_shape(const Plane<U>& o) const {
    return same_shape(o.width(), o.height());
  }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using LuminanceMap = Plane<double>;
// Per-pixel mean luminance over the fusion disc, in [0,1].
using BrightnessMap = Plane<double>;
// Per-pixel 3x3 max-min luminance, in percent [0,100].
using ContrastMap = Plane<double>;

namespace detail {
struct HdrTag {};
struct LdrTag {};
}  // namespace detail

// RGB raster whose channel range is enforced on construction. Pixels are
// immutable once built; derive new images instead of editing in place.
template <typename Tag>
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, std::vector<Rgb> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    validate();
  }
  RgbImage(int width, int height, Rgb fill)
      : RgbImage(width, height,
                 std::vector<Rgb>(checked_count(width, height), fill)) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return pixels_.size(); }

  const Rgb& operator()(int x, int y) const {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }
  const Rgb& operator[](std::size_t i) const { return pixels_[i]; }
  std::span<const Rgb> pixels() const { return pixels_; }

  template <typename U>
  bool same_shape(const RgbImage<U>& o) const {
    return width_ == o.width() && height_ == o.height();
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  static std::size_t checked_count(int width, int height) {
    if (width < 1 || height < 1)
      throw InputError("image dimensions must be positive");
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  void validate() const;

  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb> pixels_;
};

// Linear scene radiance; channels finite and >= 0.
using HdrImage = RgbImage<detail::HdrTag>;
// Display-referred (gamma-encoded) values; channels in [0,1].
using LdrImage = RgbImage<detail::LdrTag>;

extern template class RgbImage<detail::HdrTag>;
extern template class RgbImage<detail::LdrTag>;

struct BinocularPair {
  LdrImage left;
  LdrImage right;
  double beta_left = 0.0;
  double beta_right = 0.0;
};

// Rec. 709 luma weights applied to linear or encoded RGB.
inline constexpr double kLumaR = 0.2126;
inline constexpr double kLumaG = 0.7152;
inline constexpr double kLumaB = 0.0722;

inline double luminance(const Rgb& p) {
  return kLumaR * p.r + kLumaG * p.g + kLumaB * p.b;
}

template <typename Tag>
LuminanceMap luminance(const RgbImage<Tag>& img) {
  LuminanceMap out(img.width(), img.height());
  for (std::size_t i = 0; i < img.pixel_count(); ++i)
    out[i] = luminance(img[i]);
  return out;
}

// Clamps each channel into [0,1]; use when building LDR data from
// computations that may overshoot by rounding.
LdrImage make_ldr_clamped(int width, int height, std::vector<Rgb> pixels);

}  // namespace bitone
