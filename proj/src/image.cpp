#include "bitone/image.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

namespace bitone {

template <typename Tag>
void RgbImage<Tag>::validate() const {
  if (width_ < 1 || height_ < 1)
    throw InputError("image dimensions must be positive");
  if (pixels_.size() !=
      static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_))
    throw InputError("pixel count does not match width x height");
  for (const Rgb& p : pixels_) {
    for (double c : {p.r, p.g, p.b}) {
      if (!std::isfinite(c) || c < 0.0)
        throw InputError("channel value must be finite and non-negative");
      if constexpr (std::is_same_v<Tag, detail::LdrTag>) {
        if (c > 1.0) throw InputError("LDR channel value exceeds 1");
      }
    }
  }
}

template class RgbImage<detail::HdrTag>;
template class RgbImage<detail::LdrTag>;

LdrImage make_ldr_clamped(int width, int height, std::vector<Rgb> pixels) {
  for (Rgb& p : pixels) {
    p.r = std::clamp(p.r, 0.0, 1.0);
    p.g = std::clamp(p.g, 0.0, 1.0);
    p.b = std::clamp(p.b, 0.0, 1.0);
  }
  return LdrImage(width, height, std::move(pixels));
}

}  // namespace bitone
