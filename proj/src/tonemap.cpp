#include "bitone/tonemap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bitone {

double ToneMapParams::sigma_space_for(int width, int height) const {
  if (sigma_space) return *sigma_space;
  return 0.02 * std::min(width, height);
}

void ToneMapParams::validate() const {
  if (!(beta >= kBetaMin && beta <= kBetaMax))
    throw InputError("beta " + std::to_string(beta) + " outside [1.5, 6.0]");
  if (sigma_space && !(*sigma_space > 0.0))
    throw InputError("sigma_space must be positive");
  if (!(sigma_range > 0.0)) throw InputError("sigma_range must be positive");
  if (!(gamma > 0.0)) throw InputError("gamma must be positive");
  if (!(fast.downsample_ratio > 0.0) || !(fast.range_spacing > 0.0))
    throw InputError("fast bilateral options must be positive");
}

LuminanceMap log_luminance(const HdrImage& img) {
  LuminanceMap out = luminance(img);
  for (double& v : out.values()) v = std::log10(std::max(v, kLuminanceFloor));
  return out;
}

BaseDetail decompose(const LuminanceMap& log_y, const ToneMapParams& params) {
  // Tiny images still need a usable spatial kernel.
  const double ss =
      std::max(0.5, params.sigma_space_for(log_y.width(), log_y.height()));
  BaseDetail out;
  out.base = params.exact_bilateral
                 ? bilateral_exact(log_y, ss, params.sigma_range)
                 : bilateral_fast(log_y, ss, params.sigma_range, params.fast);
  out.detail = LuminanceMap(log_y.width(), log_y.height());
  for (std::size_t i = 0; i < log_y.size(); ++i)
    out.detail[i] = log_y[i] - out.base[i];
  return out;
}

LuminanceMap compress_base(const LuminanceMap& base, double beta) {
  const auto [mn, mx] =
      std::minmax_element(base.values().begin(), base.values().end());
  const double hi = *mx;
  const double range = hi - *mn;
  const double scale = range > 0.0 ? std::log10(beta) / range : 1.0;
  LuminanceMap out(base.width(), base.height());
  for (std::size_t i = 0; i < base.size(); ++i)
    out[i] = (base[i] - hi) * scale;
  return out;
}

ToneMapper::ToneMapper(const HdrImage& img, const ToneMapParams& params)
    : img_(img), params_(params), luminance_(luminance(img)) {
  params_.validate();
  LuminanceMap log_y = luminance_;
  for (double& v : log_y.values()) v = std::log10(std::max(v, kLuminanceFloor));
  layers_ = decompose(log_y, params_);
}

LdrImage ToneMapper::apply(double beta) const {
  ToneMapParams p = params_;
  p.beta = beta;
  p.validate();
  const LuminanceMap compressed = compress_base(layers_.base, beta);
  const double inv_gamma = 1.0 / params_.gamma;
  std::vector<Rgb> px(img_.pixel_count());
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double y_out = std::pow(10.0, compressed[i] + layers_.detail[i]);
    const double ratio = y_out / std::max(luminance_[i], kLuminanceFloor);
    const Rgb& c = img_[i];
    auto encode = [&](double v) {
      return std::pow(std::clamp(v * ratio, 0.0, 1.0), inv_gamma);
    };
    px[i] = {encode(c.r), encode(c.g), encode(c.b)};
  }
  return LdrImage(img_.width(), img_.height(), std::move(px));
}

LdrImage tonemap(const HdrImage& img, const ToneMapParams& params) {
  return ToneMapper(img, params).apply(params.beta);
}

References make_references(const HdrImage& img, const ToneMapParams& params) {
  return make_references(ToneMapper(img, params));
}

References make_references(const ToneMapper& mapper) {
  return {mapper.apply(kContrastReferenceBeta),
          mapper.apply(kDetailReferenceBeta)};
}

}  // namespace bitone
