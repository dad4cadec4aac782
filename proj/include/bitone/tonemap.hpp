#pragma once

#include <optional>

#include "bitone/bilateral.hpp"
#include "bitone/image.hpp"

namespace bitone {

inline constexpr double kBetaMin = 1.5;
inline constexpr double kBetaMax = 6.0;
inline constexpr double kContrastReferenceBeta = 6.0;
inline constexpr double kDetailReferenceBeta = 1.5;
inline constexpr double kLuminanceFloor = 1e-6;

struct ToneMapParams {
  // Target log10 range of the compressed base layer is log10(beta).
  double beta = 3.75;
  // Spatial std in pixels; unset means 2% of min(width, height).
  std::optional<double> sigma_space;
  // Range std in log10 luminance.
  double sigma_range = 0.4;
  double gamma = 2.2;
  bool exact_bilateral = false;
  FastBilateralOptions fast;

  double sigma_space_for(int width, int height) const;
  // Throws InputError when a field is outside its valid range.
  void validate() const;
};

struct BaseDetail {
  LuminanceMap base;
  LuminanceMap detail;
};

// log10(max(Y, kLuminanceFloor)) of the linear luminance.
LuminanceMap log_luminance(const HdrImage& img);

// Splits log luminance into a bilateral-filtered base and the residual.
BaseDetail decompose(const LuminanceMap& log_y, const ToneMapParams& params);

// Rescales the base so its range becomes log10(beta), anchored at the
// maximum (maps to 0). A flat base gets scale 1.
LuminanceMap compress_base(const LuminanceMap& base, double beta);

// Decomposition is independent of beta; callers that tone-map one image at
// many betas build this once.
class ToneMapper {
 public:
  ToneMapper(const HdrImage& img, const ToneMapParams& params);

  LdrImage apply(double beta) const;
  const BaseDetail& layers() const { return layers_; }
  const ToneMapParams& params() const { return params_; }

 private:
  HdrImage img_;
  ToneMapParams params_;
  LuminanceMap luminance_;
  BaseDetail layers_;
};

LdrImage tonemap(const HdrImage& img, const ToneMapParams& params);

struct References {
  LdrImage contrast;  // beta = 6.0
  LdrImage detail;    // beta = 1.5
};

References make_references(const HdrImage& img,
                           const ToneMapParams& params = {});
References make_references(const ToneMapper& mapper);

}  // namespace bitone
