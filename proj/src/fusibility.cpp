#include "bitone/fusibility.hpp"

#include <algorithm>
#include <cmath>

namespace bitone {

void FusibilityThresholds::validate() const {
  if (!(theta_cf > 0.0) || !(theta_rf > 0.0))
    throw InputError("fusibility thresholds must be positive");
  if (!(epsilon > 0.0)) throw InputError("fusibility epsilon must be positive");
}

ThresholdPredictor::ThresholdPredictor(FusibilityThresholds thresholds)
    : thresholds_(thresholds) {
  thresholds_.validate();
}

FusibilityMap ThresholdPredictor::predict(const ViewFeatures& left,
                                          const ViewFeatures& right) const {
  if (!left.brightness.same_shape(right.brightness))
    throw InputError("fusibility: view sizes differ");
  const int w = left.width();
  const int h = left.height();
  FusibilityMap out{Plane<double>(w, h), Plane<double>(w, h)};
  const auto& t = thresholds_;
  for (std::size_t i = 0; i < out.contour.size(); ++i) {
    const double cl = left.contrast[i];
    const double cr = right.contrast[i];
    out.contour[i] =
        std::abs(cl - cr) / (t.theta_cf * std::max(cl, cr) + t.epsilon);
    out.region[i] =
        std::abs(left.brightness[i] - right.brightness[i]) / t.theta_rf;
  }
  return out;
}

FusibilityMap fusibility_maps(const LdrImage& left, const LdrImage& right,
                              const FusibilityThresholds& thresholds,
                              const FusionParams& fusion) {
  if (!left.same_shape(right)) throw InputError("fusibility: view sizes differ");
  return ThresholdPredictor(thresholds).predict(compute_features(left, fusion),
                                                compute_features(right, fusion));
}

double fusibility_energy(const FusibilityMap& maps) {
  const std::size_t n = maps.contour.size();
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    sum += soft_excess(maps.contour[i]) + soft_excess(maps.region[i]);
  return sum / static_cast<double>(n);
}

}  // namespace bitone
