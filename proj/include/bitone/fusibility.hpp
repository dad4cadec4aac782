#pragma once

#include <memory>

#include "bitone/image.hpp"
#include "bitone/perception.hpp"

namespace bitone {

struct FusibilityThresholds {
  // Largest comfortable |cL - cR| as a fraction of max(cL, cR).
  double theta_cf = 0.8;
  // Largest comfortable |bL - bR| in normalised display luminance.
  double theta_rf = 0.6;
  double epsilon = 1e-6;

  void validate() const;
};

// Per-pixel discomfort ratios; a value above 1 predicts failed fusion.
struct FusibilityMap {
  Plane<double> contour;  // B_cf
  Plane<double> region;   // B_rf
};

// Pluggable binocular comfort predictor. Implementations must return ratios
// normalised so that 1.0 is the comfort boundary.
class FusibilityPredictor {
 public:
  virtual ~FusibilityPredictor() = default;
  virtual FusibilityMap predict(const ViewFeatures& left,
                                const ViewFeatures& right) const = 0;
};

// B_cf = |cL - cR| / (theta_cf * max(cL, cR) + eps)
// B_rf = |bL - bR| / theta_rf
class ThresholdPredictor final : public FusibilityPredictor {
 public:
  explicit ThresholdPredictor(FusibilityThresholds thresholds = {});
  FusibilityMap predict(const ViewFeatures& left,
                        const ViewFeatures& right) const override;
  const FusibilityThresholds& thresholds() const { return thresholds_; }

 private:
  FusibilityThresholds thresholds_;
};

FusibilityMap fusibility_maps(const LdrImage& left, const LdrImage& right,
                              const FusibilityThresholds& thresholds = {},
                              const FusionParams& fusion = {});

// max(x - 1, 0)
inline double soft_excess(double x) { return x > 1.0 ? x - 1.0 : 0.0; }

// Mean over pixels of soft_excess(B_cf) + soft_excess(B_rf).
double fusibility_energy(const FusibilityMap& maps);

}  // namespace bitone
