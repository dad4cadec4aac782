#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <json.hpp>

#include "bitone/edges.hpp"
#include "bitone/fusibility.hpp"
#include "bitone/image.hpp"
#include "bitone/perception.hpp"

namespace bitone {

struct EnergyWeights {
  double lambda1 = 1.25;  // detail term
  double lambda2 = 10.0;  // fusibility term
};

struct MetricConfig {
  FusionParams fusion;
  FusibilityThresholds thresholds;
  CannyParams canny;
  EnergyWeights weights;
  // Denominator guard in the contrast and detail terms.
  double epsilon = 1e-6;

  void validate() const;
};

struct EnergyBreakdown {
  double e_c = 0.0;
  double e_d = 0.0;
  double e_f = 0.0;
  double e_total = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::size_t n_pixels = 0;
  // Size of the edge set of the detail reference.
  std::size_t n_edge_pixels = 0;
  // Edge pixels where the contrast reference already matches the detail
  // reference's fused contrast; their normalisation is undefined, so they
  // are left out of the detail average.
  std::size_t excluded_edge_pixels = 0;
  double epsilon = 0.0;

  double recomputed_total() const { return e_c + lambda1 * e_d + lambda2 * e_f; }

  friend bool operator==(const EnergyBreakdown&, const EnergyBreakdown&) = default;
};

void to_json(nlohmann::json& j, const EnergyBreakdown& e);
void from_json(const nlohmann::json& j, EnergyBreakdown& e);

// Holds everything about the two reference images that does not depend on
// the candidate pair: their brightness and contrast features, the edge set of
// the detail reference and the per-pixel normalisers.
class EnergyModel {
 public:
  EnergyModel(const LdrImage& contrast_ref, const LdrImage& detail_ref,
              MetricConfig config = {},
              std::shared_ptr<const FusibilityPredictor> predictor = nullptr);
  // Uses a caller-supplied edge set instead of running Canny on detail_ref.
  EnergyModel(const LdrImage& contrast_ref, const LdrImage& detail_ref,
              EdgeMask edges, MetricConfig config = {},
              std::shared_ptr<const FusibilityPredictor> predictor = nullptr);

  ViewFeatures features(const LdrImage& view) const;

  double contrast_term(const ViewFeatures& left, const ViewFeatures& right) const;
  // Returns 0 when no usable edge pixel exists.
  double detail_term(const ViewFeatures& left, const ViewFeatures& right) const;
  double fusibility_term(const ViewFeatures& left,
                         const ViewFeatures& right) const;

  // Throws NumericalError if any term is non-finite.
  EnergyBreakdown evaluate(const ViewFeatures& left, const ViewFeatures& right,
                           const EnergyWeights& weights) const;
  EnergyBreakdown evaluate(const ViewFeatures& left,
                           const ViewFeatures& right) const {
    return evaluate(left, right, config_.weights);
  }
  EnergyBreakdown evaluate(const LdrImage& left, const LdrImage& right) const;

  // |E_d(L,R) - E_d(R,L)|; the contrast combination is not symmetric.
  double detail_swap_delta(const ViewFeatures& left,
                           const ViewFeatures& right) const;

  const EdgeMask& edges() const { return edges_; }
  std::size_t usable_edge_pixels() const { return edge_pixels_.size(); }
  // True when the detail term is identically 0 for lack of edge pixels.
  bool detail_degenerate() const { return edge_pixels_.empty(); }
  const MetricConfig& config() const { return config_; }
  const ViewFeatures& contrast_features() const { return contrast_; }
  const ViewFeatures& detail_features() const { return detail_; }

 private:
  struct EdgePixel {
    std::size_t index;
    double fused_detail;  // c_{I_D,I_D}
    double normaliser;    // H(c_{I_D,I_D} - c_{I_C,I_C}) + eps
  };

  void check_shape(const ViewFeatures& v) const;

  MetricConfig config_;
  std::shared_ptr<const FusibilityPredictor> predictor_;
  int width_;
  int height_;
  ViewFeatures contrast_;
  ViewFeatures detail_;
  EdgeMask edges_;
  std::size_t n_edges_ = 0;
  std::vector<double> fused_contrast_ref_;  // b_{I_C,I_C}
  std::vector<double> brightness_norm_;     // |b_CC - b_DD| + eps
  std::vector<EdgePixel> edge_pixels_;
};

// Free-standing forms of the three terms; each builds the reference state.
double contrast_term(const LdrImage& left, const LdrImage& right,
                     const LdrImage& contrast_ref, const LdrImage& detail_ref,
                     const FusionParams& params = {}, double epsilon = 1e-6);
double detail_term(const LdrImage& left, const LdrImage& right,
                   const LdrImage& contrast_ref, const LdrImage& detail_ref,
                   const EdgeMask& edges, const FusionParams& params = {},
                   double epsilon = 1e-6);
EnergyBreakdown total_energy(const LdrImage& left, const LdrImage& right,
                             const LdrImage& contrast_ref,
                             const LdrImage& detail_ref,
                             const MetricConfig& config = {});

}  // namespace bitone
