#include "bitone/energy.hpp"

#include <cmath>
#include <string>

namespace bitone {

void MetricConfig::validate() const {
  fusion.validate();
  thresholds.validate();
  canny.validate();
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (!(weights.lambda1 >= 0.0) || !(weights.lambda2 >= 0.0))
    throw InputError("energy weights must be non-negative");
}

void to_json(nlohmann::json& j, const EnergyBreakdown& e) {
  j = nlohmann::json{{"e_c", e.e_c},
                     {"e_d", e.e_d},
                     {"e_f", e.e_f},
                     {"e_total", e.e_total},
                     {"lambda1", e.lambda1},
                     {"lambda2", e.lambda2},
                     {"n_pixels", e.n_pixels},
                     {"n_edge_pixels", e.n_edge_pixels},
                     {"excluded_edge_pixels", e.excluded_edge_pixels},
                     {"epsilon", e.epsilon}};
}

void from_json(const nlohmann::json& j, EnergyBreakdown& e) {
  j.at("e_c").get_to(e.e_c);
  j.at("e_d").get_to(e.e_d);
  j.at("e_f").get_to(e.e_f);
  j.at("e_total").get_to(e.e_total);
  j.at("lambda1").get_to(e.lambda1);
  j.at("lambda2").get_to(e.lambda2);
  j.at("n_pixels").get_to(e.n_pixels);
  j.at("n_edge_pixels").get_to(e.n_edge_pixels);
  j.at("excluded_edge_pixels").get_to(e.excluded_edge_pixels);
  j.at("epsilon").get_to(e.epsilon);
}

EnergyModel::EnergyModel(const LdrImage& contrast_ref,
                         const LdrImage& detail_ref, MetricConfig config,
                         std::shared_ptr<const FusibilityPredictor> predictor)
    : EnergyModel(contrast_ref, detail_ref, canny(detail_ref, config.canny),
                  config, std::move(predictor)) {}

EnergyModel::EnergyModel(const LdrImage& contrast_ref,
                         const LdrImage& detail_ref, EdgeMask edges,
                         MetricConfig config,
                         std::shared_ptr<const FusibilityPredictor> predictor)
    : config_(config),
      predictor_(std::move(predictor)),
      width_(contrast_ref.width()),
      height_(contrast_ref.height()),
      edges_(std::move(edges)) {
  config_.validate();
  if (!contrast_ref.same_shape(detail_ref))
    throw InputError("reference images differ in size");
  if (!edges_.same_shape(width_, height_))
    throw InputError("edge mask does not match the reference size");
  if (!predictor_)
    predictor_ = std::make_shared<ThresholdPredictor>(config_.thresholds);

  contrast_ = compute_features(contrast_ref, config_.fusion);
  detail_ = compute_features(detail_ref, config_.fusion);

  const double alpha = config_.fusion.alpha_degrees;
  const double eps = config_.epsilon;
  const std::size_t n = contrast_.brightness.size();
  fused_contrast_ref_.resize(n);
  brightness_norm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double bc = contrast_.brightness[i];
    const double bd = detail_.brightness[i];
    fused_contrast_ref_[i] = fuse_brightness(bc, bc, alpha);
    brightness_norm_[i] =
        std::abs(fused_contrast_ref_[i] - fuse_brightness(bd, bd, alpha)) + eps;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!edges_[i]) continue;
    ++n_edges_;
    const double cd = detail_.contrast[i];
    const double cc = contrast_.contrast[i];
    const double fused_d = fuse_contrast(cd, cd, config_.fusion);
    const double gap = fused_d - fuse_contrast(cc, cc, config_.fusion);
    if (gap > 0.0) edge_pixels_.push_back({i, fused_d, gap + eps});
  }
}

ViewFeatures EnergyModel::features(const LdrImage& view) const {
  if (view.width() != width_ || view.height() != height_)
    throw InputError("view is " + std::to_string(view.width()) + "x" +
                     std::to_string(view.height()) + ", references are " +
                     std::to_string(width_) + "x" + std::to_string(height_));
  return compute_features(view, config_.fusion);
}

void EnergyModel::check_shape(const ViewFeatures& v) const {
  if (!v.brightness.same_shape(width_, height_) ||
      !v.contrast.same_shape(width_, height_))
    throw InputError("view features do not match the reference size");
}

double EnergyModel::contrast_term(const ViewFeatures& left,
                                  const ViewFeatures& right) const {
  check_shape(left);
  check_shape(right);
  const double alpha = config_.fusion.alpha_degrees;
  const std::size_t n = fused_contrast_ref_.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double fused =
        fuse_brightness(left.brightness[i], right.brightness[i], alpha);
    sum += std::abs(fused_contrast_ref_[i] - fused) / brightness_norm_[i];
  }
  return sum / static_cast<double>(n);
}

double EnergyModel::detail_term(const ViewFeatures& left,
                                const ViewFeatures& right) const {
  check_shape(left);
  check_shape(right);
  if (edge_pixels_.empty()) return 0.0;
  double sum = 0.0;
  for (const EdgePixel& e : edge_pixels_) {
    const double fused =
        fuse_contrast(left.contrast[e.index], right.contrast[e.index],
                      config_.fusion);
    const double lost = e.fused_detail - fused;
    if (lost > 0.0) sum += lost / e.normaliser;
  }
  return sum / static_cast<double>(edge_pixels_.size());
}

double EnergyModel::fusibility_term(const ViewFeatures& left,
                                    const ViewFeatures& right) const {
  check_shape(left);
  check_shape(right);
  const FusibilityMap maps = predictor_->predict(left, right);
  if (!maps.contour.same_shape(width_, height_) ||
      !maps.region.same_shape(width_, height_))
    throw InputError("fusibility predictor returned maps of the wrong size");
  for (const auto* plane : {&maps.contour, &maps.region})
    for (double v : plane->values())
      if (!std::isfinite(v) || v < 0.0)
        throw NumericalError("fusibility predictor returned a ratio of " +
                             std::to_string(v));
  return fusibility_energy(maps);
}

EnergyBreakdown EnergyModel::evaluate(const ViewFeatures& left,
                                      const ViewFeatures& right,
                                      const EnergyWeights& weights) const {
  EnergyBreakdown e;
  e.e_c = contrast_term(left, right);
  e.e_d = detail_term(left, right);
  e.e_f = fusibility_term(left, right);
  e.lambda1 = weights.lambda1;
  e.lambda2 = weights.lambda2;
  e.e_total = e.recomputed_total();
  e.n_pixels = fused_contrast_ref_.size();
  e.n_edge_pixels = n_edges_;
  e.excluded_edge_pixels = n_edges_ - edge_pixels_.size();
  e.epsilon = config_.epsilon;
  if (!std::isfinite(e.e_c) || !std::isfinite(e.e_d) ||
      !std::isfinite(e.e_f) || !std::isfinite(e.e_total))
    throw NumericalError("non-finite energy (E_c=" + std::to_string(e.e_c) +
                         ", E_d=" + std::to_string(e.e_d) +
                         ", E_f=" + std::to_string(e.e_f) + ")");
  return e;
}

EnergyBreakdown EnergyModel::evaluate(const LdrImage& left,
                                      const LdrImage& right) const {
  return evaluate(features(left), features(right));
}

double EnergyModel::detail_swap_delta(const ViewFeatures& left,
                                      const ViewFeatures& right) const {
  return std::abs(detail_term(left, right) - detail_term(right, left));
}

double contrast_term(const LdrImage& left, const LdrImage& right,
                     const LdrImage& contrast_ref, const LdrImage& detail_ref,
                     const FusionParams& params, double epsilon) {
  MetricConfig cfg;
  cfg.fusion = params;
  cfg.epsilon = epsilon;
  // The edge set does not enter the contrast term.
  EnergyModel model(contrast_ref, detail_ref,
                    EdgeMask(contrast_ref.width(), contrast_ref.height(), 0),
                    cfg);
  return model.contrast_term(model.features(left), model.features(right));
}

double detail_term(const LdrImage& left, const LdrImage& right,
                   const LdrImage& contrast_ref, const LdrImage& detail_ref,
                   const EdgeMask& edges, const FusionParams& params,
                   double epsilon) {
  MetricConfig cfg;
  cfg.fusion = params;
  cfg.epsilon = epsilon;
  EnergyModel model(contrast_ref, detail_ref, edges, cfg);
  return model.detail_term(model.features(left), model.features(right));
}

EnergyBreakdown total_energy(const LdrImage& left, const LdrImage& right,
                             const LdrImage& contrast_ref,
                             const LdrImage& detail_ref,
                             const MetricConfig& config) {
  return EnergyModel(contrast_ref, detail_ref, config).evaluate(left, right);
}

}  // namespace bitone
