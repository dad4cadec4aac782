#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bitone/energy.hpp"
#include "bitone/image.hpp"
#include "bitone/tonemap.hpp"

namespace bitone {

struct BetaPair {
  double left = 3.75;
  double right = 3.75;

  friend bool operator==(const BetaPair&, const BetaPair&) = default;
  friend auto operator<=>(const BetaPair&, const BetaPair&) = default;
};

struct OptimizerConfig {
  double beta_min = kBetaMin;
  double beta_max = kBetaMax;
  BetaPair init{3.75, 3.75};
  double fd_step = 0.05;
  double step_size = 0.5;
  int max_halvings = 8;
  double tol = 1e-4;
  int max_iters_stage1 = 15;
  int max_iters_stage2 = 45;
  EnergyWeights weights;

  void validate() const;
};

// Energy of (beta_L, beta_R) candidates for one image. The base/detail
// decomposition, the references and the edge set are built once; per-view
// features are cached by beta (bounded, first-in first-out).
class PairEvaluator {
 public:
  PairEvaluator(const HdrImage& img, const ToneMapParams& tonemap,
                const MetricConfig& metric,
                std::shared_ptr<const FusibilityPredictor> predictor = nullptr,
                std::size_t cache_capacity = 96);

  LdrImage view(double beta) const { return mapper_.apply(beta); }
  std::shared_ptr<const ViewFeatures> features(double beta) const;
  EnergyBreakdown energy(const BetaPair& b, const EnergyWeights& w) const;
  EnergyBreakdown energy(const BetaPair& b) const {
    return energy(b, model_.config().weights);
  }

  // Wall-clock seconds for one uncached evaluation: tone-map both views,
  // extract their features and compute the full energy.
  double time_full_evaluation(const BetaPair& b) const;

  const EnergyModel& model() const { return model_; }
  const ToneMapper& mapper() const { return mapper_; }
  const References& references() const { return refs_; }

 private:
  ToneMapper mapper_;
  References refs_;
  EnergyModel model_;
  std::size_t capacity_;
  mutable std::map<double, std::shared_ptr<const ViewFeatures>> cache_;
  mutable std::vector<double> insertion_order_;
};

struct TrajectoryStep {
  int iteration = 0;  // 0 is the starting point
  int stage = 1;
  BetaPair beta;
  EnergyBreakdown energy;  // full-weight energy at beta
  double objective = 0.0;  // the stage objective that was minimised
  double step = 0.0;       // accepted step length (0 for the start point)
};

void to_json(nlohmann::json& j, const TrajectoryStep& s);
void from_json(const nlohmann::json& j, TrajectoryStep& s);

struct OptimizationResult {
  BinocularPair best_pair;
  BetaPair best_beta;
  EnergyBreakdown best_energy;
  std::vector<TrajectoryStep> trajectory;
  int iterations_used = 0;
  int stage1_iterations = 0;
  int stage2_iterations = 0;
  bool converged = false;
  double seconds_per_iteration = 0.0;
};

// Two-stage descent on (beta_L, beta_R): stage 1 minimises E_c + l2*E_f from
// config.init, stage 2 the full energy from the stage 1 optimum. Gradients
// are central finite differences (one-sided at a bound); steps are clamped to
// the box and backtracked by halving.
OptimizationResult optimize(const PairEvaluator& evaluator,
                            const OptimizerConfig& config = {});
OptimizationResult optimize(const HdrImage& img,
                            const OptimizerConfig& config = {},
                            const ToneMapParams& tonemap = {},
                            const MetricConfig& metric = {});

// Puts the lower-beta (more detailed) view on the left; ties keep the order.
BinocularPair order_views(const BinocularPair& pair);

void write_trajectory_jsonl(const std::vector<TrajectoryStep>& steps,
                            std::ostream& out);

}  // namespace bitone
