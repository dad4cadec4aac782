#include "bitone/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <string>

namespace bitone {

void OptimizerConfig::validate() const {
  if (!(beta_min >= kBetaMin && beta_max <= kBetaMax && beta_min < beta_max))
    throw InputError("beta bounds must satisfy 1.5 <= min < max <= 6.0");
  if (!(fd_step > 0.0 && fd_step < beta_max - beta_min))
    throw InputError("fd_step must be positive and below the bound width");
  if (!(step_size > 0.0)) throw InputError("step_size must be positive");
  if (max_halvings < 0) throw InputError("max_halvings must be >= 0");
  if (!(tol > 0.0)) throw InputError("tol must be positive");
  if (max_iters_stage1 < 1 || max_iters_stage2 < 1)
    throw InputError("iteration limits must be >= 1");
  for (double b : {init.left, init.right})
    if (!(b >= beta_min && b <= beta_max))
      throw InputError("initial beta outside the bounds");
}

PairEvaluator::PairEvaluator(const HdrImage& img, const ToneMapParams& tonemap,
                             const MetricConfig& metric,
                             std::shared_ptr<const FusibilityPredictor> predictor,
                             std::size_t cache_capacity)
    : mapper_(img, tonemap),
      refs_(make_references(mapper_)),
      model_(refs_.contrast, refs_.detail, metric, std::move(predictor)),
      capacity_(std::max<std::size_t>(cache_capacity, 2)) {}

std::shared_ptr<const ViewFeatures> PairEvaluator::features(double beta) const {
  if (auto it = cache_.find(beta); it != cache_.end()) return it->second;
  auto f = std::make_shared<const ViewFeatures>(
      compute_features(mapper_.apply(beta), model_.config().fusion));
  if (cache_.size() >= capacity_) {
    cache_.erase(insertion_order_.front());
    insertion_order_.erase(insertion_order_.begin());
  }
  cache_.emplace(beta, f);
  insertion_order_.push_back(beta);
  return f;
}

EnergyBreakdown PairEvaluator::energy(const BetaPair& b,
                                      const EnergyWeights& w) const {
  const auto left = features(b.left);
  const auto right = features(b.right);
  return model_.evaluate(*left, *right, w);
}

double PairEvaluator::time_full_evaluation(const BetaPair& b) const {
  const auto start = std::chrono::steady_clock::now();
  const ViewFeatures left =
      compute_features(mapper_.apply(b.left), model_.config().fusion);
  const ViewFeatures right =
      compute_features(mapper_.apply(b.right), model_.config().fusion);
  const EnergyBreakdown e = model_.evaluate(left, right);
  const auto stop = std::chrono::steady_clock::now();
  (void)e;
  return std::chrono::duration<double>(stop - start).count();
}

void to_json(nlohmann::json& j, const TrajectoryStep& s) {
  j = nlohmann::json{{"iteration", s.iteration},
                     {"stage", s.stage},
                     {"beta_l", s.beta.left},
                     {"beta_r", s.beta.right},
                     {"objective", s.objective},
                     {"step", s.step},
                     {"energy", s.energy}};
}

void from_json(const nlohmann::json& j, TrajectoryStep& s) {
  j.at("iteration").get_to(s.iteration);
  j.at("stage").get_to(s.stage);
  j.at("beta_l").get_to(s.beta.left);
  j.at("beta_r").get_to(s.beta.right);
  j.at("objective").get_to(s.objective);
  j.at("step").get_to(s.step);
  j.at("energy").get_to(s.energy);
}

namespace {

struct StageOutcome {
  BetaPair beta;
  int iterations = 0;
  bool converged = false;
};

class Descent {
 public:
  Descent(const PairEvaluator& ev, const OptimizerConfig& cfg,
          std::vector<TrajectoryStep>& trajectory)
      : ev_(ev), cfg_(cfg), trajectory_(trajectory) {}

  StageOutcome run(int stage, BetaPair start, const EnergyWeights& weights,
                   int max_iters) {
    StageOutcome out{start, 0, false};
    double current = objective(out.beta, weights);
    for (int it = 1; it <= max_iters; ++it) {
      out.iterations = it;
      const auto [gl, gr] = projected_gradient(out.beta, weights, current);
      if (std::max(std::abs(gl), std::abs(gr)) < cfg_.tol) {
        out.converged = true;
        break;
      }
      // The step length is in beta units along the unit descent direction.
      const double norm = std::hypot(gl, gr);
      const double dl = -gl / norm;
      const double dr = -gr / norm;
      double step = cfg_.step_size;
      bool accepted = false;
      BetaPair cand;
      double cand_value = current;
      for (int k = 0; k <= cfg_.max_halvings; ++k, step *= 0.5) {
        cand = {clamp(out.beta.left + step * dl),
                clamp(out.beta.right + step * dr)};
        if (cand == out.beta) break;
        cand_value = objective(cand, weights);
        if (cand_value < current) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        // No decrease at any step length along the projected gradient.
        out.converged = true;
        break;
      }
      const double decrease = current - cand_value;
      const double moved = std::hypot(cand.left - out.beta.left,
                                      cand.right - out.beta.right);
      out.beta = cand;
      current = cand_value;
      record(stage, out.beta, current, moved);
      if (decrease < cfg_.tol) {
        out.converged = true;
        break;
      }
    }
    return out;
  }

  void record(int stage, const BetaPair& b, double objective_value,
              double step) {
    TrajectoryStep s;
    s.iteration = static_cast<int>(trajectory_.size());
    s.stage = stage;
    s.beta = b;
    s.energy = ev_.energy(b, cfg_.weights);
    s.objective = objective_value;
    s.step = step;
    trajectory_.push_back(s);
  }

  double objective(const BetaPair& b, const EnergyWeights& w) const {
    return ev_.energy(b, w).e_total;
  }

 private:
  double clamp(double b) const {
    return std::clamp(b, cfg_.beta_min, cfg_.beta_max);
  }

  // Central differences inside the box, one-sided at a bound. Components
  // that point out of the box at an active bound are zeroed.
  std::pair<double, double> projected_gradient(const BetaPair& b,
                                               const EnergyWeights& w,
                                               double at_b) const {
    auto partial = [&](bool left) {
      const double x = left ? b.left : b.right;
      const double h = cfg_.fd_step;
      const double hi = std::min(x + h, cfg_.beta_max);
      const double lo = std::max(x - h, cfg_.beta_min);
      auto eval = [&](double v) {
        if (v == x) return at_b;
        BetaPair p = b;
        (left ? p.left : p.right) = v;
        return objective(p, w);
      };
      double g = (eval(hi) - eval(lo)) / (hi - lo);
      if (x <= cfg_.beta_min && g > 0.0) g = 0.0;
      if (x >= cfg_.beta_max && g < 0.0) g = 0.0;
      return g;
    };
    return {partial(true), partial(false)};
  }

  const PairEvaluator& ev_;
  const OptimizerConfig& cfg_;
  std::vector<TrajectoryStep>& trajectory_;
};

}  // namespace

OptimizationResult optimize(const PairEvaluator& evaluator,
                            const OptimizerConfig& config) {
  config.validate();
  OptimizationResult result;
  Descent descent(evaluator, config, result.trajectory);

  const EnergyWeights stage1_weights{0.0, config.weights.lambda2};
  descent.record(1, config.init, descent.objective(config.init, stage1_weights),
                 0.0);
  const StageOutcome s1 = descent.run(1, config.init, stage1_weights,
                                      config.max_iters_stage1);
  const StageOutcome s2 =
      descent.run(2, s1.beta, config.weights, config.max_iters_stage2);

  result.stage1_iterations = s1.iterations;
  result.stage2_iterations = s2.iterations;
  result.iterations_used = s1.iterations + s2.iterations;
  result.converged = s2.converged;

  // Best full-weight energy seen on the accepted path.
  const TrajectoryStep* best = &result.trajectory.front();
  for (const TrajectoryStep& s : result.trajectory)
    if (s.energy.e_total < best->energy.e_total) best = &s;
  result.best_beta = best->beta;
  result.best_energy = best->energy;
  result.best_pair = {evaluator.view(best->beta.left),
                      evaluator.view(best->beta.right), best->beta.left,
                      best->beta.right};
  result.seconds_per_iteration = evaluator.time_full_evaluation(best->beta);
  return result;
}

OptimizationResult optimize(const HdrImage& img, const OptimizerConfig& config,
                            const ToneMapParams& tonemap,
                            const MetricConfig& metric) {
  MetricConfig m = metric;
  m.weights = config.weights;
  const PairEvaluator evaluator(img, tonemap, m);
  return optimize(evaluator, config);
}

BinocularPair order_views(const BinocularPair& pair) {
  if (pair.beta_right < pair.beta_left)
    return {pair.right, pair.left, pair.beta_right, pair.beta_left};
  return pair;
}

void write_trajectory_jsonl(const std::vector<TrajectoryStep>& steps,
                            std::ostream& out) {
  for (const TrajectoryStep& s : steps) out << nlohmann::json(s).dump() << '\n';
}

}  // namespace bitone
