#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "wifidist/eval.hpp"
#include "wifidist/learners.hpp"
#include "wifidist/rng.hpp"

namespace wifidist {

/// Random-search sampling ranges per learner kind. Integers are drawn
/// uniformly; ridge lambda and the boosting learning rate log-uniformly.
struct HyperSpace {
  double ridge_lambda_min = 1e-6;
  double ridge_lambda_max = 1e3;
  int knn_k_min = 1;
  int knn_k_max = 50;
  int cart_depth_min = 2;
  int cart_depth_max = 30;
  int cart_msl_min = 1;
  int cart_msl_max = 100;
  int gbt_trees_min = 50;
  int gbt_trees_max = 500;
  double gbt_lr_min = 0.01;
  double gbt_lr_max = 0.3;
  int gbt_depth_min = 2;
  int gbt_depth_max = 8;
  int n_draws = 20;
  std::uint64_t seed = 1;

  void validate() const;
  Hyperparams sample(LearnerKind kind, Rng& rng) const;
};

struct Trial {
  Hyperparams hyper;
  double score = 0.0;  // validation F_beta
};

struct RandomSearchResult {
  TrainedModel model;
  double score = 0.0;
  std::size_t best_draw = 0;
  std::vector<Trial> trials;  // in draw order
};

/// Fits one model per sampled configuration on `train` (label-filtered at
/// train_filter_m), scores F_beta on `validation`, and returns the argmax.
/// Ties keep the first sampled configuration. Draw t uses an RNG substream
/// derived from (seed, t), so results do not depend on evaluation order.
RandomSearchResult random_search(
    LearnerKind kind, const HyperSpace& space,
    const std::vector<PairRecord>& train,
    const std::vector<PairRecord>& validation, const FeatureMask& mask,
    const EvalConfig& eval_cfg,
    double train_filter_m = std::numeric_limits<double>::infinity());

}  // namespace wifidist
