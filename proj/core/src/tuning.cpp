#include "wifidist/tuning.hpp"

namespace wifidist {

void HyperSpace::validate() const {
  if (n_draws < 1) throw InvalidConfig("random search needs n_draws >= 1");
  if (!(ridge_lambda_min > 0.0) || ridge_lambda_max < ridge_lambda_min)
    throw InvalidConfig("bad ridge lambda range");
  if (knn_k_min < 1 || knn_k_max < knn_k_min)
    throw InvalidConfig("bad knn k range");
  if (cart_depth_max < cart_depth_min || cart_msl_max < cart_msl_min ||
      cart_msl_min < 1)
    throw InvalidConfig("bad cart range");
  if (gbt_trees_min < 1 || gbt_trees_max < gbt_trees_min ||
      gbt_depth_max < gbt_depth_min || !(gbt_lr_min > 0.0) ||
      gbt_lr_max < gbt_lr_min || gbt_lr_max > 1.0)
    throw InvalidConfig("bad gbt range");
}

Hyperparams HyperSpace::sample(LearnerKind kind, Rng& rng) const {
  // Draw order per kind is fixed; it is part of the reproducibility contract.
  switch (kind) {
    case LearnerKind::Ols:
      return {};
    case LearnerKind::Ridge:
      return {{"lambda", rng.log_uniform(ridge_lambda_min, ridge_lambda_max)}};
    case LearnerKind::Knn: {
      const int k = rng.uniform_int(knn_k_min, knn_k_max);
      const bool inv = rng.bernoulli(0.5);
      return {{"k", static_cast<double>(k)},
              {"inverse_distance", inv ? 1.0 : 0.0}};
    }
    case LearnerKind::Cart: {
      const int depth = rng.uniform_int(cart_depth_min, cart_depth_max);
      const int msl = rng.uniform_int(cart_msl_min, cart_msl_max);
      return {{"max_depth", static_cast<double>(depth)},
              {"min_samples_leaf", static_cast<double>(msl)}};
    }
    case LearnerKind::Gbt: {
      const int trees = rng.uniform_int(gbt_trees_min, gbt_trees_max);
      const double lr = rng.log_uniform(gbt_lr_min, gbt_lr_max);
      const int depth = rng.uniform_int(gbt_depth_min, gbt_depth_max);
      return {{"n_trees", static_cast<double>(trees)},
              {"learning_rate", lr},
              {"depth", static_cast<double>(depth)}};
    }
  }
  return {};
}

RandomSearchResult random_search(LearnerKind kind, const HyperSpace& space,
                                 const std::vector<PairRecord>& train,
                                 const std::vector<PairRecord>& validation,
                                 const FeatureMask& mask,
                                 const EvalConfig& eval_cfg,
                                 double train_filter_m) {
  space.validate();
  if (validation.empty())
    throw EmptyEvalSet("random search needs a non-empty validation set");

  const Rng master(space.seed);
  RandomSearchResult result;
  bool have_best = false;

  for (int t = 0; t < space.n_draws; ++t) {
    Rng draw_rng = master.spawn(static_cast<std::uint64_t>(t));
    Hyperparams hyper = space.sample(kind, draw_rng);
    TrainedModel model = train_model(kind, train, mask, hyper, train_filter_m);
    const EvalReport report = evaluate(model, validation, eval_cfg);
    result.trials.push_back({hyper, report.f_beta_mean});
    if (!have_best || report.f_beta_mean > result.score) {
      have_best = true;
      result.score = report.f_beta_mean;
      result.best_draw = static_cast<std::size_t>(t);
      result.model = std::move(model);
    }
  }
  return result;
}

}  // namespace wifidist
