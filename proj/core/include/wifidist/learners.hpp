#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wifidist/linalg.hpp"
#include "wifidist/types.hpp"

namespace wifidist {

enum class LearnerKind { Ols, Ridge, Knn, Cart, Gbt };

std::string_view to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(std::string_view name);

using Hyperparams = std::map<std::string, double>;

/// Defaults used when a hyperparameter is not supplied.
Hyperparams default_hyper(LearnerKind kind);

/// Per-column zero-mean / unit-variance transform, fitted on training data
/// only. Zero-variance columns keep scale 1 so they map to constant zero.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& x);
  void transform_row(std::span<double> row) const;
  Matrix transform(const Matrix& x) const;
};

/// Linear predictor over standardized features (used by both the
/// least-squares and the ridge fit).
struct LinearModel {
  Standardizer standardizer;
  std::vector<double> weights;  // one per standardized column
  double intercept = 0.0;
  bool min_norm_fallback = false;  // rank-deficient design, minimum-norm solve

  double predict_row(std::span<const double> row) const;
  std::vector<double> predict(const Matrix& x) const;

  /// Weights and intercept mapped back to the raw (unstandardized) feature
  /// space, so y ~ w_raw . x + b_raw.
  std::pair<std::vector<double>, double> effective_coefficients() const;
};

/// Ordinary least squares with intercept, solved by Householder QR.
LinearModel fit_ols(const Matrix& x, std::span<const double> y);

/// Ridge with unpenalized intercept: min ||y - Xw - b||^2 + lambda ||w||^2,
/// solved by QR on the sqrt(lambda)-augmented design.
LinearModel fit_ridge(const Matrix& x, std::span<const double> y,
                      double lambda);

/// Brute-force k-nearest-neighbor regressor over standardized features.
/// Ties in distance are broken toward the lower training-row index; k is
/// clamped to [1, n].
struct KnnModel {
  Standardizer standardizer;
  int k = 5;
  bool inverse_distance = false;
  Matrix train_x;  // standardized
  std::vector<double> train_y;

  double predict_row(std::span<const double> row) const;
  std::vector<double> predict(const Matrix& x) const;
};

KnnModel fit_knn(const Matrix& x, std::span<const double> y, int k,
                 bool inverse_distance);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  double value = 0.0;  // mean of the node's training targets
  int left = -1;
  int right = -1;
  double gain = 0.0;  // SSE reduction achieved by this split
};

/// Greedy variance-reduction regression tree. Split rule: x[feature] <=
/// threshold goes left; ties in split gain break toward the lowest feature
/// index, then the lowest threshold.
struct CartModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict_row(std::span<const double> row) const;
  std::vector<double> predict(const Matrix& x) const;
};

CartModel fit_cart(const Matrix& x, std::span<const double> y, int max_depth,
                   int min_samples_leaf);

/// Total SSE reduction credited to each feature, normalized to sum 1
/// (all zeros for a stump-less tree).
std::vector<double> cart_feature_importance(const CartModel& tree,
                                            std::size_t n_features);

/// Squared-loss gradient boosting over regression trees:
/// F_0 = mean(y), F_t = F_{t-1} + learning_rate * tree_t(residuals).
struct GbtModel {
  double base = 0.0;
  double learning_rate = 0.1;
  std::vector<CartModel> trees;

  double predict_row(std::span<const double> row) const;
  std::vector<double> predict(const Matrix& x) const;
};

/// train_mse_out, when given, receives the training MSE after every
/// boosting iteration (non-increasing).
GbtModel fit_gbt(const Matrix& x, std::span<const double> y, int n_trees,
                 double learning_rate, int depth,
                 std::vector<double>* train_mse_out = nullptr);

/// Extracts the masked feature columns of `pairs` as a dense matrix,
/// canonical column order preserved. Labels are untouched by masking.
Matrix apply_mask(const std::vector<PairRecord>& pairs,
                  const FeatureMask& mask);

std::vector<double> labels(const std::vector<PairRecord>& pairs);

/// A fitted learner plus everything needed to reproduce its predictions:
/// feature mask, hyperparameters and the training filter it was built with.
struct TrainedModel {
  LearnerKind kind = LearnerKind::Ols;
  FeatureMask mask = FeatureMask::all_on();
  Hyperparams hyper;
  double train_filter_m = 0.0;  // +inf when trained unfiltered
  double train_time_s = 0.0;
  std::variant<LinearModel, KnnModel, CartModel, GbtModel> impl;

  /// Predicts from a full 14-feature row; the mask is applied internally.
  double predict(std::span<const double> features) const;
  std::vector<double> predict_pairs(const std::vector<PairRecord>& pairs) const;

  /// All learners here are deterministic at prediction time.
  bool stochastic() const { return false; }
};

/// Filters `train` by label <= train_filter_m, applies the mask and fits the
/// requested learner. Missing hyperparameters fall back to default_hyper.
TrainedModel train_model(LearnerKind kind, const std::vector<PairRecord>& train,
                         const FeatureMask& mask, const Hyperparams& hyper,
                         double train_filter_m);

}  // namespace wifidist
