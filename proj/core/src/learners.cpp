#include "wifidist/learners.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "wifidist/pairing.hpp"

namespace wifidist {

std::string_view to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::Ols: return "ols";
    case LearnerKind::Ridge: return "ridge";
    case LearnerKind::Knn: return "knn";
    case LearnerKind::Cart: return "cart";
    case LearnerKind::Gbt: return "gbt";
  }
  return "ols";
}

LearnerKind learner_kind_from_string(std::string_view name) {
  if (name == "ols") return LearnerKind::Ols;
  if (name == "ridge") return LearnerKind::Ridge;
  if (name == "knn") return LearnerKind::Knn;
  if (name == "cart") return LearnerKind::Cart;
  if (name == "gbt") return LearnerKind::Gbt;
  throw InvalidConfig("unknown learner \"" + std::string(name) +
                      "\" (expected ols|ridge|knn|cart|gbt)");
}

Hyperparams default_hyper(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::Ols: return {};
    case LearnerKind::Ridge: return {{"lambda", 1.0}};
    case LearnerKind::Knn: return {{"k", 5}, {"inverse_distance", 0}};
    case LearnerKind::Cart: return {{"max_depth", 20}, {"min_samples_leaf", 5}};
    case LearnerKind::Gbt:
      return {{"n_trees", 200}, {"learning_rate", 0.1}, {"depth", 3}};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Standardizer

Standardizer Standardizer::fit(const Matrix& x) {
  Standardizer s;
  s.mean.assign(x.cols, 0.0);
  s.scale.assign(x.cols, 1.0);
  if (x.rows == 0) return s;
  for (std::size_t j = 0; j < x.cols; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) m += x.at(i, j);
    m /= static_cast<double>(x.rows);
    double var = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      const double d = x.at(i, j) - m;
      var += d * d;
    }
    var /= static_cast<double>(x.rows);
    s.mean[j] = m;
    s.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

void Standardizer::transform_row(std::span<double> row) const {
  for (std::size_t j = 0; j < row.size(); ++j)
    row[j] = (row[j] - mean[j]) / scale[j];
}

Matrix Standardizer::transform(const Matrix& x) const {
  Matrix out = x;
  for (std::size_t i = 0; i < out.rows; ++i) transform_row(out.row(i));
  return out;
}

// ---------------------------------------------------------------------------
// Linear models

double LinearModel::predict_row(std::span<const double> row) const {
  double acc = intercept;
  for (std::size_t j = 0; j < weights.size(); ++j)
    acc += weights[j] * (row[j] - standardizer.mean[j]) / standardizer.scale[j];
  return acc;
}

std::vector<double> LinearModel::predict(const Matrix& x) const {
  std::vector<double> out(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) out[i] = predict_row(x.row(i));
  return out;
}

std::pair<std::vector<double>, double> LinearModel::effective_coefficients()
    const {
  std::vector<double> w(weights.size());
  double b = intercept;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    w[j] = weights[j] / standardizer.scale[j];
    b -= weights[j] * standardizer.mean[j] / standardizer.scale[j];
  }
  return {std::move(w), b};
}

namespace {

LinearModel fit_linear(const Matrix& x, std::span<const double> y,
                       double lambda) {
  LinearModel model;
  model.standardizer = Standardizer::fit(x);
  const Matrix xs = model.standardizer.transform(x);
  const std::size_t n = xs.rows, d = xs.cols;
  const std::size_t extra = lambda > 0.0 ? d : 0;

  // Design [X~ | 1]; ridge appends sqrt(lambda) rows that leave the
  // intercept column unpenalized.
  Matrix a(n + extra, d + 1);
  std::vector<double> rhs(n + extra, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) a.at(i, j) = xs.at(i, j);
    a.at(i, d) = 1.0;
    rhs[i] = y[i];
  }
  const double sqrt_lambda = lambda > 0.0 ? std::sqrt(lambda) : 0.0;
  for (std::size_t j = 0; j < extra; ++j) a.at(n + j, j) = sqrt_lambda;

  LstsqResult sol = lstsq(a, rhs);
  model.weights.assign(sol.x.begin(), sol.x.begin() + static_cast<long>(d));
  model.intercept = sol.x[d];
  model.min_norm_fallback = sol.rank_deficient;
  return model;
}

}  // namespace

LinearModel fit_ols(const Matrix& x, std::span<const double> y) {
  return fit_linear(x, y, 0.0);
}

LinearModel fit_ridge(const Matrix& x, std::span<const double> y,
                      double lambda) {
  if (lambda < 0.0) throw InvalidConfig("ridge lambda must be >= 0");
  return fit_linear(x, y, lambda);
}

// ---------------------------------------------------------------------------
// KNN

KnnModel fit_knn(const Matrix& x, std::span<const double> y, int k,
                 bool inverse_distance) {
  KnnModel model;
  model.standardizer = Standardizer::fit(x);
  model.train_x = model.standardizer.transform(x);
  model.train_y.assign(y.begin(), y.end());
  model.k = std::clamp<int>(k, 1, static_cast<int>(x.rows));
  model.inverse_distance = inverse_distance;
  return model;
}

double KnnModel::predict_row(std::span<const double> row) const {
  const std::size_t n = train_x.rows, d = train_x.cols;
  std::vector<double> q(row.begin(), row.end());
  standardizer.transform_row(q);

  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = q[j] - train_x.at(i, j);
      s += diff * diff;
    }
    dist[i] = {s, i};
  }
  const std::size_t kk = static_cast<std::size_t>(k);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(kk),
                    dist.end());  // (distance, index): lower index wins ties

  if (!inverse_distance) {
    double acc = 0.0;
    for (std::size_t t = 0; t < kk; ++t) acc += train_y[dist[t].second];
    return acc / static_cast<double>(kk);
  }
  // Inverse-distance weighting; exact matches dominate, so if any neighbor
  // sits at distance zero the prediction is the mean of those targets.
  constexpr double kZero = 1e-24;
  double zero_sum = 0.0;
  std::size_t zero_count = 0;
  for (std::size_t t = 0; t < kk; ++t) {
    if (dist[t].first <= kZero) {
      zero_sum += train_y[dist[t].second];
      ++zero_count;
    }
  }
  if (zero_count > 0) return zero_sum / static_cast<double>(zero_count);
  double wsum = 0.0, acc = 0.0;
  for (std::size_t t = 0; t < kk; ++t) {
    const double w = 1.0 / std::sqrt(dist[t].first);
    wsum += w;
    acc += w * train_y[dist[t].second];
  }
  return acc / wsum;
}

std::vector<double> KnnModel::predict(const Matrix& x) const {
  std::vector<double> out(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) out[i] = predict_row(x.row(i));
  return out;
}

// ---------------------------------------------------------------------------
// CART

double CartModel::predict_row(std::span<const double> row) const {
  const TreeNode* nd = &nodes[0];
  while (nd->feature >= 0) {
    const int next = row[static_cast<std::size_t>(nd->feature)] <= nd->threshold
                         ? nd->left
                         : nd->right;
    nd = &nodes[static_cast<std::size_t>(next)];
  }
  return nd->value;
}

std::vector<double> CartModel::predict(const Matrix& x) const {
  std::vector<double> out(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) out[i] = predict_row(x.row(i));
  return out;
}

std::vector<double> cart_feature_importance(const CartModel& tree,
                                            std::size_t n_features) {
  std::vector<double> imp(n_features, 0.0);
  double total = 0.0;
  for (const TreeNode& nd : tree.nodes) {
    if (nd.feature >= 0) {
      imp[static_cast<std::size_t>(nd.feature)] += nd.gain;
      total += nd.gain;
    }
  }
  if (total > 0.0)
    for (double& v : imp) v /= total;
  return imp;
}

namespace {

// Per-feature sample order (values ascending, ties by row index). Built once
// per design matrix and reused across boosting iterations.
struct FeaturePresort {
  std::vector<std::int32_t> order;  // d arrays of n indices, flattened
  std::size_t n = 0, d = 0;

  static FeaturePresort build(const Matrix& x) {
    FeaturePresort p;
    p.n = x.rows;
    p.d = x.cols;
    p.order.resize(p.n * p.d);
    for (std::size_t j = 0; j < p.d; ++j) {
      std::int32_t* col = p.order.data() + j * p.n;
      std::iota(col, col + p.n, 0);
      std::sort(col, col + p.n, [&](std::int32_t a, std::int32_t b) {
        const double xa = x.at(static_cast<std::size_t>(a), j);
        const double xb = x.at(static_cast<std::size_t>(b), j);
        return xa < xb || (xa == xb && a < b);
      });
    }
    return p;
  }
};

// Grows one tree per fit() call. The per-feature sorted index arrays are
// partitioned in place level by level, so no re-sorting happens below the
// root: a node split costs O(d * node_size).
class CartBuilder {
 public:
  CartBuilder(const Matrix& x, const FeaturePresort& presort)
      : x_(x), presort_(presort) {}

  CartModel fit(std::span<const double> y, int max_depth,
                int min_samples_leaf) {
    const std::size_t n = presort_.n, d = presort_.d;
    min_samples_leaf = std::max(min_samples_leaf, 1);
    max_depth = std::clamp(max_depth, 0, 64);

    CartModel model;
    if (n == 0) {
      model.nodes.push_back(TreeNode{});
      return model;
    }
    idx_ = presort_.order;
    scratch_.resize(n);
    goes_left_.assign(n, 0);

    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += y[i];
      sum2 += y[i] * y[i];
    }
    TreeNode root;
    root.value = sum / static_cast<double>(n);
    model.nodes.push_back(root);

    struct Seg {
      int node;
      std::size_t start, end;
      int depth;
      double sum, sum2;
    };
    std::vector<Seg> frontier{{0, 0, n, 0, sum, sum2}};

    while (!frontier.empty()) {
      std::vector<Seg> next;
      for (const Seg& seg : frontier) {
        const std::size_t m = seg.end - seg.start;
        if (seg.depth >= max_depth ||
            m < 2 * static_cast<std::size_t>(min_samples_leaf))
          continue;
        const double parent_sse =
            seg.sum2 - seg.sum * seg.sum / static_cast<double>(m);
        if (!(parent_sse > 0.0)) continue;

        // Best split: minimize left SSE + right SSE. Features are scanned
        // ascending and boundaries ascending, with strict improvement
        // required, which pins the (lowest feature, lowest threshold)
        // tie-break.
        double best_cost = std::numeric_limits<double>::infinity();
        int best_feature = -1;
        double best_threshold = 0.0;
        std::size_t best_left = 0;
        double best_lsum = 0.0, best_lsum2 = 0.0;

        for (std::size_t j = 0; j < d; ++j) {
          const std::int32_t* col = idx_.data() + j * presort_.n + seg.start;
          double lsum = 0.0, lsum2 = 0.0;
          for (std::size_t t = 0; t + 1 < m; ++t) {
            const auto row_cur = static_cast<std::size_t>(col[t]);
            const double yv = y[row_cur];
            lsum += yv;
            lsum2 += yv * yv;
            const double xv = x_.at(row_cur, j);
            const double xn = x_.at(static_cast<std::size_t>(col[t + 1]), j);
            if (xv == xn) continue;  // no boundary between equal values
            const std::size_t lcount = t + 1, rcount = m - lcount;
            if (lcount < static_cast<std::size_t>(min_samples_leaf) ||
                rcount < static_cast<std::size_t>(min_samples_leaf))
              continue;
            const double rsum = seg.sum - lsum;
            const double rsum2 = seg.sum2 - lsum2;
            const double cost =
                (lsum2 - lsum * lsum / static_cast<double>(lcount)) +
                (rsum2 - rsum * rsum / static_cast<double>(rcount));
            if (cost < best_cost) {
              best_cost = cost;
              best_feature = static_cast<int>(j);
              double thr = 0.5 * (xv + xn);
              if (!(thr < xn)) thr = xv;  // midpoint rounded up to xn
              best_threshold = thr;
              best_left = lcount;
              best_lsum = lsum;
              best_lsum2 = lsum2;
            }
          }
        }

        if (best_feature < 0 || !(best_cost < parent_sse)) continue;

        const std::size_t fj = static_cast<std::size_t>(best_feature);
        const std::int32_t* split_col =
            idx_.data() + fj * presort_.n + seg.start;
        for (std::size_t t = 0; t < m; ++t)
          goes_left_[static_cast<std::size_t>(split_col[t])] =
              t < best_left ? 1 : 0;

        // Stable partition of every feature's segment keeps each side sorted.
        for (std::size_t j = 0; j < d; ++j) {
          std::int32_t* col = idx_.data() + j * presort_.n + seg.start;
          std::size_t lp = 0, rp = 0;
          for (std::size_t t = 0; t < m; ++t) {
            const std::int32_t i = col[t];
            if (goes_left_[static_cast<std::size_t>(i)])
              col[lp++] = i;
            else
              scratch_[rp++] = i;
          }
          std::copy(scratch_.begin(),
                    scratch_.begin() + static_cast<long>(rp), col + lp);
        }

        const double rsum = seg.sum - best_lsum;
        const double rsum2 = seg.sum2 - best_lsum2;
        TreeNode left, right;
        left.value = best_lsum / static_cast<double>(best_left);
        right.value = rsum / static_cast<double>(m - best_left);
        const int left_id = static_cast<int>(model.nodes.size());
        model.nodes.push_back(left);
        const int right_id = static_cast<int>(model.nodes.size());
        model.nodes.push_back(right);

        TreeNode& parent = model.nodes[static_cast<std::size_t>(seg.node)];
        parent.feature = best_feature;
        parent.threshold = best_threshold;
        parent.left = left_id;
        parent.right = right_id;
        parent.gain = parent_sse - best_cost;

        next.push_back({left_id, seg.start, seg.start + best_left,
                        seg.depth + 1, best_lsum, best_lsum2});
        next.push_back({right_id, seg.start + best_left, seg.end,
                        seg.depth + 1, rsum, rsum2});
      }
      frontier = std::move(next);
    }
    return model;
  }

 private:
  const Matrix& x_;
  const FeaturePresort& presort_;
  std::vector<std::int32_t> idx_;
  std::vector<std::int32_t> scratch_;
  std::vector<std::uint8_t> goes_left_;
};

}  // namespace

CartModel fit_cart(const Matrix& x, std::span<const double> y, int max_depth,
                   int min_samples_leaf) {
  const FeaturePresort presort = FeaturePresort::build(x);
  CartBuilder builder(x, presort);
  return builder.fit(y, max_depth, min_samples_leaf);
}

// ---------------------------------------------------------------------------
// Gradient boosting

double GbtModel::predict_row(std::span<const double> row) const {
  double acc = base;
  for (const CartModel& t : trees) acc += learning_rate * t.predict_row(row);
  return acc;
}

std::vector<double> GbtModel::predict(const Matrix& x) const {
  std::vector<double> out(x.rows, base);
  for (const CartModel& t : trees)
    for (std::size_t i = 0; i < x.rows; ++i)
      out[i] += learning_rate * t.predict_row(x.row(i));
  return out;
}

GbtModel fit_gbt(const Matrix& x, std::span<const double> y, int n_trees,
                 double learning_rate, int depth,
                 std::vector<double>* train_mse_out) {
  if (n_trees < 1) throw InvalidConfig("gbt needs n_trees >= 1");
  if (!(learning_rate > 0.0) || learning_rate > 1.0)
    throw InvalidConfig("gbt learning_rate must be in (0, 1]");
  const std::size_t n = x.rows;

  GbtModel model;
  model.learning_rate = learning_rate;
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += y[i];
  model.base = n > 0 ? mean / static_cast<double>(n) : 0.0;
  if (train_mse_out) train_mse_out->clear();

  const FeaturePresort presort = FeaturePresort::build(x);
  CartBuilder builder(x, presort);

  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - model.base;

  model.trees.reserve(static_cast<std::size_t>(n_trees));
  for (int t = 0; t < n_trees; ++t) {
    CartModel tree = builder.fit(residual, depth, 1);
    for (std::size_t i = 0; i < n; ++i)
      residual[i] -= learning_rate * tree.predict_row(x.row(i));
    model.trees.push_back(std::move(tree));
    if (train_mse_out) {
      double sse = 0.0;
      for (double r : residual) sse += r * r;
      train_mse_out->push_back(n > 0 ? sse / static_cast<double>(n) : 0.0);
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// Pipeline-facing helpers

Matrix apply_mask(const std::vector<PairRecord>& pairs,
                  const FeatureMask& mask) {
  if (!mask.any()) throw InvalidConfig("feature mask selects no features");
  const auto cols = mask.indices();
  Matrix x(pairs.size(), cols.size());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      x.at(i, j) = pairs[i].features[cols[j]];
  return x;
}

std::vector<double> labels(const std::vector<PairRecord>& pairs) {
  std::vector<double> y(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) y[i] = pairs[i].label_m;
  return y;
}

double TrainedModel::predict(std::span<const double> features) const {
  std::array<double, kFeatureCount> buf{};
  std::size_t m = 0;
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    if (mask.test(i)) buf[m++] = features[i];
  const std::span<const double> row(buf.data(), m);
  return std::visit([&](const auto& impl_) { return impl_.predict_row(row); },
                    impl);
}

std::vector<double> TrainedModel::predict_pairs(
    const std::vector<PairRecord>& pairs) const {
  std::vector<double> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    out[i] = predict(pairs[i].features);
  return out;
}

namespace {

double hyper_or(const Hyperparams& hyper, const Hyperparams& defaults,
                const std::string& key) {
  if (auto it = hyper.find(key); it != hyper.end()) return it->second;
  return defaults.at(key);
}

}  // namespace

TrainedModel train_model(LearnerKind kind, const std::vector<PairRecord>& train,
                         const FeatureMask& mask, const Hyperparams& hyper,
                         double train_filter_m) {
  const std::vector<PairRecord> filtered =
      std::isfinite(train_filter_m) ? filter_by_label(train, train_filter_m)
                                    : train;
  if (filtered.empty())
    throw EmptyDataset("no training pairs remain after the label filter");

  const Matrix x = apply_mask(filtered, mask);
  const std::vector<double> y = labels(filtered);
  const Hyperparams defaults = default_hyper(kind);

  TrainedModel model;
  model.kind = kind;
  model.mask = mask;
  model.train_filter_m = train_filter_m;

  const auto t0 = std::chrono::steady_clock::now();
  switch (kind) {
    case LearnerKind::Ols:
      model.impl = fit_ols(x, y);
      break;
    case LearnerKind::Ridge: {
      const double lambda = hyper_or(hyper, defaults, "lambda");
      model.hyper["lambda"] = lambda;
      model.impl = fit_ridge(x, y, lambda);
      break;
    }
    case LearnerKind::Knn: {
      const int k = static_cast<int>(hyper_or(hyper, defaults, "k"));
      const bool inv = hyper_or(hyper, defaults, "inverse_distance") != 0.0;
      model.hyper["k"] = k;
      model.hyper["inverse_distance"] = inv ? 1.0 : 0.0;
      model.impl = fit_knn(x, y, k, inv);
      break;
    }
    case LearnerKind::Cart: {
      const int depth = static_cast<int>(hyper_or(hyper, defaults, "max_depth"));
      const int msl =
          static_cast<int>(hyper_or(hyper, defaults, "min_samples_leaf"));
      model.hyper["max_depth"] = depth;
      model.hyper["min_samples_leaf"] = msl;
      model.impl = fit_cart(x, y, depth, msl);
      break;
    }
    case LearnerKind::Gbt: {
      const int n_trees = static_cast<int>(hyper_or(hyper, defaults, "n_trees"));
      const double lr = hyper_or(hyper, defaults, "learning_rate");
      const int depth = static_cast<int>(hyper_or(hyper, defaults, "depth"));
      model.hyper["n_trees"] = n_trees;
      model.hyper["learning_rate"] = lr;
      model.hyper["depth"] = depth;
      model.impl = fit_gbt(x, y, n_trees, lr, depth);
      break;
    }
  }
  model.train_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return model;
}

}  // namespace wifidist
