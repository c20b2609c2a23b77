// Independent reference implementations used as test oracles. Everything
// here is written from the definitions directly (plain index loops, long
// double accumulation, no shared code with the library) so a library bug
// cannot hide behind a mirrored implementation.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oracles {

// --- signal metrics ---------------------------------------------------------

inline double ref_braycurtis(const std::vector<double>& u,
                             const std::vector<double>& v) {
  long double num = 0, den = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    num += std::fabs((long double)u[i] - v[i]);
    den += std::fabs((long double)u[i] + v[i]);
  }
  return (double)(num / den);
}

inline double ref_canberra(const std::vector<double>& u,
                           const std::vector<double>& v) {
  long double s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const long double den = std::fabs((long double)u[i]) + std::fabs((long double)v[i]);
    if (den > 0) s += std::fabs((long double)u[i] - v[i]) / den;
  }
  return (double)s;
}

inline double ref_chebyshev(const std::vector<double>& u,
                            const std::vector<double>& v) {
  long double m = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    m = std::max(m, std::fabs((long double)u[i] - v[i]));
  return (double)m;
}

inline double ref_cityblock(const std::vector<double>& u,
                            const std::vector<double>& v) {
  long double s = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    s += std::fabs((long double)u[i] - v[i]);
  return (double)s;
}

inline double ref_correlation(const std::vector<double>& u,
                              const std::vector<double>& v) {
  const std::size_t n = u.size();
  long double mu = 0, mv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mu += u[i];
    mv += v[i];
  }
  mu /= n;
  mv /= n;
  long double uv = 0, uu = 0, vv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    uv += (u[i] - mu) * (v[i] - mv);
    uu += (u[i] - mu) * (u[i] - mu);
    vv += (v[i] - mv) * (v[i] - mv);
  }
  return (double)(1.0L - uv / std::sqrt(uu * vv));
}

inline double ref_cosine(const std::vector<double>& u,
                         const std::vector<double>& v) {
  long double uv = 0, uu = 0, vv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += (long double)u[i] * v[i];
    uu += (long double)u[i] * u[i];
    vv += (long double)v[i] * v[i];
  }
  return (double)(1.0L - uv / std::sqrt(uu * vv));
}

inline double ref_sqeuclidean(const std::vector<double>& u,
                              const std::vector<double>& v) {
  long double s = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    s += ((long double)u[i] - v[i]) * ((long double)u[i] - v[i]);
  return (double)s;
}

inline double ref_euclidean(const std::vector<double>& u,
                            const std::vector<double>& v) {
  return std::sqrt(ref_sqeuclidean(u, v));
}

inline double ref_minkowski(const std::vector<double>& u,
                            const std::vector<double>& v, double p) {
  long double s = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    s += std::pow(std::fabs((long double)u[i] - v[i]), (long double)p);
  return (double)std::pow(s, 1.0L / p);
}

inline double ref_wminkowski(const std::vector<double>& u,
                             const std::vector<double>& v, double p,
                             const std::vector<double>& w) {
  long double s = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    s += std::pow(std::fabs((long double)w[i] * ((long double)u[i] - v[i])),
                  (long double)p);
  return (double)std::pow(s, 1.0L / p);
}

// Kullback-Leibler divergence by direct summation over normalized inputs.
inline double ref_kl(const std::vector<double>& p, const std::vector<double>& q) {
  long double sp = 0, sq = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sp += p[i];
    sq += q[i];
  }
  long double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const long double pi = p[i] / sp, qi = q[i] / sq;
    if (pi > 0) d += pi * std::log(pi / qi);
  }
  return (double)d;
}

inline double ref_jensen_shannon(const std::vector<double>& p,
                                 const std::vector<double>& q) {
  long double sp = 0, sq = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sp += p[i];
    sq += q[i];
  }
  std::vector<double> pn(p.size()), qn(q.size()), m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    pn[i] = (double)(p[i] / sp);
    qn[i] = (double)(q[i] / sq);
    m[i] = 0.5 * (pn[i] + qn[i]);
  }
  const double js2 = 0.5 * (ref_kl(pn, m) + ref_kl(qn, m));
  return js2 > 0 ? std::sqrt(js2) : 0.0;
}

// RSSI semantics: +96 dB shift then normalize.
inline double ref_jensen_shannon_rssi(const std::vector<double>& u,
                                      const std::vector<double>& v) {
  std::vector<double> p(u.size()), q(v.size());
  for (std::size_t i = 0; i < u.size(); ++i) p[i] = u[i] + 96.0;
  for (std::size_t i = 0; i < v.size(); ++i) q[i] = v[i] + 96.0;
  return ref_jensen_shannon(p, q);
}

// --- linear algebra ---------------------------------------------------------

// Gauss-Jordan with partial pivoting; a is n x n row-major, returns x = a^-1 b.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    if (a[col][col] == 0.0) throw std::runtime_error("singular system");
    const double d = a[col][col];
    for (std::size_t c = 0; c < n; ++c) a[col][c] /= d;
    b[col] /= d;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      const double f = a[r][col];
      for (std::size_t c = 0; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  return b;
}

struct RefLinearFit {
  std::vector<double> weights;  // per standardized column
  double intercept = 0.0;
  std::vector<double> mean, scale;
};

// Normal-equations solve of the declared objective: standardize columns
// (train statistics, population variance, zero-variance -> scale 1), append
// an intercept column, optionally add ridge penalty on the non-intercept
// block, and solve (A^T A + lambda D) w = A^T y by Gauss-Jordan.
inline RefLinearFit ref_linear_normal_equations(
    const std::vector<std::vector<double>>& x, const std::vector<double>& y,
    double lambda) {
  const std::size_t n = x.size(), d = x.empty() ? 0 : x[0].size();
  RefLinearFit fit;
  fit.mean.assign(d, 0.0);
  fit.scale.assign(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    long double m = 0;
    for (std::size_t i = 0; i < n; ++i) m += x[i][j];
    m /= n;
    long double var = 0;
    for (std::size_t i = 0; i < n; ++i) var += (x[i][j] - m) * (x[i][j] - m);
    var /= n;
    fit.mean[j] = (double)m;
    fit.scale[j] = var > 0 ? std::sqrt((double)var) : 1.0;
  }
  std::vector<std::vector<double>> a(n, std::vector<double>(d + 1, 1.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      a[i][j] = (x[i][j] - fit.mean[j]) / fit.scale[j];

  std::vector<std::vector<double>> g(d + 1, std::vector<double>(d + 1, 0.0));
  std::vector<double> rhs(d + 1, 0.0);
  for (std::size_t r = 0; r <= d; ++r) {
    for (std::size_t c = 0; c <= d; ++c) {
      long double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += (long double)a[i][r] * a[i][c];
      g[r][c] = (double)s;
    }
    long double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += (long double)a[i][r] * y[i];
    rhs[r] = (double)s;
  }
  for (std::size_t j = 0; j < d; ++j) g[j][j] += lambda;  // intercept unpenalized

  const std::vector<double> sol = solve_dense(g, rhs);
  fit.weights.assign(sol.begin(), sol.end() - 1);
  fit.intercept = sol.back();
  return fit;
}

inline double ref_linear_predict(const RefLinearFit& fit,
                                 const std::vector<double>& row) {
  double acc = fit.intercept;
  for (std::size_t j = 0; j < fit.weights.size(); ++j)
    acc += fit.weights[j] * (row[j] - fit.mean[j]) / fit.scale[j];
  return acc;
}

// --- KNN --------------------------------------------------------------------

// Exhaustive scan with (distance, index) ordering; uniform or 1/d weights,
// exact matches averaged on their own.
inline double ref_knn_predict(const std::vector<std::vector<double>>& train_x,
                              const std::vector<double>& train_y,
                              const std::vector<double>& query, int k,
                              bool inverse) {
  const std::size_t n = train_x.size();
  std::vector<std::pair<double, std::size_t>> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    long double s = 0;
    for (std::size_t j = 0; j < query.size(); ++j)
      s += ((long double)query[j] - train_x[i][j]) *
           ((long double)query[j] - train_x[i][j]);
    d[i] = {(double)s, i};
  }
  std::stable_sort(d.begin(), d.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  const std::size_t kk = std::min<std::size_t>((std::size_t)std::max(k, 1), n);
  if (!inverse) {
    long double acc = 0;
    for (std::size_t t = 0; t < kk; ++t) acc += train_y[d[t].second];
    return (double)(acc / kk);
  }
  long double zsum = 0;
  std::size_t zcount = 0;
  for (std::size_t t = 0; t < kk; ++t)
    if (d[t].first <= 1e-24) {
      zsum += train_y[d[t].second];
      ++zcount;
    }
  if (zcount > 0) return (double)(zsum / zcount);
  long double acc = 0, wsum = 0;
  for (std::size_t t = 0; t < kk; ++t) {
    const long double w = 1.0L / std::sqrt((long double)d[t].first);
    acc += w * train_y[d[t].second];
    wsum += w;
  }
  return (double)(acc / wsum);
}

// --- CART -------------------------------------------------------------------

// Exhaustive recursive tree builder for tiny datasets. Candidate thresholds
// are midpoints of consecutive distinct sorted values; left means <=.
// Ties in cost keep the lowest feature index, then the lowest threshold.
struct RefTree {
  int feature = -1;
  double threshold = 0.0;
  double value = 0.0;
  std::unique_ptr<RefTree> left, right;
};

inline double ref_sse(const std::vector<double>& y,
                      const std::vector<std::size_t>& rows) {
  long double m = 0;
  for (auto i : rows) m += y[i];
  m /= rows.size();
  long double s = 0;
  for (auto i : rows) s += (y[i] - m) * (y[i] - m);
  return (double)s;
}

inline std::unique_ptr<RefTree> ref_build_tree(
    const std::vector<std::vector<double>>& x, const std::vector<double>& y,
    std::vector<std::size_t> rows, int depth, int max_depth,
    int min_samples_leaf) {
  auto node = std::make_unique<RefTree>();
  long double mean = 0;
  for (auto i : rows) mean += y[i];
  node->value = (double)(mean / rows.size());

  if (depth >= max_depth ||
      rows.size() < 2 * (std::size_t)min_samples_leaf)
    return node;
  const double parent = ref_sse(y, rows);
  if (!(parent > 0.0)) return node;

  const std::size_t d = x[0].size();
  double best_cost = std::numeric_limits<double>::infinity();
  int best_feature = -1;
  double best_threshold = 0.0;

  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> values;
    for (auto i : rows) values.push_back(x[i][j]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t t = 0; t + 1 < values.size(); ++t) {
      double thr = 0.5 * (values[t] + values[t + 1]);
      if (!(thr < values[t + 1])) thr = values[t];
      std::vector<std::size_t> lrows, rrows;
      for (auto i : rows)
        (x[i][j] <= thr ? lrows : rrows).push_back(i);
      if (lrows.size() < (std::size_t)min_samples_leaf ||
          rrows.size() < (std::size_t)min_samples_leaf)
        continue;
      const double cost = ref_sse(y, lrows) + ref_sse(y, rrows);
      if (cost < best_cost) {
        best_cost = cost;
        best_feature = (int)j;
        best_threshold = thr;
      }
    }
  }
  if (best_feature < 0 || !(best_cost < parent)) return node;

  node->feature = best_feature;
  node->threshold = best_threshold;
  std::vector<std::size_t> lrows, rrows;
  for (auto i : rows)
    (x[i][(std::size_t)best_feature] <= best_threshold ? lrows : rrows)
        .push_back(i);
  node->left = ref_build_tree(x, y, lrows, depth + 1, max_depth,
                              min_samples_leaf);
  node->right = ref_build_tree(x, y, rrows, depth + 1, max_depth,
                               min_samples_leaf);
  return node;
}

inline double ref_tree_predict(const RefTree& node,
                               const std::vector<double>& row) {
  if (node.feature < 0) return node.value;
  return row[(std::size_t)node.feature] <= node.threshold
             ? ref_tree_predict(*node.left, row)
             : ref_tree_predict(*node.right, row);
}

// --- statistics -------------------------------------------------------------

inline double ref_pearson(const std::vector<double>& a,
                          const std::vector<double>& b) {
  const std::size_t n = a.size();
  long double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  long double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ab += (a[i] - ma) * (b[i] - mb);
    aa += (a[i] - ma) * (a[i] - ma);
    bb += (b[i] - mb) * (b[i] - mb);
  }
  return (double)(ab / std::sqrt(aa * bb));
}

inline std::vector<double> ref_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * (double)(i + j) + 1.0;  // average rank, 1-based
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double ref_spearman(const std::vector<double>& a,
                           const std::vector<double>& b) {
  return ref_pearson(ref_ranks(a), ref_ranks(b));
}

// --- classification ---------------------------------------------------------

struct RefConfusion {
  long tp = 0, fp = 0, fn = 0, tn = 0;
};

inline RefConfusion ref_confusion(const std::vector<double>& y,
                                  const std::vector<double>& yhat,
                                  double threshold) {
  RefConfusion c;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < threshold) {
      if (yhat[i] < threshold)
        ++c.tp;
      else
        ++c.fn;
    } else {
      if (yhat[i] < threshold)
        ++c.fp;
      else
        ++c.tn;
    }
  }
  return c;
}

inline double ref_f_beta(double p, double r, double beta) {
  if (p == 0.0 && r == 0.0) return 0.0;
  return (1.0 + beta * beta) * p * r / (beta * beta * p + r);
}

}  // namespace oracles
