#include "wifidist/metrics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace wifidist::metrics {

namespace {

// RSSI -> probability shift. Clipped readings lie in [-95, -20], so the
// shifted entries are >= 1 and every distribution is strictly positive.
constexpr double kJsShiftDb = 96.0;

bool exactly_equal(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) return false;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] != v[i]) return false;
  return true;
}

double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double mean(std::span<const double> u) {
  double s = 0.0;
  for (double x : u) s += x;
  return s / static_cast<double>(u.size());
}

}  // namespace

double braycurtis(std::span<const double> u, std::span<const double> v) {
  assert(u.size() == v.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    num += std::abs(u[i] - v[i]);
    den += std::abs(u[i] + v[i]);
  }
  return den > 0.0 ? num / den : 0.0;
}

double canberra(std::span<const double> u, std::span<const double> v) {
  assert(u.size() == v.size());
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double den = std::abs(u[i]) + std::abs(v[i]);
    if (den > 0.0) s += std::abs(u[i] - v[i]) / den;
  }
  return s;
}

double chebyshev(std::span<const double> u, std::span<const double> v) {
  assert(u.size() == v.size());
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    m = std::max(m, std::abs(u[i] - v[i]));
  return m;
}

double cityblock(std::span<const double> u, std::span<const double> v) {
  assert(u.size() == v.size());
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::abs(u[i] - v[i]);
  return s;
}

double correlation(std::span<const double> u, std::span<const double> v) {
  assert(u.size() == v.size());
  if (exactly_equal(u, v)) return 0.0;
  const double mu = mean(u), mv = mean(v);
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = u[i] - mu, b = v[i] - mv;
    uv += a * b;
    uu += a * a;
    vv += b * b;
  }
  if (uu == 0.0 || vv == 0.0) return 1.0;  // constant vector, undefined slope
  return 1.0 - uv / std::sqrt(uu * vv);
}

double cosine(std::span<const double> u, std::span<const double> v) {
  assert(u.size() == v.size());
  if (exactly_equal(u, v)) return 0.0;
  const double uu = dot(u, u), vv = dot(v, v);
  if (uu == 0.0 || vv == 0.0) return 1.0;
  return 1.0 - dot(u, v) / std::sqrt(uu * vv);
}

double euclidean(std::span<const double> u, std::span<const double> v) {
  return std::sqrt(sqeuclidean(u, v));
}

double sqeuclidean(std::span<const double> u, std::span<const double> v) {
  assert(u.size() == v.size());
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    s += d * d;
  }
  return s;
}

double minkowski(std::span<const double> u, std::span<const double> v,
                 double p) {
  assert(u.size() == v.size());
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    s += std::pow(std::abs(u[i] - v[i]), p);
  return std::pow(s, 1.0 / p);
}

double wminkowski(std::span<const double> u, std::span<const double> v,
                  double p, std::span<const double> w) {
  assert(u.size() == v.size());
  assert(w.empty() || w.size() == u.size());
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    s += std::pow(std::abs(wi * (u[i] - v[i])), p);
  }
  return std::pow(s, 1.0 / p);
}

double jensen_shannon_divergence(std::span<const double> p,
                                 std::span<const double> q) {
  assert(p.size() == q.size());
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    assert(p[i] >= 0.0 && q[i] >= 0.0);
    sp += p[i];
    sq += q[i];
  }
  assert(sp > 0.0 && sq > 0.0);
  // D(p||m) with m the pointwise mean; zero-mass terms contribute nothing.
  double dp = 0.0, dq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p[i] / sp;
    const double qi = q[i] / sq;
    const double mi = 0.5 * (pi + qi);
    if (pi > 0.0) dp += pi * std::log(pi / mi);
    if (qi > 0.0) dq += qi * std::log(qi / mi);
  }
  const double js2 = 0.5 * (dp + dq);
  return js2 > 0.0 ? std::sqrt(js2) : 0.0;
}

double jensen_shannon(std::span<const double> u, std::span<const double> v) {
  std::vector<double> p(u.size()), q(v.size());
  for (std::size_t i = 0; i < u.size(); ++i) p[i] = u[i] + kJsShiftDb;
  for (std::size_t i = 0; i < v.size(); ++i) q[i] = v[i] + kJsShiftDb;
  return jensen_shannon_divergence(p, q);
}

double jaccard_mac(const std::set<std::string>& a,
                   const std::set<std::string>& b) {
  const auto [inter, uni] = count_features(a, b);
  return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

std::pair<std::size_t, std::size_t> count_features(
    const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t inter = 0;
  for (const auto& m : a) inter += b.count(m);
  return {inter, a.size() + b.size() - inter};
}

}  // namespace wifidist::metrics

namespace wifidist {

std::array<double, kFeatureCount> extract_features(const Fingerprint& a,
                                                   const Fingerprint& b,
                                                   const MetricParams& params) {
  // Intersecting-MAC RSSI vectors, aligned by the maps' lexicographic order.
  std::vector<double> u, v;
  std::size_t inter = 0;
  auto ia = a.readings.begin();
  auto ib = b.readings.begin();
  while (ia != a.readings.end() && ib != b.readings.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      u.push_back(ia->second);
      v.push_back(ib->second);
      ++inter;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.readings.size() + b.readings.size() - inter;

  std::array<double, kFeatureCount> f{};
  f[kBrayCurtis] = metrics::braycurtis(u, v);
  f[kCanberra] = metrics::canberra(u, v);
  f[kChebyshev] = metrics::chebyshev(u, v);
  f[kCityBlock] = metrics::cityblock(u, v);
  f[kCorrelation] = metrics::correlation(u, v);
  f[kCosine] = metrics::cosine(u, v);
  f[kEuclidean] = metrics::euclidean(u, v);
  f[kJaccard] =
      1.0 - static_cast<double>(inter) / static_cast<double>(uni);
  f[kJensenShannon] = metrics::jensen_shannon(u, v);
  f[kMinkowski] = metrics::minkowski(u, v, params.minkowski_p);
  f[kSqEuclidean] = metrics::sqeuclidean(u, v);
  if (!params.wminkowski_weights.empty() &&
      params.wminkowski_weights.size() != u.size()) {
    // Explicit weights are per-dimension; the intersection size varies per
    // pair, so anything but the uniform default must match exactly.
    throw InvalidConfig("wminkowski weight vector length does not match the "
                        "pair's intersecting-MAC count");
  }
  f[kWMinkowski] =
      metrics::wminkowski(u, v, params.wminkowski_p, params.wminkowski_weights);
  f[kIntersectCount] = static_cast<double>(inter);
  f[kUnionCount] = static_cast<double>(uni);
  return f;
}

}  // namespace wifidist
