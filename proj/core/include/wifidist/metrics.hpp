#pragma once

#include <set>
#include <span>
#include <string>
#include <utility>

#include "wifidist/types.hpp"

namespace wifidist {

/// Parameters for the parameterized metrics.
struct MetricParams {
  double minkowski_p = 3.0;
  double wminkowski_p = 3.0;
  std::vector<double> wminkowski_weights;  // empty = uniform 1.0

  static MetricParams from(const PipelineConfig& cfg) {
    return MetricParams{cfg.minkowski_p, cfg.wminkowski_p,
                        cfg.wminkowski_weights};
  }
};

namespace metrics {

// The 12 signal distance/similarity kernels, evaluated on equal-length
// vectors. Inputs are RSSI readings over the intersecting MACs of a pair,
// ordered lexicographically by MAC.

double braycurtis(std::span<const double> u, std::span<const double> v);
double canberra(std::span<const double> u, std::span<const double> v);
double chebyshev(std::span<const double> u, std::span<const double> v);
double cityblock(std::span<const double> u, std::span<const double> v);

/// 1 - Pearson correlation of u and v. Returns 0 when u == v exactly,
/// 1 when either centered vector has zero norm (constant input).
double correlation(std::span<const double> u, std::span<const double> v);

/// 1 - cosine similarity, with the same degenerate-input rule as correlation.
double cosine(std::span<const double> u, std::span<const double> v);

double euclidean(std::span<const double> u, std::span<const double> v);
double sqeuclidean(std::span<const double> u, std::span<const double> v);
double minkowski(std::span<const double> u, std::span<const double> v, double p);
double wminkowski(std::span<const double> u, std::span<const double> v,
                  double p, std::span<const double> w);

/// Jensen-Shannon distance between two probability vectors (natural log,
/// so values fall in [0, sqrt(ln 2)]). Inputs are normalized internally.
double jensen_shannon_divergence(std::span<const double> p,
                                 std::span<const double> q);

/// Jensen-Shannon distance on RSSI vectors: each reading is shifted by
/// +96 dB (strictly positive after clipping) and normalized to a
/// distribution before the divergence is taken.
double jensen_shannon(std::span<const double> u, std::span<const double> v);

/// Jaccard distance (1 - similarity) of two MAC-address sets.
double jaccard_mac(const std::set<std::string>& a,
                   const std::set<std::string>& b);

/// (|a intersect b|, |a union b|).
std::pair<std::size_t, std::size_t> count_features(
    const std::set<std::string>& a, const std::set<std::string>& b);

}  // namespace metrics

/// Computes the 14-feature vector of a pair in canonical order. The 12
/// distance features are evaluated on the intersecting-MAC RSSI vectors;
/// jaccard and the two count features use the full MAC sets.
/// Precondition: pair_eligible(a, b).
std::array<double, kFeatureCount> extract_features(const Fingerprint& a,
                                                   const Fingerprint& b,
                                                   const MetricParams& params);

}  // namespace wifidist
