#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wifidist/errors.hpp"

namespace wifidist {

inline constexpr std::size_t kFeatureCount = 14;

/// Canonical feature order. Every feature vector, mask and CSV column set
/// in the toolkit uses exactly this order.
enum FeatureIndex : std::size_t {
  kBrayCurtis = 0,
  kCanberra = 1,
  kChebyshev = 2,
  kCityBlock = 3,
  kCorrelation = 4,
  kCosine = 5,
  kEuclidean = 6,
  kJaccard = 7,
  kJensenShannon = 8,
  kMinkowski = 9,
  kSqEuclidean = 10,
  kWMinkowski = 11,
  kIntersectCount = 12,
  kUnionCount = 13,
};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "braycurtis",   "canberra",  "chebyshev", "cityblock",
    "correlation",  "cosine",    "euclidean", "jaccard",
    "jensenshannon", "minkowski", "sqeuclidean", "wminkowski",
    "intersect_count", "union_count"};

/// One WiFi scan at a known position: MAC address -> RSSI (dBm).
/// Readings are kept in a sorted map so the lexicographic MAC ordering used
/// for vectorization falls out of iteration order.
struct Fingerprint {
  std::string id;
  std::string dataset_id;
  double x_m = 0.0;
  double y_m = 0.0;
  int floor = 0;
  std::map<std::string, double> readings;
};

/// An eligible fingerprint pair: 14 features in canonical order plus the
/// spatial-distance label in meters.
struct PairRecord {
  std::string fp_a_id;
  std::string fp_b_id;
  std::string dataset_id;
  std::array<double, kFeatureCount> features{};
  double label_m = 0.0;
};

/// Pipeline-wide knobs. Defaults match the toolkit's standard run.
struct PipelineConfig {
  double rssi_min_dbm = -95.0;
  double rssi_max_dbm = -20.0;
  double train_filter_m = 25.0;
  double proximity_threshold_m = 4.0;
  bool same_floor_only = true;
  double minkowski_p = 3.0;
  double wminkowski_p = 3.0;
  std::vector<double> wminkowski_weights;  // empty = uniform 1.0
  std::array<double, 3> split_fractions{0.70, 0.15, 0.15};
  std::uint64_t seed = 1;

  void validate() const;
};

/// 14-bit feature subset in canonical order.
class FeatureMask {
 public:
  FeatureMask() = default;

  static FeatureMask all_on() {
    FeatureMask m;
    m.bits_.fill(true);
    return m;
  }

  /// Parses a bit string like "01101111110110" (index 0 first).
  static FeatureMask parse(std::string_view s);

  bool test(std::size_t i) const { return bits_.at(i); }
  void set(std::size_t i, bool v) { bits_.at(i) = v; }

  std::size_t count() const {
    std::size_t c = 0;
    for (bool b : bits_) c += b ? 1 : 0;
    return c;
  }

  bool any() const { return count() > 0; }

  std::string to_string() const {
    std::string s(kFeatureCount, '0');
    for (std::size_t i = 0; i < kFeatureCount; ++i)
      if (bits_[i]) s[i] = '1';
    return s;
  }

  /// Indices of the set bits, ascending.
  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < kFeatureCount; ++i)
      if (bits_[i]) out.push_back(i);
    return out;
  }

  /// Compact value usable as a cache key.
  std::uint16_t to_bits() const {
    std::uint16_t v = 0;
    for (std::size_t i = 0; i < kFeatureCount; ++i)
      if (bits_[i]) v |= static_cast<std::uint16_t>(1u << i);
    return v;
  }

  friend bool operator==(const FeatureMask& a, const FeatureMask& b) {
    return a.bits_ == b.bits_;
  }

 private:
  std::array<bool, kFeatureCount> bits_{};
};

}  // namespace wifidist
