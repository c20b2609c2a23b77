#include "wifidist/types.hpp"

#include <cmath>

namespace wifidist {

void PipelineConfig::validate() const {
  if (!(rssi_min_dbm < rssi_max_dbm))
    throw InvalidConfig("rssi_min_dbm must be below rssi_max_dbm");
  if (!(train_filter_m > 0.0))
    throw InvalidConfig("train_filter_m must be positive");
  if (!(proximity_threshold_m > 0.0))
    throw InvalidConfig("proximity_threshold_m must be positive");
  if (!(minkowski_p >= 1.0) || !(wminkowski_p >= 1.0))
    throw InvalidConfig("Minkowski orders must be >= 1");
  for (double w : wminkowski_weights)
    if (!(w > 0.0)) throw InvalidConfig("wminkowski weights must be > 0");
  double sum = 0.0;
  for (double f : split_fractions) {
    if (f < 0.0) throw InvalidConfig("split fractions must be non-negative");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvalidConfig("split fractions must sum to 1");
}

FeatureMask FeatureMask::parse(std::string_view s) {
  if (s.size() != kFeatureCount)
    throw InvalidConfig("feature mask must have exactly 14 bits, got \"" +
                        std::string(s) + "\"");
  FeatureMask m;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (s[i] == '1')
      m.bits_[i] = true;
    else if (s[i] == '0')
      m.bits_[i] = false;
    else
      throw InvalidConfig("feature mask may contain only '0' and '1'");
  }
  return m;
}

}  // namespace wifidist
