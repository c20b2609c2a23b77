#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wifidist/types.hpp"

namespace wifidist {

/// Synthetic venue description for the log-distance path-loss generator.
struct VenueSpec {
  double width_m = 50.0;
  double height_m = 30.0;
  int ap_count = 10;
  enum class ApPlacement { Grid, Random } ap_placement = ApPlacement::Grid;
  std::vector<std::pair<double, double>> ap_positions;  // overrides placement
  double tx_power_dbm = -30.0;   // P0 at the d0 = 1 m reference distance
  double path_loss_exponent = 3.0;
  double shadowing_sigma_dbm = 4.0;
  double sensitivity_dbm = -95.0;  // readings below this are dropped
  int fingerprint_count = 100;
  std::string dataset_id = "synth";
  std::uint64_t seed = 1;

  void validate() const;
};

/// Fingerprints at uniform random positions. RSSI toward each AP follows
/// P0 - 10 n log10(max(d, 1m) / 1m) + N(0, sigma^2), dropped below the
/// sensitivity floor and clamped into [-95, -20]. Fingerprint i draws from
/// an RNG substream of (seed, i), so generation is order-independent;
/// fingerprints that end up with no readings are dropped.
std::vector<Fingerprint> generate_venue(const VenueSpec& spec);

/// Feature table where exactly two columns carry the label (plus unit
/// Gaussian noise) and the other twelve are independent unit Gaussians.
/// Labels are uniform on [0, 30) meters. Used as a selection oracle.
struct PlantedPairs {
  std::vector<PairRecord> pairs;
  std::array<std::size_t, 2> informative;  // column indices, ascending
};

PlantedPairs planted_feature_pairs(std::size_t n, std::uint64_t seed);

}  // namespace wifidist
