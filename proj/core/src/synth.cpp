#include "wifidist/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "wifidist/rng.hpp"

namespace wifidist {

void VenueSpec::validate() const {
  if (!(width_m > 0.0) || !(height_m > 0.0))
    throw InvalidConfig("venue dimensions must be positive");
  if (ap_count < 3) throw InvalidConfig("venue needs at least 3 APs");
  if (path_loss_exponent < 1.5 || path_loss_exponent > 6.0)
    throw InvalidConfig("path-loss exponent must lie in [1.5, 6]");
  if (shadowing_sigma_dbm < 0.0)
    throw InvalidConfig("shadowing sigma must be >= 0");
  if (fingerprint_count < 1)
    throw InvalidConfig("fingerprint_count must be >= 1");
  if (!ap_positions.empty() &&
      ap_positions.size() != static_cast<std::size_t>(ap_count))
    throw InvalidConfig("explicit AP positions must match ap_count");
}

namespace {

constexpr double kRssiFloorDbm = -95.0;
constexpr double kRssiCeilDbm = -20.0;

std::string zero_padded(std::size_t value, std::size_t width) {
  std::string s = std::to_string(value);
  return s.size() >= width ? s : std::string(width - s.size(), '0') + s;
}

std::string ap_mac(int index) {
  // Locally administered address block, low octets carry the index.
  char buf[18];
  std::snprintf(buf, sizeof(buf), "02:00:00:00:%02x:%02x",
                (index >> 8) & 0xff, index & 0xff);
  return buf;
}

std::vector<std::pair<double, double>> place_aps(const VenueSpec& spec) {
  if (!spec.ap_positions.empty()) return spec.ap_positions;
  std::vector<std::pair<double, double>> aps;
  aps.reserve(static_cast<std::size_t>(spec.ap_count));
  if (spec.ap_placement == VenueSpec::ApPlacement::Random) {
    Rng rng = Rng(spec.seed).spawn(0);
    for (int i = 0; i < spec.ap_count; ++i)
      aps.emplace_back(rng.uniform(0.0, spec.width_m),
                       rng.uniform(0.0, spec.height_m));
    return aps;
  }
  // Near-square grid, cell centers, row-major, truncated to ap_count.
  const int nx = static_cast<int>(
      std::ceil(std::sqrt(static_cast<double>(spec.ap_count))));
  const int ny = (spec.ap_count + nx - 1) / nx;
  for (int gy = 0; gy < ny && static_cast<int>(aps.size()) < spec.ap_count;
       ++gy) {
    for (int gx = 0; gx < nx && static_cast<int>(aps.size()) < spec.ap_count;
         ++gx) {
      aps.emplace_back((gx + 0.5) * spec.width_m / nx,
                       (gy + 0.5) * spec.height_m / ny);
    }
  }
  return aps;
}

}  // namespace

std::vector<Fingerprint> generate_venue(const VenueSpec& spec) {
  spec.validate();
  const auto aps = place_aps(spec);
  const Rng master(spec.seed);

  std::vector<Fingerprint> out;
  out.reserve(static_cast<std::size_t>(spec.fingerprint_count));
  std::size_t digits = 1;
  for (int v = spec.fingerprint_count - 1; v >= 10; v /= 10) ++digits;

  for (int i = 0; i < spec.fingerprint_count; ++i) {
    Rng rng = master.spawn(static_cast<std::uint64_t>(i) + 1);
    Fingerprint fp;
    fp.id = spec.dataset_id + "-fp" +
            zero_padded(static_cast<std::size_t>(i), digits);
    fp.dataset_id = spec.dataset_id;
    fp.x_m = rng.uniform(0.0, spec.width_m);
    fp.y_m = rng.uniform(0.0, spec.height_m);
    fp.floor = 0;

    for (std::size_t a = 0; a < aps.size(); ++a) {
      const double d = std::hypot(fp.x_m - aps[a].first, fp.y_m - aps[a].second);
      double rssi = spec.tx_power_dbm -
                    10.0 * spec.path_loss_exponent *
                        std::log10(std::max(d, 1.0) / 1.0);
      if (spec.shadowing_sigma_dbm > 0.0)
        rssi += rng.normal(0.0, spec.shadowing_sigma_dbm);
      if (rssi < spec.sensitivity_dbm) continue;
      rssi = std::clamp(rssi, kRssiFloorDbm, kRssiCeilDbm);
      fp.readings.emplace(ap_mac(static_cast<int>(a)), rssi);
    }
    if (fp.readings.empty()) continue;  // out of range of every AP
    out.push_back(std::move(fp));
  }
  return out;
}

PlantedPairs planted_feature_pairs(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidConfig("planted_feature_pairs needs n >= 1");
  Rng rng(seed);

  PlantedPairs out;
  const std::size_t first = rng.index(kFeatureCount);
  std::size_t second = rng.index(kFeatureCount - 1);
  if (second >= first) ++second;
  out.informative = {std::min(first, second), std::max(first, second)};

  out.pairs.reserve(n);
  std::size_t digits = 1;
  for (std::size_t v = n - 1; v >= 10; v /= 10) ++digits;
  for (std::size_t i = 0; i < n; ++i) {
    PairRecord p;
    const std::string stem = "pl" + zero_padded(i, digits);
    p.fp_a_id = stem + "a";
    p.fp_b_id = stem + "b";
    p.dataset_id = "planted";
    p.label_m = rng.uniform(0.0, 30.0);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      const double noise = rng.normal();
      p.features[j] = (j == out.informative[0] || j == out.informative[1])
                          ? p.label_m + noise
                          : noise;
    }
    out.pairs.push_back(std::move(p));
  }
  return out;
}

}  // namespace wifidist
