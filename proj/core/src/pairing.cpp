#include "wifidist/pairing.hpp"

#include <cmath>
#include <thread>

namespace wifidist {

std::map<std::string, double> clip_readings(
    const std::map<std::string, double>& readings, const PipelineConfig& cfg) {
  std::map<std::string, double> out;
  for (const auto& [mac, rssi] : readings) {
    if (rssi >= cfg.rssi_min_dbm && rssi <= cfg.rssi_max_dbm)
      out.emplace(mac, rssi);
  }
  return out;
}

Fingerprint clip_fingerprint(const Fingerprint& fp, const PipelineConfig& cfg) {
  Fingerprint out = fp;
  out.readings = clip_readings(fp.readings, cfg);
  if (out.readings.empty())
    throw EmptyAfterClip("fingerprint " + fp.id +
                         ": no readings survive RSSI clipping");
  return out;
}

namespace {

std::size_t shared_mac_count(const Fingerprint& a, const Fingerprint& b) {
  std::size_t n = 0;
  auto ia = a.readings.begin();
  auto ib = b.readings.begin();
  while (ia != a.readings.end() && ib != b.readings.end()) {
    if (ia->first < ib->first)
      ++ia;
    else if (ib->first < ia->first)
      ++ib;
    else {
      ++n;
      ++ia;
      ++ib;
    }
  }
  return n;
}

}  // namespace

bool pair_eligible(const Fingerprint& a, const Fingerprint& b,
                   const PipelineConfig& cfg) {
  if (a.dataset_id != b.dataset_id) return false;
  if (cfg.same_floor_only && a.floor != b.floor) return false;
  return shared_mac_count(a, b) >= 2;
}

double label_distance(const Fingerprint& a, const Fingerprint& b) {
  return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m);
}

std::vector<PairRecord> generate_pairs(const std::vector<Fingerprint>& dataset,
                                       const PipelineConfig& cfg,
                                       unsigned workers) {
  const std::size_t n = dataset.size();
  const MetricParams params = MetricParams::from(cfg);

  auto emit_range = [&](std::size_t i_begin, std::size_t i_end,
                        std::vector<PairRecord>& out) {
    for (std::size_t i = i_begin; i < i_end; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const Fingerprint& a = dataset[i];
        const Fingerprint& b = dataset[j];
        if (!pair_eligible(a, b, cfg)) continue;
        PairRecord rec;
        rec.fp_a_id = a.id;
        rec.fp_b_id = b.id;
        rec.dataset_id = a.dataset_id;
        rec.features = extract_features(a, b, params);
        rec.label_m = label_distance(a, b);
        out.push_back(std::move(rec));
      }
    }
  };

  if (workers == 0) workers = std::thread::hardware_concurrency();
  if (workers <= 1 || n < 64) {
    std::vector<PairRecord> out;
    emit_range(0, n, out);
    return out;
  }

  // Partition the i-index space; per-slice outputs concatenate in slice
  // order, so the result matches the sequential (i, j) order exactly.
  workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
  std::vector<std::vector<PairRecord>> slices(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = std::min<std::size_t>(n, w * chunk);
    const std::size_t hi = std::min<std::size_t>(n, lo + chunk);
    threads.emplace_back(
        [&, lo, hi, w]() { emit_range(lo, hi, slices[w]); });
  }
  for (auto& t : threads) t.join();

  std::vector<PairRecord> out;
  for (auto& s : slices) {
    out.insert(out.end(), std::make_move_iterator(s.begin()),
               std::make_move_iterator(s.end()));
  }
  return out;
}

std::vector<PairRecord> filter_by_label(const std::vector<PairRecord>& pairs,
                                        double max_m) {
  std::vector<PairRecord> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs)
    if (p.label_m <= max_m) out.push_back(p);
  return out;
}

}  // namespace wifidist
