#pragma once

#include <vector>

#include "wifidist/metrics.hpp"
#include "wifidist/types.hpp"

namespace wifidist {

/// Readings outside [rssi_min, rssi_max] removed; in-range readings kept
/// unchanged. Idempotent.
std::map<std::string, double> clip_readings(
    const std::map<std::string, double>& readings, const PipelineConfig& cfg);

/// Clipped copy of `fp`. Throws EmptyAfterClip when no reading survives;
/// callers drop such fingerprints.
Fingerprint clip_fingerprint(const Fingerprint& fp, const PipelineConfig& cfg);

/// True iff the pair may be materialized: same dataset, >= 2 shared MACs,
/// and same floor when the config demands it. Symmetric.
bool pair_eligible(const Fingerprint& a, const Fingerprint& b,
                   const PipelineConfig& cfg);

/// Planar Euclidean distance between the two positions, in meters.
double label_distance(const Fingerprint& a, const Fingerprint& b);

/// One PairRecord per unordered eligible pair, in (i, j) index order over
/// the input. The index space may be partitioned across workers; the output
/// is identical for any worker count.
std::vector<PairRecord> generate_pairs(const std::vector<Fingerprint>& dataset,
                                       const PipelineConfig& cfg,
                                       unsigned workers = 0);

/// Keeps exactly the pairs with label_m <= max_m, preserving order.
std::vector<PairRecord> filter_by_label(const std::vector<PairRecord>& pairs,
                                        double max_m);

}  // namespace wifidist
