#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wifidist/learners.hpp"
#include "wifidist/types.hpp"

namespace wifidist {

/// Canonical long-format fingerprint CSV header: one row per
/// (fingerprint, MAC) reading.
extern const char* const kFingerprintCsvHeader;

struct LoadStats {
  std::size_t rows = 0;
  std::size_t readings_clipped = 0;
  std::size_t fingerprints_dropped_empty = 0;
};

/// Loads, validates and clips fingerprints from the canonical CSV.
/// Malformed rows raise ParseError with their line number; readings outside
/// the RSSI range are dropped (counted in stats), and fingerprints left
/// empty by clipping are dropped entirely.
std::vector<Fingerprint> load_fingerprints(const std::string& path,
                                           const PipelineConfig& cfg,
                                           LoadStats* stats = nullptr);

void save_fingerprints(const std::vector<Fingerprint>& fps,
                       const std::string& path);

enum class Split : std::uint8_t { Train, Validation, Test };

std::string_view to_string(Split s);
Split split_from_string(std::string_view name);

/// Pair key -> split. The key is "<fp_a_id>|<fp_b_id>".
struct SplitAssignment {
  std::map<std::string, Split> by_key;

  static std::string key_for(const PairRecord& p) {
    return p.fp_a_id + "|" + p.fp_b_id;
  }
  Split at(const PairRecord& p) const;
  std::array<std::size_t, 3> counts() const;

  /// The subset of `pairs` assigned to `which`, order preserved. Every pair
  /// must be present in the assignment.
  std::vector<PairRecord> subset(const std::vector<PairRecord>& pairs,
                                 Split which) const;
};

/// Partitions pairs into train/validation/test with exact largest-remainder
/// counts (within one pair of the fractions). The assignment is a pure
/// function of (pair keys, fractions, seed): keys are ranked by a seeded
/// hash, so input order does not matter.
SplitAssignment split_pool(const std::vector<PairRecord>& pairs,
                           const std::array<double, 3>& fractions,
                           std::uint64_t seed);

void save_split(const SplitAssignment& split, const std::string& path);
SplitAssignment load_split(const std::string& path);

/// Full-precision pair CSV round-trip (canonical 14 feature columns +
/// label_m). A header-only file round-trips to an empty list.
void export_pairs(const std::vector<PairRecord>& pairs,
                  const std::string& path);
std::vector<PairRecord> import_pairs(const std::string& path);

/// Versioned JSON model files. load(save(m)) predicts bit-identically.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

struct DatasetManifest {
  enum class Role { Pool, Isolated };
  std::string dataset_id;
  Role role = Role::Pool;
  std::string source_path;
  std::size_t fingerprint_count = 0;
  std::string checksum;  // FNV-1a 64 of the source file, hex
};

std::string file_checksum(const std::string& path);
void save_manifest(const std::vector<DatasetManifest>& entries,
                   const std::string& path);
std::vector<DatasetManifest> load_manifest(const std::string& path);

/// Shortest round-trip decimal formatting (exact on re-parse).
std::string format_double(double v);

}  // namespace wifidist
