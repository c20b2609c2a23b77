#include "wifidist/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "wifidist/pairing.hpp"
#include "wifidist/rng.hpp"

namespace wifidist {

using json = nlohmann::json;

const char* const kFingerprintCsvHeader =
    "dataset_id,fingerprint_id,x_m,y_m,floor,mac,rssi_dbm";

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

double parse_double_strict(const std::string& s, const char* what,
                           std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ParseError("line " + std::to_string(line_no) + ": non-numeric " +
                     what + " \"" + s + "\"");
  return v;
}

long parse_int_strict(const std::string& s, const char* what,
                      std::size_t line_no) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ParseError("line " + std::to_string(line_no) + ": non-integer " +
                     what + " \"" + s + "\"");
  return v;
}

bool is_hex(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') ||
         (c >= 'A' && c <= 'F');
}

// MAC grammar: six ':'-separated hex octets, e.g. 02:1a:ff:00:3c:9e.
std::string normalize_mac(const std::string& s, std::size_t line_no) {
  bool ok = s.size() == 17;
  for (std::size_t i = 0; ok && i < 17; ++i) {
    if (i % 3 == 2)
      ok = s[i] == ':';
    else
      ok = is_hex(s[i]);
  }
  if (!ok)
    throw ParseError("line " + std::to_string(line_no) +
                     ": bad MAC address \"" + s + "\"");
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

void check_id(const std::string& s, const char* what, std::size_t line_no) {
  if (s.empty())
    throw ParseError("line " + std::to_string(line_no) + ": empty " + what);
  if (s.find('|') != std::string::npos || s.find(',') != std::string::npos ||
      s.find_first_of(" \t") != std::string::npos)
    throw ParseError("line " + std::to_string(line_no) + ": " + what + " \"" +
                     s + "\" may not contain '|', ',' or whitespace");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  return out;
}

std::string pairs_csv_header() {
  std::string h = "dataset_id,fp_a_id,fp_b_id";
  for (auto name : kFeatureNames) {
    h += ',';
    h += name;
  }
  h += ",label_m";
  return h;
}

}  // namespace

std::vector<Fingerprint> load_fingerprints(const std::string& path,
                                           const PipelineConfig& cfg,
                                           LoadStats* stats) {
  cfg.validate();
  std::ifstream in = open_input(path);

  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kFingerprintCsvHeader)
    throw ParseError(path + ": expected header \"" +
                     std::string(kFingerprintCsvHeader) + "\"");

  LoadStats local{};
  std::map<std::string, Fingerprint> by_id;
  std::vector<std::string> order;
  std::size_t line_no = 1;

  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 7)
      throw ParseError("line " + std::to_string(line_no) + ": expected 7 " +
                       "columns, got " + std::to_string(fields.size()));
    const std::string& dataset_id = fields[0];
    const std::string& fp_id = fields[1];
    check_id(dataset_id, "dataset_id", line_no);
    check_id(fp_id, "fingerprint_id", line_no);
    const double x = parse_double_strict(fields[2], "x_m", line_no);
    const double y = parse_double_strict(fields[3], "y_m", line_no);
    const long floor = parse_int_strict(fields[4], "floor", line_no);
    const std::string mac = normalize_mac(fields[5], line_no);
    const double rssi = parse_double_strict(fields[6], "rssi_dbm", line_no);
    ++local.rows;

    auto [it, inserted] = by_id.try_emplace(fp_id);
    Fingerprint& fp = it->second;
    if (inserted) {
      fp.id = fp_id;
      fp.dataset_id = dataset_id;
      fp.x_m = x;
      fp.y_m = y;
      fp.floor = static_cast<int>(floor);
      order.push_back(fp_id);
    } else {
      if (fp.dataset_id != dataset_id || fp.x_m != x || fp.y_m != y ||
          fp.floor != floor)
        throw ParseError("line " + std::to_string(line_no) +
                         ": fingerprint " + fp_id +
                         " redefined with different metadata");
    }
    if (!fp.readings.emplace(mac, rssi).second)
      throw ParseError("line " + std::to_string(line_no) + ": duplicate (" +
                       fp_id + ", " + mac + ") reading");
  }

  std::vector<Fingerprint> out;
  out.reserve(order.size());
  for (const auto& id : order) {
    Fingerprint& fp = by_id[id];
    const std::size_t before = fp.readings.size();
    fp.readings = clip_readings(fp.readings, cfg);
    local.readings_clipped += before - fp.readings.size();
    if (fp.readings.empty()) {
      ++local.fingerprints_dropped_empty;
      continue;
    }
    out.push_back(std::move(fp));
  }
  if (out.empty()) throw EmptyDataset(path + ": no usable fingerprints");
  if (stats) *stats = local;
  return out;
}

void save_fingerprints(const std::vector<Fingerprint>& fps,
                       const std::string& path) {
  std::ofstream out = open_output(path);
  out << kFingerprintCsvHeader << "\n";
  for (const auto& fp : fps) {
    for (const auto& [mac, rssi] : fp.readings) {
      out << fp.dataset_id << ',' << fp.id << ',' << format_double(fp.x_m)
          << ',' << format_double(fp.y_m) << ',' << fp.floor << ',' << mac
          << ',' << format_double(rssi) << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// Splits

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "train";
}

Split split_from_string(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "validation") return Split::Validation;
  if (name == "test") return Split::Test;
  throw InvalidConfig("unknown split \"" + std::string(name) +
                      "\" (expected train|validation|test)");
}

Split SplitAssignment::at(const PairRecord& p) const {
  const auto it = by_key.find(key_for(p));
  if (it == by_key.end())
    throw DataError("pair " + key_for(p) + " is not covered by the split");
  return it->second;
}

std::array<std::size_t, 3> SplitAssignment::counts() const {
  std::array<std::size_t, 3> c{};
  for (const auto& [_, s] : by_key) ++c[static_cast<std::size_t>(s)];
  return c;
}

std::vector<PairRecord> SplitAssignment::subset(
    const std::vector<PairRecord>& pairs, Split which) const {
  std::vector<PairRecord> out;
  for (const auto& p : pairs)
    if (at(p) == which) out.push_back(p);
  return out;
}

SplitAssignment split_pool(const std::vector<PairRecord>& pairs,
                           const std::array<double, 3>& fractions,
                           std::uint64_t seed) {
  double sum = 0.0;
  for (double f : fractions) {
    if (f < 0.0) throw InvalidConfig("split fractions must be non-negative");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvalidConfig("split fractions must sum to 1");

  // Rank keys by a seeded hash so the assignment depends only on
  // (keys, fractions, seed), not on input order.
  std::vector<std::pair<std::uint64_t, std::string>> ranked;
  ranked.reserve(pairs.size());
  for (const auto& p : pairs) {
    std::string key = SplitAssignment::key_for(p);
    const std::uint64_t h =
        splitmix64(fnv1a64(key.data(), key.size()) ^ seed);
    ranked.emplace_back(h, std::move(key));
  }
  std::sort(ranked.begin(), ranked.end());
  for (std::size_t i = 1; i < ranked.size(); ++i)
    if (ranked[i].second == ranked[i - 1].second)
      throw DataError("duplicate pair key " + ranked[i].second);

  // Largest-remainder apportionment keeps every count within one pair of
  // n * fraction.
  const std::size_t n = ranked.size();
  std::array<std::size_t, 3> count{};
  std::array<double, 3> frac_part{};
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    const double exact = static_cast<double>(n) * fractions[s];
    count[s] = static_cast<std::size_t>(std::floor(exact));
    frac_part[s] = exact - std::floor(exact);
    assigned += count[s];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return frac_part[a] > frac_part[b] || (frac_part[a] == frac_part[b] && a < b);
  });
  for (std::size_t r = 0; assigned < n; ++r, ++assigned) ++count[order[r % 3]];

  SplitAssignment out;
  std::size_t pos = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t i = 0; i < count[s]; ++i, ++pos)
      out.by_key.emplace(std::move(ranked[pos].second),
                         static_cast<Split>(s));
  }
  return out;
}

void save_split(const SplitAssignment& split, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "pair_key,split\n";
  for (const auto& [key, s] : split.by_key)
    out << key << ',' << to_string(s) << "\n";
}

SplitAssignment load_split(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "pair_key,split")
    throw ParseError(path + ": expected header \"pair_key,split\"");
  SplitAssignment out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2)
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 2 columns");
    if (!out.by_key.emplace(fields[0], split_from_string(fields[1])).second)
      throw ParseError("line " + std::to_string(line_no) +
                       ": duplicate pair key " + fields[0]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pairs

void export_pairs(const std::vector<PairRecord>& pairs,
                  const std::string& path) {
  std::ofstream out = open_output(path);
  out << pairs_csv_header() << "\n";
  for (const auto& p : pairs) {
    out << p.dataset_id << ',' << p.fp_a_id << ',' << p.fp_b_id;
    for (double f : p.features) out << ',' << format_double(f);
    out << ',' << format_double(p.label_m) << "\n";
  }
}

std::vector<PairRecord> import_pairs(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != pairs_csv_header())
    throw ParseError(path + ": unexpected pair-file header");
  std::vector<PairRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3 + kFeatureCount + 1)
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(3 + kFeatureCount + 1) + " columns");
    PairRecord p;
    p.dataset_id = fields[0];
    p.fp_a_id = fields[1];
    p.fp_b_id = fields[2];
    for (std::size_t j = 0; j < kFeatureCount; ++j)
      p.features[j] = parse_double_strict(fields[3 + j], "feature", line_no);
    p.label_m =
        parse_double_strict(fields[3 + kFeatureCount], "label_m", line_no);
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Models

namespace {

constexpr const char* kModelFormat = "wifidist-model";
constexpr int kModelSchemaVersion = 1;

json standardizer_to_json(const Standardizer& s) {
  return json{{"mean", s.mean}, {"scale", s.scale}};
}

Standardizer standardizer_from_json(const json& j) {
  Standardizer s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.scale = j.at("scale").get<std::vector<double>>();
  return s;
}

json tree_to_json(const CartModel& tree) {
  json nodes = json::array();
  for (const TreeNode& nd : tree.nodes) {
    nodes.push_back(json{{"feature", nd.feature},
                         {"threshold", nd.threshold},
                         {"value", nd.value},
                         {"left", nd.left},
                         {"right", nd.right},
                         {"gain", nd.gain}});
  }
  return json{{"nodes", nodes}};
}

CartModel tree_from_json(const json& j) {
  CartModel tree;
  for (const auto& n : j.at("nodes")) {
    TreeNode nd;
    nd.feature = n.at("feature").get<int>();
    nd.threshold = n.at("threshold").get<double>();
    nd.value = n.at("value").get<double>();
    nd.left = n.at("left").get<int>();
    nd.right = n.at("right").get<int>();
    nd.gain = n.at("gain").get<double>();
    tree.nodes.push_back(nd);
  }
  if (tree.nodes.empty()) throw CorruptModel("tree with no nodes");
  return tree;
}

json state_to_json(const TrainedModel& model) {
  if (const auto* lin = std::get_if<LinearModel>(&model.impl)) {
    return json{{"standardizer", standardizer_to_json(lin->standardizer)},
                {"weights", lin->weights},
                {"intercept", lin->intercept},
                {"min_norm_fallback", lin->min_norm_fallback}};
  }
  if (const auto* knn = std::get_if<KnnModel>(&model.impl)) {
    return json{{"standardizer", standardizer_to_json(knn->standardizer)},
                {"k", knn->k},
                {"inverse_distance", knn->inverse_distance},
                {"rows", knn->train_x.rows},
                {"cols", knn->train_x.cols},
                {"train_x", knn->train_x.data},
                {"train_y", knn->train_y}};
  }
  if (const auto* cart = std::get_if<CartModel>(&model.impl)) {
    return tree_to_json(*cart);
  }
  const auto& gbt = std::get<GbtModel>(model.impl);
  json trees = json::array();
  for (const CartModel& t : gbt.trees) trees.push_back(tree_to_json(t));
  return json{{"base", gbt.base},
              {"learning_rate", gbt.learning_rate},
              {"trees", trees}};
}

void state_from_json(const json& j, TrainedModel& model) {
  switch (model.kind) {
    case LearnerKind::Ols:
    case LearnerKind::Ridge: {
      LinearModel lin;
      lin.standardizer = standardizer_from_json(j.at("standardizer"));
      lin.weights = j.at("weights").get<std::vector<double>>();
      lin.intercept = j.at("intercept").get<double>();
      lin.min_norm_fallback = j.at("min_norm_fallback").get<bool>();
      model.impl = std::move(lin);
      break;
    }
    case LearnerKind::Knn: {
      KnnModel knn;
      knn.standardizer = standardizer_from_json(j.at("standardizer"));
      knn.k = j.at("k").get<int>();
      knn.inverse_distance = j.at("inverse_distance").get<bool>();
      knn.train_x.rows = j.at("rows").get<std::size_t>();
      knn.train_x.cols = j.at("cols").get<std::size_t>();
      knn.train_x.data = j.at("train_x").get<std::vector<double>>();
      if (knn.train_x.data.size() != knn.train_x.rows * knn.train_x.cols)
        throw CorruptModel("knn matrix size mismatch");
      knn.train_y = j.at("train_y").get<std::vector<double>>();
      if (knn.train_y.size() != knn.train_x.rows)
        throw CorruptModel("knn target size mismatch");
      model.impl = std::move(knn);
      break;
    }
    case LearnerKind::Cart:
      model.impl = tree_from_json(j);
      break;
    case LearnerKind::Gbt: {
      GbtModel gbt;
      gbt.base = j.at("base").get<double>();
      gbt.learning_rate = j.at("learning_rate").get<double>();
      for (const auto& t : j.at("trees")) gbt.trees.push_back(tree_from_json(t));
      model.impl = std::move(gbt);
      break;
    }
  }
}

}  // namespace

void save_model(const TrainedModel& model, const std::string& path) {
  json j;
  j["format"] = kModelFormat;
  j["schema_version"] = kModelSchemaVersion;
  j["kind"] = std::string(to_string(model.kind));
  j["feature_mask"] = model.mask.to_string();
  if (std::isfinite(model.train_filter_m))
    j["train_filter_m"] = model.train_filter_m;
  else
    j["train_filter_m"] = nullptr;  // trained unfiltered
  j["train_time_s"] = model.train_time_s;
  j["hyperparameters"] = model.hyper;
  j["state"] = state_to_json(model);

  std::ofstream out = open_output(path);
  out << j.dump(2) << "\n";
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in = open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CorruptModel(path + ": " + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != kModelFormat)
      throw VersionMismatch(path + ": not a wifidist model file");
    if (j.at("schema_version").get<int>() != kModelSchemaVersion)
      throw VersionMismatch(path + ": unsupported schema version " +
                            j.at("schema_version").dump());
    TrainedModel model;
    model.kind = learner_kind_from_string(j.at("kind").get<std::string>());
    model.mask = FeatureMask::parse(j.at("feature_mask").get<std::string>());
    const auto& tf = j.at("train_filter_m");
    model.train_filter_m = tf.is_null()
                               ? std::numeric_limits<double>::infinity()
                               : tf.get<double>();
    model.train_time_s = j.value("train_time_s", 0.0);
    model.hyper = j.at("hyperparameters").get<Hyperparams>();
    state_from_json(j.at("state"), model);
    return model;
  } catch (const VersionMismatch&) {
    throw;
  } catch (const json::exception& e) {
    throw CorruptModel(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Manifests

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  const std::uint64_t h = fnv1a64(bytes.data(), bytes.size());
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(h));
  return hex;
}

void save_manifest(const std::vector<DatasetManifest>& entries,
                   const std::string& path) {
  std::ofstream out = open_output(path);
  out << "dataset_id,role,source_path,fingerprint_count,checksum\n";
  for (const auto& e : entries) {
    out << e.dataset_id << ','
        << (e.role == DatasetManifest::Role::Pool ? "pool" : "isolated") << ','
        << e.source_path << ',' << e.fingerprint_count << ',' << e.checksum
        << "\n";
  }
}

std::vector<DatasetManifest> load_manifest(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) ||
      strip_cr(line) != "dataset_id,role,source_path,fingerprint_count,checksum")
    throw ParseError(path + ": unexpected manifest header");
  std::vector<DatasetManifest> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 5)
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 5 columns");
    DatasetManifest e;
    e.dataset_id = fields[0];
    if (fields[1] == "pool")
      e.role = DatasetManifest::Role::Pool;
    else if (fields[1] == "isolated")
      e.role = DatasetManifest::Role::Isolated;
    else
      throw ParseError("line " + std::to_string(line_no) + ": bad role \"" +
                       fields[1] + "\"");
    e.source_path = fields[2];
    e.fingerprint_count = static_cast<std::size_t>(
        parse_int_strict(fields[3], "fingerprint_count", line_no));
    e.checksum = fields[4];
    out.push_back(std::move(e));
  }
  // Isolated datasets must never share an id with pool datasets.
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t k = i + 1; k < out.size(); ++k)
      if (out[i].dataset_id == out[k].dataset_id)
        throw ParseError("duplicate dataset_id " + out[i].dataset_id +
                         " in manifest");
  return out;
}

}  // namespace wifidist
