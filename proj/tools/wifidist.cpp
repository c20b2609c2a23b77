// wifidist command-line driver. Each subcommand consumes the files written
// by the previous stage, so partial pipelines can be re-run and inspected:
//
//   synth -> ingest -> pairs -> filter -> split -> vote / select-ga
//         -> train / tune -> evaluate -> report
//
// Exit codes: 0 ok, 2 usage error, 3 data error, 4 internal error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wifidist/eval.hpp"
#include "wifidist/io.hpp"
#include "wifidist/learners.hpp"
#include "wifidist/pairing.hpp"
#include "wifidist/select.hpp"
#include "wifidist/synth.hpp"
#include "wifidist/tuning.hpp"
#include "wifidist/types.hpp"

namespace {

using namespace wifidist;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

FeatureMask resolve_mask(const std::string& mask_bits,
                         const std::string& mask_file) {
  if (!mask_bits.empty() && !mask_file.empty())
    throw InvalidConfig("--mask and --mask-file are mutually exclusive");
  if (!mask_bits.empty()) return FeatureMask::parse(mask_bits);
  if (!mask_file.empty()) {
    std::ifstream in(mask_file);
    std::string line;
    if (!in || !std::getline(in, line))
      throw ParseError("cannot read mask from " + mask_file);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return FeatureMask::parse(line);
  }
  return FeatureMask::all_on();
}

Hyperparams parse_hyper(const std::vector<std::string>& kvs) {
  Hyperparams hyper;
  for (const auto& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw InvalidConfig("bad --hyper \"" + kv + "\" (expected key=value)");
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
      hyper[key] = v;
    } catch (const std::exception&) {
      throw InvalidConfig("bad --hyper value \"" + val + "\" for " + key);
    }
  }
  return hyper;
}

std::array<double, 3> parse_fractions(const std::string& s) {
  std::array<double, 3> f{};
  int parsed = std::sscanf(s.c_str(), "%lf,%lf,%lf", &f[0], &f[1], &f[2]);
  if (parsed != 3)
    throw InvalidConfig("bad --fractions \"" + s +
                        "\" (expected three comma-separated numbers)");
  return f;
}

struct SynthArgs {
  std::string out;
  VenueSpec spec;
  std::string placement = "grid";
};

void add_synth(CLI::App& app, SynthArgs& a) {
  auto* cmd = app.add_subcommand("synth",
                                 "Generate a synthetic path-loss venue");
  cmd->set_config("--config");
  cmd->add_option("--out", a.out, "Output fingerprint CSV")->required();
  cmd->add_option("--fingerprints", a.spec.fingerprint_count,
                  "Number of fingerprints");
  cmd->add_option("--aps", a.spec.ap_count, "Number of access points");
  cmd->add_option("--width", a.spec.width_m, "Venue width (m)");
  cmd->add_option("--height", a.spec.height_m, "Venue height (m)");
  cmd->add_option("--sigma", a.spec.shadowing_sigma_dbm,
                  "Shadowing sigma (dB)");
  cmd->add_option("--tx-power", a.spec.tx_power_dbm,
                  "TX power at 1 m (dBm)");
  cmd->add_option("--path-loss", a.spec.path_loss_exponent,
                  "Path-loss exponent");
  cmd->add_option("--sensitivity", a.spec.sensitivity_dbm,
                  "Sensitivity floor (dBm)");
  cmd->add_option("--placement", a.placement, "AP placement: grid|random")
      ->check(CLI::IsMember({"grid", "random"}));
  cmd->add_option("--dataset-id", a.spec.dataset_id, "Dataset id");
  cmd->add_option("--seed", a.spec.seed, "Random seed");
  cmd->callback([&a]() {
    a.spec.ap_placement = a.placement == "random"
                              ? VenueSpec::ApPlacement::Random
                              : VenueSpec::ApPlacement::Grid;
    const auto fps = generate_venue(a.spec);
    save_fingerprints(fps, a.out);
    std::cout << "synth: wrote " << fps.size() << " fingerprints to " << a.out
              << "\n";
  });
}

struct IngestArgs {
  std::vector<std::string> data;
  std::string out;
  std::string manifest;
  std::string role = "pool";
};

void add_ingest(CLI::App& app, IngestArgs& a) {
  auto* cmd = app.add_subcommand(
      "ingest", "Validate, clip and merge fingerprint CSV files");
  cmd->set_config("--config");
  cmd->add_option("--data", a.data, "Input fingerprint CSV (repeatable)")
      ->required();
  cmd->add_option("--out", a.out, "Merged canonical CSV")->required();
  cmd->add_option("--manifest", a.manifest, "Manifest CSV to write");
  cmd->add_option("--role", a.role, "Role recorded in the manifest")
      ->check(CLI::IsMember({"pool", "isolated"}));
  cmd->callback([&a]() {
    PipelineConfig cfg;
    std::vector<Fingerprint> merged;
    std::vector<DatasetManifest> manifest;
    std::map<std::string, std::string> seen_ids;  // fp id -> source file
    for (const auto& path : a.data) {
      LoadStats stats;
      auto fps = load_fingerprints(path, cfg, &stats);
      std::map<std::string, std::size_t> per_dataset;
      for (auto& fp : fps) {
        const auto [it, inserted] = seen_ids.emplace(fp.id, path);
        if (!inserted)
          throw ParseError("fingerprint id " + fp.id + " appears in both " +
                           it->second + " and " + path);
        ++per_dataset[fp.dataset_id];
        merged.push_back(std::move(fp));
      }
      const std::string checksum = file_checksum(path);
      for (const auto& [dataset_id, count] : per_dataset) {
        DatasetManifest e;
        e.dataset_id = dataset_id;
        e.role = a.role == "isolated" ? DatasetManifest::Role::Isolated
                                      : DatasetManifest::Role::Pool;
        e.source_path = path;
        e.fingerprint_count = count;
        e.checksum = checksum;
        manifest.push_back(std::move(e));
      }
      std::cout << "ingest: " << path << ": " << fps.size()
                << " fingerprints, " << stats.readings_clipped
                << " readings clipped, " << stats.fingerprints_dropped_empty
                << " fingerprints dropped\n";
    }
    save_fingerprints(merged, a.out);
    if (!a.manifest.empty()) save_manifest(manifest, a.manifest);
    std::cout << "ingest: wrote " << merged.size() << " fingerprints to "
              << a.out << "\n";
  });
}

struct PairsArgs {
  std::string fingerprints;
  std::string out;
  bool cross_floor = false;
  PipelineConfig cfg;
};

void add_pairs(CLI::App& app, PairsArgs& a) {
  auto* cmd = app.add_subcommand(
      "pairs", "Extract 14-feature records for every eligible pair");
  cmd->set_config("--config");
  cmd->add_option("--fingerprints", a.fingerprints, "Fingerprint CSV")
      ->required();
  cmd->add_option("--out", a.out, "Output pair CSV")->required();
  cmd->add_flag("--cross-floor", a.cross_floor,
                "Also pair fingerprints on different floors");
  cmd->add_option("--minkowski-p", a.cfg.minkowski_p, "Minkowski order");
  cmd->add_option("--wminkowski-p", a.cfg.wminkowski_p,
                  "Weighted Minkowski order");
  cmd->callback([&a]() {
    a.cfg.same_floor_only = !a.cross_floor;
    a.cfg.validate();
    const auto fps = load_fingerprints(a.fingerprints, a.cfg);
    const auto pairs = generate_pairs(fps, a.cfg);
    export_pairs(pairs, a.out);
    std::cout << "pairs: " << pairs.size() << " eligible pairs from "
              << fps.size() << " fingerprints -> " << a.out << "\n";
  });
}

struct FilterArgs {
  std::string pairs;
  std::string out;
  double max_m = 25.0;
};

void add_filter(CLI::App& app, FilterArgs& a) {
  auto* cmd = app.add_subcommand(
      "filter", "Keep only pairs with label <= --max-m");
  cmd->set_config("--config");
  cmd->add_option("--pairs", a.pairs, "Input pair CSV")->required();
  cmd->add_option("--max-m", a.max_m, "Label threshold (m), inclusive")
      ->required();
  cmd->add_option("--out", a.out, "Output pair CSV")->required();
  cmd->callback([&a]() {
    if (!(a.max_m > 0.0)) throw InvalidConfig("--max-m must be positive");
    const auto pairs = import_pairs(a.pairs);
    const auto kept = filter_by_label(pairs, a.max_m);
    export_pairs(kept, a.out);
    std::cout << "filter: kept " << kept.size() << " of " << pairs.size()
              << " pairs (label <= " << a.max_m << " m) -> " << a.out << "\n";
  });
}

struct SplitArgs {
  std::string pairs;
  std::string out;
  std::string fractions = "0.7,0.15,0.15";
  std::uint64_t seed = 1;
};

void add_split(CLI::App& app, SplitArgs& a) {
  auto* cmd = app.add_subcommand(
      "split", "Partition pairs into train/validation/test");
  cmd->set_config("--config");
  cmd->add_option("--pairs", a.pairs, "Input pair CSV")->required();
  cmd->add_option("--out", a.out, "Output split CSV")->required();
  cmd->add_option("--fractions", a.fractions, "train,validation,test");
  cmd->add_option("--seed", a.seed, "Random seed");
  cmd->callback([&a]() {
    const auto pairs = import_pairs(a.pairs);
    const auto split = split_pool(pairs, parse_fractions(a.fractions), a.seed);
    save_split(split, a.out);
    const auto c = split.counts();
    std::cout << "split: " << c[0] << " train / " << c[1] << " validation / "
              << c[2] << " test -> " << a.out << "\n";
  });
}

struct VoteArgs {
  std::string pairs;
  std::string out;
  std::string split;
  std::string use = "train";
  double threshold_m = 4.0;
  double beta = 0.05;
};

void add_vote(CLI::App& app, VoteArgs& a) {
  auto* cmd = app.add_subcommand(
      "vote", "Score features with the four importance voters");
  cmd->set_config("--config");
  cmd->add_option("--pairs", a.pairs, "Input pair CSV")->required();
  cmd->add_option("--out", a.out, "Vote table CSV")->required();
  cmd->add_option("--split", a.split, "Optional split CSV");
  cmd->add_option("--use", a.use, "Split subset to vote on")
      ->check(CLI::IsMember({"train", "validation", "test"}));
  cmd->add_option("--threshold-m", a.threshold_m, "Proximity threshold (m)");
  cmd->add_option("--beta", a.beta, "F-beta weight");
  cmd->callback([&a]() {
    auto pairs = import_pairs(a.pairs);
    if (!a.split.empty())
      pairs = load_split(a.split).subset(pairs, split_from_string(a.use));
    EvalConfig eval_cfg;
    eval_cfg.proximity_threshold_m = a.threshold_m;
    eval_cfg.beta = a.beta;
    const VoteTable table = importance_votes(pairs, eval_cfg);
    export_vote_table_csv(table, a.out);
    std::cout << "vote: scored " << pairs.size() << " pairs -> " << a.out
              << "\n";
  });
}

struct SelectGaArgs {
  std::string pairs;
  std::string split;
  std::string out_mask;
  std::string history;
  GAConfig ga;
  double threshold_m = 4.0;
  double beta = 0.05;
};

void add_select_ga(CLI::App& app, SelectGaArgs& a) {
  auto* cmd = app.add_subcommand(
      "select-ga", "Genetic-algorithm wrapper feature selection");
  cmd->set_config("--config");
  cmd->add_option("--pairs", a.pairs, "Input pair CSV")->required();
  cmd->add_option("--split", a.split, "Split CSV")->required();
  cmd->add_option("--out-mask", a.out_mask, "Output mask file")->required();
  cmd->add_option("--history", a.history, "Fitness history CSV");
  cmd->add_option("--population", a.ga.population_size, "Population size");
  cmd->add_option("--generations", a.ga.generations, "Generations");
  cmd->add_option("--tournament", a.ga.tournament_size, "Tournament size");
  cmd->add_option("--crossover-rate", a.ga.crossover_rate, "Crossover rate");
  cmd->add_option("--mutation-rate", a.ga.mutation_rate,
                  "Per-bit mutation rate");
  cmd->add_option("--elitism", a.ga.elitism, "Elites kept per generation");
  cmd->add_option("--max-m", a.ga.train_filter_m,
                  "Training label filter for fitness (m)");
  cmd->add_option("--threshold-m", a.threshold_m, "Proximity threshold (m)");
  cmd->add_option("--beta", a.beta, "F-beta weight");
  cmd->add_option("--seed", a.ga.seed, "Random seed");
  cmd->callback([&a]() {
    const auto pairs = import_pairs(a.pairs);
    const auto split = load_split(a.split);
    const auto train = split.subset(pairs, Split::Train);
    const auto val = split.subset(pairs, Split::Validation);
    EvalConfig eval_cfg;
    eval_cfg.proximity_threshold_m = a.threshold_m;
    eval_cfg.beta = a.beta;
    const GaResult result = ga_select(train, val, a.ga, eval_cfg);
    std::ofstream out(a.out_mask);
    if (!out) throw DataError("cannot open " + a.out_mask + " for writing");
    out << result.best_mask.to_string() << "\n";
    if (!a.history.empty())
      export_fitness_history_csv(result.history, a.history);
    std::cout << "select-ga: best mask " << result.best_mask.to_string()
              << " (F_beta " << result.best_fitness << ", "
              << result.best_mask.count() << " features) -> " << a.out_mask
              << "\n";
  });
}

struct TrainArgs {
  std::string pairs;
  std::string split;
  std::string use = "train";
  std::string learner;
  std::string out;
  std::string mask_bits;
  std::string mask_file;
  double max_m = 25.0;
  bool unfiltered = false;
  std::vector<std::string> hyper;
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto* cmd = app.add_subcommand("train", "Fit one learner");
  cmd->set_config("--config");
  cmd->add_option("--pairs", a.pairs, "Input pair CSV")->required();
  cmd->add_option("--split", a.split,
                  "Optional split CSV (trains on the --use subset)");
  cmd->add_option("--use", a.use, "Split subset to train on")
      ->check(CLI::IsMember({"train", "validation", "test"}));
  cmd->add_option("--learner", a.learner, "ols|ridge|knn|cart|gbt")
      ->required();
  cmd->add_option("--out", a.out, "Output model file")->required();
  cmd->add_option("--mask", a.mask_bits, "Feature mask bit string");
  cmd->add_option("--mask-file", a.mask_file, "File holding the mask");
  cmd->add_option("--max-m", a.max_m, "Training label filter (m)");
  cmd->add_flag("--unfiltered", a.unfiltered,
                "Train on all labels (no distance filter)");
  cmd->add_option("--hyper", a.hyper, "Hyperparameter key=value (repeatable)");
  cmd->callback([&a]() {
    auto pairs = import_pairs(a.pairs);
    if (!a.split.empty())
      pairs = load_split(a.split).subset(pairs, split_from_string(a.use));
    const double filter =
        a.unfiltered ? std::numeric_limits<double>::infinity() : a.max_m;
    const TrainedModel model =
        train_model(learner_kind_from_string(a.learner), pairs,
                    resolve_mask(a.mask_bits, a.mask_file),
                    parse_hyper(a.hyper), filter);
    save_model(model, a.out);
    std::cout << "train: " << a.learner << " fitted in "
              << model.train_time_s << " s -> " << a.out << "\n";
  });
}

struct TuneArgs {
  std::string pairs;
  std::string split;
  std::string learner;
  std::string out;
  std::string trials;
  std::string mask_bits;
  std::string mask_file;
  double max_m = 25.0;
  bool unfiltered = false;
  double threshold_m = 4.0;
  double beta = 0.05;
  HyperSpace space;
};

void add_tune(CLI::App& app, TuneArgs& a) {
  auto* cmd = app.add_subcommand(
      "tune", "Random-search hyperparameters against validation F-beta");
  cmd->set_config("--config");
  cmd->add_option("--pairs", a.pairs, "Input pair CSV")->required();
  cmd->add_option("--split", a.split, "Split CSV")->required();
  cmd->add_option("--learner", a.learner, "ols|ridge|knn|cart|gbt")
      ->required();
  cmd->add_option("--out", a.out, "Output model file")->required();
  cmd->add_option("--trials", a.trials, "Optional trials CSV");
  cmd->add_option("--mask", a.mask_bits, "Feature mask bit string");
  cmd->add_option("--mask-file", a.mask_file, "File holding the mask");
  cmd->add_option("--draws", a.space.n_draws, "Number of sampled configs");
  cmd->add_option("--max-m", a.max_m, "Training label filter (m)");
  cmd->add_flag("--unfiltered", a.unfiltered,
                "Train on all labels (no distance filter)");
  cmd->add_option("--threshold-m", a.threshold_m, "Proximity threshold (m)");
  cmd->add_option("--beta", a.beta, "F-beta weight");
  cmd->add_option("--seed", a.space.seed, "Random seed");
  cmd->callback([&a]() {
    const auto pairs = import_pairs(a.pairs);
    const auto split = load_split(a.split);
    const auto train = split.subset(pairs, Split::Train);
    const auto val = split.subset(pairs, Split::Validation);
    EvalConfig eval_cfg;
    eval_cfg.proximity_threshold_m = a.threshold_m;
    eval_cfg.beta = a.beta;
    const double filter =
        a.unfiltered ? std::numeric_limits<double>::infinity() : a.max_m;
    const RandomSearchResult result = random_search(
        learner_kind_from_string(a.learner), a.space, train, val,
        resolve_mask(a.mask_bits, a.mask_file), eval_cfg, filter);
    save_model(result.model, a.out);
    if (!a.trials.empty()) {
      std::ofstream out(a.trials);
      if (!out) throw DataError("cannot open " + a.trials + " for writing");
      out << "draw,f_beta,hyperparameters\n";
      for (std::size_t t = 0; t < result.trials.size(); ++t) {
        out << t << ',' << result.trials[t].score << ',';
        bool first = true;
        for (const auto& [k, v] : result.trials[t].hyper) {
          out << (first ? "" : ";") << k << '=' << format_double(v);
          first = false;
        }
        out << "\n";
      }
    }
    std::cout << "tune: best draw " << result.best_draw << " (F_beta "
              << result.score << ") -> " << a.out << "\n";
  });
}

struct EvaluateArgs {
  std::string model;
  std::string pairs;
  std::string out;
  std::string split;
  std::string use = "test";
  std::string histogram;
  std::string dataset_tag;
  std::optional<double> restrict_m;
  double threshold_m = 4.0;
  double beta = 0.05;
  int repeats = 10;
};

void add_evaluate(CLI::App& app, EvaluateArgs& a) {
  auto* cmd = app.add_subcommand("evaluate", "Score a model on a pair set");
  cmd->set_config("--config");
  cmd->add_option("--model", a.model, "Model file")->required();
  cmd->add_option("--pairs", a.pairs, "Pair CSV to evaluate on")->required();
  cmd->add_option("--out", a.out, "Report CSV")->required();
  cmd->add_option("--split", a.split,
                  "Optional split CSV (evaluates the --use subset)");
  cmd->add_option("--use", a.use, "Split subset to evaluate")
      ->check(CLI::IsMember({"train", "validation", "test"}));
  cmd->add_option("--restrict", a.restrict_m,
                  "Evaluate only pairs with label <= this (m)");
  cmd->add_option("--histogram", a.histogram,
                  "Optional actual-vs-predicted histogram CSV");
  cmd->add_option("--dataset-tag", a.dataset_tag, "Dataset name for the report");
  cmd->add_option("--threshold-m", a.threshold_m, "Proximity threshold (m)");
  cmd->add_option("--beta", a.beta, "F-beta weight");
  cmd->add_option("--repeats", a.repeats, "Evaluation repeats");
  cmd->callback([&a]() {
    const TrainedModel model = load_model(a.model);
    auto pairs = import_pairs(a.pairs);
    if (!a.split.empty())
      pairs = load_split(a.split).subset(pairs, split_from_string(a.use));
    EvalConfig cfg;
    cfg.proximity_threshold_m = a.threshold_m;
    cfg.beta = a.beta;
    cfg.repeats = a.repeats;
    cfg.restrict_to_max_label_m = a.restrict_m;
    EvalReport report = evaluate(model, pairs, cfg);
    report.dataset_tag = !a.dataset_tag.empty()
                             ? a.dataset_tag
                             : (pairs.empty() ? "pairs" : pairs[0].dataset_id);
    export_report_csv({report}, a.out);
    if (!a.histogram.empty()) export_histogram(report, a.histogram);
    std::cout << "evaluate: " << report.model_tag << " on "
              << report.dataset_tag << ": MAE " << report.mae << " RMSE "
              << report.rmse << " F_beta " << report.f_beta_mean << " ("
              << report.n_pairs << " pairs) -> " << a.out << "\n";
  });
}

struct ReportArgs {
  std::vector<std::string> in;
  std::string out;
};

void add_report(CLI::App& app, ReportArgs& a) {
  auto* cmd = app.add_subcommand(
      "report", "Merge evaluation reports into one table");
  cmd->set_config("--config");
  cmd->add_option("--in", a.in, "Report CSV (repeatable)")->required();
  cmd->add_option("--out", a.out, "Merged CSV")->required();
  cmd->callback([&a]() {
    std::vector<std::string> rows;
    for (const auto& path : a.in) {
      std::ifstream in(path);
      if (!in) throw ParseError("cannot open " + path);
      std::string line;
      if (!std::getline(in, line) ||
          (line != kReportCsvHeader &&
           line != std::string(kReportCsvHeader) + "\r"))
        throw ParseError(path + ": unexpected report header");
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) rows.push_back(line);
      }
    }
    std::ofstream out(a.out);
    if (!out) throw DataError("cannot open " + a.out + " for writing");
    out << kReportCsvHeader << "\n";
    for (const auto& row : rows) out << row << "\n";
    std::cout << "report: merged " << rows.size() << " rows from "
              << a.in.size() << " files -> " << a.out << "\n";
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WiFi RSSI fingerprint pair distance estimation toolkit"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  IngestArgs ingest_args;
  PairsArgs pairs_args;
  FilterArgs filter_args;
  SplitArgs split_args;
  VoteArgs vote_args;
  SelectGaArgs select_ga_args;
  TrainArgs train_args;
  TuneArgs tune_args;
  EvaluateArgs evaluate_args;
  ReportArgs report_args;

  add_synth(app, synth_args);
  add_ingest(app, ingest_args);
  add_pairs(app, pairs_args);
  add_filter(app, filter_args);
  add_split(app, split_args);
  add_vote(app, vote_args);
  add_select_ga(app, select_ga_args);
  add_train(app, train_args);
  add_tune(app, tune_args);
  add_evaluate(app, evaluate_args);
  add_report(app, report_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "wifidist: usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "wifidist: data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "wifidist: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
