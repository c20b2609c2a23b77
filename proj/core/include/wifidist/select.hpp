#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wifidist/eval.hpp"
#include "wifidist/types.hpp"

namespace wifidist {

/// One vote per (feature, importance method). The four voters:
///   chi_square      chi-square of decile-binned feature vs proximity class
///   cart_importance impurity-reduction importance of a regression tree
///   l1_selection    nonzero coefficient in an L1-regularized linear fit
///   rfe_ols         survives recursive feature elimination down to 7
struct VoteTable {
  static constexpr std::size_t kMethodCount = 4;
  static constexpr std::array<std::string_view, kMethodCount> kMethods = {
      "chi_square", "cart_importance", "l1_selection", "rfe_ols"};

  std::array<std::array<bool, kMethodCount>, kFeatureCount> votes{};
  std::array<int, kFeatureCount> totals{};
};

/// Scores every feature with the four methods above. The proximity class is
/// label < eval_cfg.proximity_threshold_m. Throws DegenerateLabels when the
/// training pairs contain a single class.
VoteTable importance_votes(const std::vector<PairRecord>& train_pairs,
                           const EvalConfig& eval_cfg);

void export_vote_table_csv(const VoteTable& table, const std::string& path);

struct GAConfig {
  int population_size = 32;
  int generations = 40;
  int tournament_size = 3;
  double crossover_rate = 0.9;          // uniform crossover
  double mutation_rate = 1.0 / kFeatureCount;  // per-bit flip
  int elitism = 2;
  std::uint64_t seed = 1;
  double train_filter_m = 25.0;  // fitness trains on labels <= this

  void validate() const;
};

struct GaResult {
  FeatureMask best_mask;
  double best_fitness = 0.0;
  std::vector<double> history;  // per-generation population-best fitness
};

/// Wrapper feature selection by a binary-chromosome GA. Fitness of a mask is
/// the validation F_beta of an OLS model trained on the filtered training
/// pairs. Elitism makes the history non-decreasing; results are
/// bit-reproducible per seed. All-zero chromosomes are repaired by setting
/// one random bit.
GaResult ga_select(const std::vector<PairRecord>& train_pairs,
                   const std::vector<PairRecord>& val_pairs,
                   const GAConfig& cfg, const EvalConfig& eval_cfg);

void export_fitness_history_csv(const std::vector<double>& history,
                                const std::string& path);

}  // namespace wifidist
