#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wifidist/learners.hpp"
#include "wifidist/types.hpp"

namespace wifidist {

struct EvalConfig {
  double beta = 0.05;
  double proximity_threshold_m = 4.0;
  std::optional<double> restrict_to_max_label_m;  // evaluate only labels <= m
  int repeats = 10;       // re-runs for stochastic models; deterministic
                          // models are evaluated once and report std 0
  double histogram_bin_m = 1.0;

  void validate() const;
};

struct Confusion {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  long total() const { return tp + fp + fn + tn; }
};

/// Actual-positive iff y < threshold, predicted-positive iff yhat <
/// threshold; strict inequality on both sides.
Confusion classify_proximity(std::span<const double> y,
                             std::span<const double> yhat, double threshold_m);

/// TP/(TP+FP); 0 when the denominator is zero (see EvalReport flags).
double precision(const Confusion& c);
/// TP/(TP+FN); 0 when the denominator is zero.
double recall(const Confusion& c);

/// Precision-weighted F-score: (1+beta^2) P R / (beta^2 P + R).
/// Returns 0 when both P and R are zero.
double f_beta(double precision, double recall, double beta);

double mse(std::span<const double> y, std::span<const double> yhat);
double rmse(std::span<const double> y, std::span<const double> yhat);
double mae(std::span<const double> y, std::span<const double> yhat);

struct EvalReport {
  std::string model_tag;
  std::string dataset_tag;
  std::size_t n_pairs = 0;
  double precision = 0.0;
  double recall = 0.0;
  bool precision_defined = true;  // false when TP+FP == 0
  bool recall_defined = true;     // false when TP+FN == 0
  double f_beta_mean = 0.0;
  double f_beta_std = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  double mse = 0.0;
  double train_time_s = 0.0;
  double test_time_s = 0.0;
  Confusion counts;
  std::optional<double> restricted_to_m;
  double histogram_bin_m = 1.0;
  // (actual bin, predicted bin) -> count, bin = floor(value / bin width)
  std::map<std::pair<int, int>, long> histogram;
};

/// Runs the model over the pair set (restricted to labels <=
/// restrict_to_max_label_m when configured) and fills a full report.
EvalReport evaluate(const TrainedModel& model,
                    const std::vector<PairRecord>& pairs,
                    const EvalConfig& cfg);

/// 2-D histogram as CSV (actual_bin_m, predicted_bin_m, count), bins by
/// lower edge, sorted.
void export_histogram(const EvalReport& report, const std::string& path);

/// Aggregated report table: one row per (dataset, model) with the
/// MAE/RMSE/MSE/Prec/Recall/F_beta columns plus timings.
void export_report_csv(const std::vector<EvalReport>& reports,
                       const std::string& path);
std::vector<std::string> report_csv_rows(const EvalReport& report);
extern const char* const kReportCsvHeader;

}  // namespace wifidist
