#include "wifidist/eval.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "wifidist/pairing.hpp"

namespace wifidist {

void EvalConfig::validate() const {
  if (!(beta > 0.0)) throw InvalidConfig("beta must be positive");
  if (!(proximity_threshold_m > 0.0))
    throw InvalidConfig("proximity threshold must be positive");
  if (repeats < 1) throw InvalidConfig("repeats must be >= 1");
  if (!(histogram_bin_m > 0.0))
    throw InvalidConfig("histogram bin width must be positive");
  if (restrict_to_max_label_m && !(*restrict_to_max_label_m > 0.0))
    throw InvalidConfig("restriction threshold must be positive");
}

Confusion classify_proximity(std::span<const double> y,
                             std::span<const double> yhat,
                             double threshold_m) {
  if (y.size() != yhat.size())
    throw LengthMismatch("label and prediction lengths differ");
  Confusion c;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool actual = y[i] < threshold_m;
    const bool predicted = yhat[i] < threshold_m;
    if (actual && predicted)
      ++c.tp;
    else if (!actual && predicted)
      ++c.fp;
    else if (actual && !predicted)
      ++c.fn;
    else
      ++c.tn;
  }
  return c;
}

double precision(const Confusion& c) {
  const long den = c.tp + c.fp;
  return den > 0 ? static_cast<double>(c.tp) / static_cast<double>(den) : 0.0;
}

double recall(const Confusion& c) {
  const long den = c.tp + c.fn;
  return den > 0 ? static_cast<double>(c.tp) / static_cast<double>(den) : 0.0;
}

double f_beta(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double den = b2 * precision + recall;
  if (den <= 0.0) return 0.0;
  return (1.0 + b2) * precision * recall / den;
}

double mse(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size())
    throw LengthMismatch("label and prediction lengths differ");
  if (y.empty()) throw LengthMismatch("mse of empty vectors");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - yhat[i];
    s += d * d;
  }
  return s / static_cast<double>(y.size());
}

double rmse(std::span<const double> y, std::span<const double> yhat) {
  return std::sqrt(mse(y, yhat));
}

double mae(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size())
    throw LengthMismatch("label and prediction lengths differ");
  if (y.empty()) throw LengthMismatch("mae of empty vectors");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
  return s / static_cast<double>(y.size());
}

EvalReport evaluate(const TrainedModel& model,
                    const std::vector<PairRecord>& pairs,
                    const EvalConfig& cfg) {
  cfg.validate();
  const std::vector<PairRecord>* eval_set = &pairs;
  std::vector<PairRecord> restricted;
  if (cfg.restrict_to_max_label_m) {
    restricted = filter_by_label(pairs, *cfg.restrict_to_max_label_m);
    eval_set = &restricted;
  }
  if (eval_set->empty())
    throw EmptyEvalSet("no pairs left to evaluate" +
                       std::string(cfg.restrict_to_max_label_m
                                       ? " after the label restriction"
                                       : ""));

  const std::vector<double> y = labels(*eval_set);

  EvalReport report;
  report.model_tag = std::string(to_string(model.kind));
  report.restricted_to_m = cfg.restrict_to_max_label_m;
  report.n_pairs = eval_set->size();
  report.histogram_bin_m = cfg.histogram_bin_m;
  report.train_time_s = model.train_time_s;

  const int runs = model.stochastic() ? cfg.repeats : 1;
  std::vector<double> fbetas;
  std::vector<double> yhat;
  double test_time = 0.0;
  for (int r = 0; r < runs; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    yhat = model.predict_pairs(*eval_set);
    test_time +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const Confusion c = classify_proximity(y, yhat, cfg.proximity_threshold_m);
    fbetas.push_back(f_beta(precision(c), recall(c), cfg.beta));
  }
  report.test_time_s = test_time / static_cast<double>(runs);

  const Confusion c = classify_proximity(y, yhat, cfg.proximity_threshold_m);
  report.counts = c;
  report.precision = precision(c);
  report.recall = recall(c);
  report.precision_defined = (c.tp + c.fp) > 0;
  report.recall_defined = (c.tp + c.fn) > 0;
  report.rmse = rmse(y, yhat);
  report.mae = mae(y, yhat);
  report.mse = mse(y, yhat);

  double fmean = 0.0;
  for (double f : fbetas) fmean += f;
  fmean /= static_cast<double>(fbetas.size());
  double fvar = 0.0;
  for (double f : fbetas) fvar += (f - fmean) * (f - fmean);
  fvar /= static_cast<double>(fbetas.size());
  report.f_beta_mean = fmean;
  report.f_beta_std = std::sqrt(fvar);

  for (std::size_t i = 0; i < y.size(); ++i) {
    const int ab = static_cast<int>(std::floor(y[i] / cfg.histogram_bin_m));
    const int pb = static_cast<int>(std::floor(yhat[i] / cfg.histogram_bin_m));
    ++report.histogram[{ab, pb}];
  }
  return report;
}

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

const char* const kReportCsvHeader =
    "dataset,model,n_pairs,MAE,RMSE,MSE,Prec,Recall,F_beta,F_beta_std,"
    "Train-t,Test-t";

std::vector<std::string> report_csv_rows(const EvalReport& r) {
  std::string row = r.dataset_tag + "," + r.model_tag + "," +
                    std::to_string(r.n_pairs) + "," + fixed6(r.mae) + "," +
                    fixed6(r.rmse) + "," + fixed6(r.mse) + "," +
                    fixed6(r.precision) + "," + fixed6(r.recall) + "," +
                    fixed6(r.f_beta_mean) + "," + fixed6(r.f_beta_std) + "," +
                    fixed6(r.train_time_s) + "," + fixed6(r.test_time_s);
  return {row};
}

void export_report_csv(const std::vector<EvalReport>& reports,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << kReportCsvHeader << "\n";
  for (const auto& r : reports)
    for (const auto& row : report_csv_rows(r)) out << row << "\n";
}

void export_histogram(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << "actual_bin_m,predicted_bin_m,count\n";
  for (const auto& [bins, count] : report.histogram) {
    out << bins.first * report.histogram_bin_m << ","
        << bins.second * report.histogram_bin_m << "," << count << "\n";
  }
}

}  // namespace wifidist
