#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpca/data_io.hpp"
#include "kpca/detectors.hpp"

namespace kpca {

struct FprResult {
  double fpr = 0.0;
  double threshold = 0.0;
};

/// Threshold s is the ceil(0.05 * n_ind)-th smallest InD score, so at least
/// 95% of InD scores are >= s; fpr is the share of OoD scores >= s.
FprResult fpr_at_95tpr(std::span<const double> ind_scores, std::span<const double> ood_scores);

/// Mann-Whitney form: (#(ind > ood) + 0.5 #(ind == ood)) / (n_ind n_ood).
double auroc(std::span<const double> ind_scores, std::span<const double> ood_scores);

/// Trapezoidal area under the ROC curve traced over distinct thresholds.
double auroc_trapezoid(std::span<const double> ind_scores, std::span<const double> ood_scores);

struct Histogram {
  double low = 0.0;
  double high = 0.0;
  std::vector<std::size_t> counts;
};

/// Equal-width bins over [low, high]; the top edge falls in the last bin.
Histogram histogram(std::span<const double> scores, double low, double high, std::size_t bins);

struct OodResult {
  std::string name;
  double fpr95 = 0.0;
  double auroc = 0.0;
  std::size_t n_ood = 0;
  std::optional<double> oracle_mae;
  std::optional<Histogram> histogram;
};

struct EvalReport {
  std::string method;
  std::size_t n_ind = 0;
  double threshold_s = 0.0;
  std::vector<OodResult> per_ood;
  double average_fpr95 = 0.0;
  double average_auroc = 0.0;
  std::optional<double> ind_oracle_mae;
  std::optional<Histogram> ind_histogram;
};

inline constexpr std::size_t kHistogramBins = 50;

struct ScoredSet {
  std::string name;
  std::vector<double> scores;
};

/// Builds the report from precomputed scores. Histograms share one range
/// spanning every score when `with_histograms` is set.
EvalReport evaluate_scores(const std::string& method, std::span<const double> ind_scores,
                           std::span<const ScoredSet> ood, bool with_histograms = false);

/// Scores bundle.ind_test and every OoD set once with the model.
EvalReport evaluate(const DetectorModel& model, const DatasetBundle& bundle,
                    bool with_histograms = false);

/// JSON with fixed key order.
std::string report_to_json(const EvalReport& report);

/// CSV rows "dataset,row,score" with a header line.
std::string scores_to_csv(std::span<const ScoredSet> sets,
                          std::span<const std::vector<std::size_t>> rows = {});

}  // namespace kpca
