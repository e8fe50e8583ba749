#include "kpca/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kpca/error.hpp"

namespace kpca {
namespace {

void require_nonempty(std::span<const double> ind, std::span<const double> ood, const char* who) {
  if (ind.empty() || ood.empty()) {
    fail(ErrorKind::kData, std::string(who) + ": needs nonempty InD and OoD scores (got " +
                               std::to_string(ind.size()) + " and " + std::to_string(ood.size()) + ")");
  }
}

}  // namespace

FprResult fpr_at_95tpr(std::span<const double> ind_scores, std::span<const double> ood_scores) {
  require_nonempty(ind_scores, ood_scores, "fpr_at_95tpr");
  const std::size_t n = ind_scores.size();
  // ceil(0.05 n) in integers
  const std::size_t rank = std::max<std::size_t>(1, (5 * n + 99) / 100);
  std::vector<double> sorted(ind_scores.begin(), ind_scores.end());
  const auto nth = sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(sorted.begin(), nth, sorted.end());
  FprResult out;
  out.threshold = *nth;
  std::size_t above = 0;
  for (double s : ood_scores) above += s >= out.threshold ? 1 : 0;
  out.fpr = static_cast<double>(above) / static_cast<double>(ood_scores.size());
  return out;
}

double auroc(std::span<const double> ind_scores, std::span<const double> ood_scores) {
  require_nonempty(ind_scores, ood_scores, "auroc");
  std::vector<double> ood(ood_scores.begin(), ood_scores.end());
  std::sort(ood.begin(), ood.end());
  // Twice the win count keeps ties exact in integers.
  unsigned long long twice_wins = 0;
  for (double s : ind_scores) {
    const auto lo = std::lower_bound(ood.begin(), ood.end(), s);
    const auto hi = std::upper_bound(lo, ood.end(), s);
    twice_wins += 2 * static_cast<unsigned long long>(lo - ood.begin()) +
                  static_cast<unsigned long long>(hi - lo);
  }
  return static_cast<double>(twice_wins) /
         (2.0 * static_cast<double>(ind_scores.size()) * static_cast<double>(ood.size()));
}

double auroc_trapezoid(std::span<const double> ind_scores, std::span<const double> ood_scores) {
  require_nonempty(ind_scores, ood_scores, "auroc_trapezoid");
  struct Labeled {
    double score;
    bool ind;
  };
  std::vector<Labeled> all;
  all.reserve(ind_scores.size() + ood_scores.size());
  for (double s : ind_scores) all.push_back({s, true});
  for (double s : ood_scores) all.push_back({s, false});
  std::sort(all.begin(), all.end(), [](const Labeled& a, const Labeled& b) { return a.score > b.score; });

  const double n_pos = static_cast<double>(ind_scores.size());
  const double n_neg = static_cast<double>(ood_scores.size());
  double tp = 0.0, fp = 0.0, prev_tp = 0.0, prev_fp = 0.0, area = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    const double s = all[i].score;
    while (i < all.size() && all[i].score == s) {
      (all[i].ind ? tp : fp) += 1.0;
      ++i;
    }
    area += (fp - prev_fp) * (tp + prev_tp) * 0.5;
    prev_tp = tp;
    prev_fp = fp;
  }
  return area / (n_pos * n_neg);
}

Histogram histogram(std::span<const double> scores, double low, double high, std::size_t bins) {
  if (bins == 0) fail(ErrorKind::kParameter, "histogram needs at least one bin");
  Histogram h{low, high, std::vector<std::size_t>(bins, 0)};
  const double width = (high - low) / static_cast<double>(bins);
  for (double s : scores) {
    std::size_t b = 0;
    if (width > 0.0) {
      const double pos = std::floor((s - low) / width);
      b = pos <= 0.0 ? 0 : std::min(bins - 1, static_cast<std::size_t>(pos));
    }
    ++h.counts[b];
  }
  return h;
}

EvalReport evaluate_scores(const std::string& method, std::span<const double> ind_scores,
                           std::span<const ScoredSet> ood, bool with_histograms) {
  if (ood.empty()) fail(ErrorKind::kUsage, "evaluation needs at least one OoD set");
  EvalReport report;
  report.method = method;
  report.n_ind = ind_scores.size();

  double low = INFINITY, high = -INFINITY;
  auto widen = [&](std::span<const double> s) {
    for (double v : s) {
      low = std::min(low, v);
      high = std::max(high, v);
    }
  };
  widen(ind_scores);
  for (const auto& set : ood) widen(set.scores);

  for (const auto& set : ood) {
    OodResult r;
    r.name = set.name;
    r.n_ood = set.scores.size();
    try {
      const FprResult fpr = fpr_at_95tpr(ind_scores, set.scores);
      report.threshold_s = fpr.threshold;
      r.fpr95 = fpr.fpr;
      r.auroc = auroc(ind_scores, set.scores);
    } catch (const Error& e) {
      throw Error(e.kind(), "OoD set '" + set.name + "': " + e.what());
    }
    if (with_histograms) r.histogram = histogram(set.scores, low, high, kHistogramBins);
    report.average_fpr95 += r.fpr95;
    report.average_auroc += r.auroc;
    report.per_ood.push_back(std::move(r));
  }
  report.average_fpr95 /= static_cast<double>(ood.size());
  report.average_auroc /= static_cast<double>(ood.size());
  if (with_histograms) report.ind_histogram = histogram(ind_scores, low, high, kHistogramBins);
  return report;
}

EvalReport evaluate(const DetectorModel& model, const DatasetBundle& bundle, bool with_histograms) {
  std::vector<double> ind;
  try {
    ind = score(model, bundle.ind_test, bundle.ind_test_logits);
  } catch (const Error& e) {
    throw Error(e.kind(), "InD test set: " + std::string(e.what()));
  }
  std::vector<ScoredSet> sets;
  for (const auto& set : bundle.ood_sets) {
    try {
      sets.push_back({set.name, score(model, set.features, set.logits)});
    } catch (const Error& e) {
      throw Error(e.kind(), "OoD set '" + set.name + "': " + e.what());
    }
  }
  return evaluate_scores(std::string(to_string(model.method)), ind, sets, with_histograms);
}

}  // namespace kpca
