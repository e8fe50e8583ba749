#include <charconv>
#include <json.hpp>

#include "kpca/metrics.hpp"

namespace kpca {
namespace {

using Json = nlohmann::ordered_json;

Json histogram_json(const Histogram& h) {
  Json j;
  j["low"] = h.low;
  j["high"] = h.high;
  j["counts"] = h.counts;
  return j;
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  Json j;
  j["method"] = report.method;
  j["n_ind"] = report.n_ind;
  j["threshold_s"] = report.threshold_s;
  j["average_fpr95"] = report.average_fpr95;
  j["average_auroc"] = report.average_auroc;
  if (report.ind_oracle_mae) j["ind_oracle_mae"] = *report.ind_oracle_mae;
  Json per = Json::array();
  for (const auto& r : report.per_ood) {
    Json o;
    o["name"] = r.name;
    o["fpr95"] = r.fpr95;
    o["auroc"] = r.auroc;
    o["n_ood"] = r.n_ood;
    if (r.oracle_mae) o["oracle_mae"] = *r.oracle_mae;
    if (r.histogram) o["histogram"] = histogram_json(*r.histogram);
    per.push_back(std::move(o));
  }
  j["per_ood"] = std::move(per);
  if (report.ind_histogram) j["ind_histogram"] = histogram_json(*report.ind_histogram);
  return j.dump(2) + "\n";
}

std::string scores_to_csv(std::span<const ScoredSet> sets,
                          std::span<const std::vector<std::size_t>> rows) {
  std::string out = "dataset,row,score\n";
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const auto& set = sets[s];
    for (std::size_t i = 0; i < set.scores.size(); ++i) {
      out += set.name;
      out += ',';
      out += std::to_string(s < rows.size() ? rows[s][i] : i);
      out += ',';
      append_double(out, set.scores[i]);
      out += '\n';
    }
  }
  return out;
}

}  // namespace kpca
