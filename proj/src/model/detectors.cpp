#include "kpca/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "kpca/error.hpp"
#include "kpca/linalg.hpp"
#include "kpca/simd.hpp"

namespace kpca {
namespace {

constexpr std::size_t kMedianPairs = 1000;
constexpr std::size_t kChunkRows = 2048;
// Above this many mapped entries the training rows are streamed into a
// scatter accumulator instead of being materialized.
constexpr std::size_t kMaterializeLimit = std::size_t{1} << 24;

using RowMapper = std::function<Matrix(const Matrix&)>;

bool is_kpca(Method m) { return m == Method::kKpcaRff || m == Method::kKpcaNys; }

void require_rows(const Matrix& m, std::size_t min_rows, const char* what) {
  if (m.rows() < min_rows) {
    fail(ErrorKind::kData, std::string(what) + ": need at least " + std::to_string(min_rows) +
                               " rows, got " + std::to_string(m.rows()));
  }
}

SubspaceModel fit_mapped_subspace(const Matrix& rows, const RowMapper& mapper,
                                  std::size_t mapped_dim, const SubspaceOptions& options) {
  if (rows.rows() < mapped_dim || rows.rows() * mapped_dim <= kMaterializeLimit) {
    return fit_subspace(mapper(rows), options);
  }
  CovarianceAccumulator acc(mapped_dim);
  for (std::size_t first = 0; first < rows.rows(); first += kChunkRows) {
    const std::size_t count = std::min(kChunkRows, rows.rows() - first);
    acc.add(mapper(rows.slice_rows(first, count)));
  }
  return fit_subspace(acc, options);
}

std::vector<double> mapped_errors(const SubspaceModel& subspace, const Matrix& rows,
                                  const RowMapper& mapper) {
  std::vector<double> out;
  out.reserve(rows.rows());
  for (std::size_t first = 0; first < rows.rows(); first += kChunkRows) {
    const std::size_t count = std::min(kChunkRows, rows.rows() - first);
    const auto errors = reconstruction_error(subspace, mapper(rows.slice_rows(first, count)));
    out.insert(out.end(), errors.begin(), errors.end());
  }
  return out;
}

RowMapper mapper_for(const DetectorModel& model) {
  if (model.rff) {
    const RffMap* map = &*model.rff;
    return [map](const Matrix& rows) { return apply_rff(*map, rows); };
  }
  if (model.nystrom) {
    const NystromMap* map = &*model.nystrom;
    return [map](const Matrix& rows) { return map->apply(rows); };
  }
  fail(ErrorKind::kFormat, "kpca model has no feature map");
}

void check_logits(const Matrix& logits, const char* who) {
  if (logits.empty()) fail(ErrorKind::kUsage, std::string(who) + " requires logits");
}

std::vector<double> score_logits(const DetectorModel& model, const Matrix& logits) {
  check_logits(logits, to_string(model.method).data());
  std::vector<double> out(logits.rows());
  switch (model.method) {
    case Method::kEnergy: return energy_scores(logits, model.temperature);
    case Method::kMaxLogit:
      for (std::size_t i = 0; i < logits.rows(); ++i) {
        auto r = logits.row(i);
        out[i] = *std::max_element(r.begin(), r.end());
      }
      return out;
    case Method::kMsp:
      for (std::size_t i = 0; i < logits.rows(); ++i) {
        auto r = logits.row(i);
        const double peak = *std::max_element(r.begin(), r.end());
        double sum = 0.0;
        for (double f : r) sum += std::exp(f - peak);
        out[i] = 1.0 / sum;
      }
      return out;
    default: break;
  }
  fail(ErrorKind::kParameter, "not a logit method");
}

std::vector<double> score_features(const DetectorModel& model, const Matrix& raw) {
  if (raw.cols() != model.dim) {
    fail(ErrorKind::kShape, "feature dimension " + std::to_string(raw.cols()) +
                                " does not match the model dimension " + std::to_string(model.dim));
  }
  const Matrix features = model.clip_thresholds.empty() ? raw : clip_features(model, raw);
  std::vector<double> scores;
  switch (model.method) {
    case Method::kPca:
      scores = reconstruction_error(*model.subspace, features);
      break;
    case Method::kKpcaRff:
    case Method::kKpcaNys: {
      const Matrix rows = model.kernel.cosine_prefix ? cos_map_rows(features) : features;
      scores = mapped_errors(*model.subspace, rows, mapper_for(model));
      break;
    }
    case Method::kKnn: {
      const Matrix queries = cos_map_rows(features);
      const auto& k = simd::active();
      scores.resize(queries.rows());
      for (std::size_t i = 0; i < queries.rows(); ++i) {
        double best = INFINITY;
        const double* q = queries.row(i).data();
        for (std::size_t j = 0; j < model.knn_bank.rows(); ++j) {
          best = std::min(best, k.squared_distance(q, model.knn_bank.row(j).data(), queries.cols()));
        }
        scores[i] = std::sqrt(std::max(0.0, best));
      }
      break;
    }
    default: fail(ErrorKind::kParameter, "not a feature method");
  }
  for (double& s : scores) s = -s;
  return scores;
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kPca: return "pca";
    case Method::kKpcaRff: return "kpca-rff";
    case Method::kKpcaNys: return "kpca-nys";
    case Method::kKnn: return "knn";
    case Method::kMsp: return "msp";
    case Method::kMaxLogit: return "maxlogit";
    case Method::kEnergy: return "energy";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::kPca, Method::kKpcaRff, Method::kKpcaNys, Method::kKnn, Method::kMsp,
                   Method::kMaxLogit, Method::kEnergy}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

bool uses_logits_for_scoring(Method method) {
  return method == Method::kMsp || method == Method::kMaxLogit || method == Method::kEnergy;
}

bool uses_cosine_map(const DetectorModel& model) {
  return model.method == Method::kKnn || (is_kpca(model.method) && model.kernel.cosine_prefix);
}

double default_evr(Method method) {
  switch (method) {
    case Method::kKpcaRff: return kDefaultEvrRff;
    case Method::kKpcaNys: return kDefaultEvrNystrom;
    default: return kDefaultEvrPca;
  }
}

double median_heuristic_gamma(const Matrix& rows, KernelBase base, SeededRng& rng) {
  require_rows(rows, 2, "median heuristic");
  const auto& k = simd::active();
  std::vector<double> d(kMedianPairs);
  for (double& v : d) {
    const std::size_t i = rng.uniform_index(rows.rows());
    std::size_t j = rng.uniform_index(rows.rows() - 1);
    if (j >= i) ++j;
    const double* a = rows.row(i).data();
    const double* b = rows.row(j).data();
    v = base == KernelBase::kLaplacian ? k.l1_distance(a, b, rows.cols())
                                       : k.squared_distance(a, b, rows.cols());
  }
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  double median = *mid;
  if (d.size() % 2 == 0) median = 0.5 * (median + *std::max_element(d.begin(), mid));
  if (!(median > 0.0)) {
    fail(ErrorKind::kDegenerateInput, "median heuristic: training rows have zero median distance");
  }
  return base == KernelBase::kLaplacian ? 1.0 / median : 1.0 / (2.0 * median);
}

std::vector<double> clip_thresholds(const Matrix& features, double percentile) {
  if (!(percentile > 0.0 && percentile <= 100.0)) {
    fail(ErrorKind::kParameter, "clip percentile must be in (0, 100], got " + std::to_string(percentile));
  }
  require_rows(features, 1, "clip thresholds");
  const std::size_t n = features.rows();
  std::size_t rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::vector<double> thresholds(features.cols());
  std::vector<double> column(n);
  for (std::size_t j = 0; j < features.cols(); ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = features(i, j);
    const auto nth = column.begin() + static_cast<std::ptrdiff_t>(rank - 1);
    std::nth_element(column.begin(), nth, column.end());
    thresholds[j] = *nth;
  }
  return thresholds;
}

Matrix clip_features(const Matrix& features, std::span<const double> thresholds) {
  if (thresholds.size() != features.cols()) {
    fail(ErrorKind::kShape, "clip_features: " + std::to_string(thresholds.size()) +
                                " thresholds for " + std::to_string(features.cols()) + " columns");
  }
  Matrix out = features;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = std::min(r[j], thresholds[j]);
  }
  return out;
}

Matrix clip_features(const DetectorModel& model, const Matrix& features) {
  if (model.clip_thresholds.empty()) fail(ErrorKind::kUsage, "model carries no clip thresholds");
  return clip_features(features, model.clip_thresholds);
}

DetectorModel fit_detector(const DetectorConfig& config, const Matrix& train_features,
                           const Matrix& train_logits) {
  DetectorModel model;
  model.method = config.method;
  model.seed = config.seed;
  model.temperature = config.temperature;
  if (!(config.temperature > 0.0)) {
    fail(ErrorKind::kParameter, "temperature must be positive, got " + std::to_string(config.temperature));
  }

  if (uses_logits_for_scoring(config.method)) {
    check_logits(train_logits, to_string(config.method).data());
    model.dim = train_features.empty() ? 0 : train_features.cols();
    model.n_train = train_logits.rows();
    return model;
  }

  require_rows(train_features, 2, "training features");
  if (!train_logits.empty() && train_logits.rows() != train_features.rows()) {
    fail(ErrorKind::kShape, "training logits have " + std::to_string(train_logits.rows()) +
                                " rows, features have " + std::to_string(train_features.rows()));
  }
  model.dim = train_features.cols();
  model.n_train = train_features.rows();

  Matrix features = train_features;
  if (config.clip_percentile) {
    model.clip_percentile = config.clip_percentile;
    model.clip_thresholds = clip_thresholds(train_features, *config.clip_percentile);
    features = clip_features(features, model.clip_thresholds);
  }

  SubspaceOptions options;
  options.evr_threshold = config.evr_threshold.value_or(default_evr(config.method));
  options.fixed_q = config.fixed_q;

  const SeededRng root(config.seed);
  switch (config.method) {
    case Method::kPca:
      model.subspace = fit_subspace(features, options);
      return model;
    case Method::kKnn:
      model.knn_bank = cos_map_rows(features);
      return model;
    case Method::kKpcaRff:
    case Method::kKpcaNys:
      break;
    default: fail(ErrorKind::kParameter, "unsupported method");
  }

  model.kernel = config.kernel;
  const Matrix rows = model.kernel.cosine_prefix ? cos_map_rows(features) : features;
  if (model.kernel.uses_gamma()) {
    if (config.gamma) {
      model.kernel.gamma = *config.gamma;
    } else {
      SeededRng gamma_rng = root.fork(1);
      model.kernel.gamma = median_heuristic_gamma(rows, model.kernel.base, gamma_rng);
    }
  }
  model.kernel.validate();

  if (config.method == Method::kKpcaRff) {
    SeededRng rff_rng = root.fork(2);
    model.rff = fit_rff(model.kernel, rows.cols(), config.num_features, rff_rng);
  } else {
    std::vector<double> energies;
    std::optional<std::span<const double>> energy_view;
    if (config.sampling != LandmarkSampling::kUniform) {
      if (train_logits.empty()) {
        fail(ErrorKind::kUsage, std::string(to_string(config.sampling)) +
                                    " landmark sampling requires training logits");
      }
      energies = energy_scores(train_logits, config.temperature);
      energy_view = energies;
    }
    SeededRng landmark_rng = root.fork(3);
    const auto indices = select_landmarks(rows.rows(), energy_view, config.num_landmarks,
                                          config.sampling, landmark_rng);
    model.landmark_indices.assign(indices.begin(), indices.end());
    model.nystrom = fit_nystrom(model.kernel, rows.select_rows(indices), config.sampling);
  }
  const RowMapper mapper = mapper_for(model);
  const std::size_t mapped_dim = model.rff ? model.rff->output_dim() : model.nystrom->output_dim();
  model.subspace = fit_mapped_subspace(rows, mapper, mapped_dim, options);
  return model;
}

std::vector<double> score(const DetectorModel& model, const Matrix& features, const Matrix& logits) {
  if (uses_logits_for_scoring(model.method)) return score_logits(model, logits);
  return score_features(model, features);
}

LenientScores score_lenient(const DetectorModel& model, const Matrix& features,
                            const Matrix& logits) {
  LenientScores out;
  if (uses_logits_for_scoring(model.method) || !uses_cosine_map(model)) {
    out.scores = score(model, features, logits);
    out.rows.resize(out.scores.size());
    for (std::size_t i = 0; i < out.rows.size(); ++i) out.rows[i] = i;
    return out;
  }
  if (features.cols() != model.dim) {
    fail(ErrorKind::kShape, "feature dimension " + std::to_string(features.cols()) +
                                " does not match the model dimension " + std::to_string(model.dim));
  }
  const Matrix clipped = model.clip_thresholds.empty() ? features : clip_features(model, features);
  for (std::size_t i = 0; i < features.rows(); ++i) {
    if (norm2(clipped.row(i)) > 0.0) {
      out.rows.push_back(i);
    } else {
      out.rejected.push_back({i, "zero vector has no direction"});
    }
  }
  if (!out.rows.empty()) out.scores = score(model, features.select_rows(out.rows), logits);
  return out;
}

}  // namespace kpca
