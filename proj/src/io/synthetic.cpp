#include <algorithm>
#include <cmath>
#include <numbers>

#include "kpca/data_io.hpp"
#include "kpca/error.hpp"
#include "kpca/rng.hpp"

namespace kpca {
namespace {

constexpr double kLogitScale = 5.0;

struct Labeled {
  Matrix features;
  std::vector<std::size_t> labels;
};

std::vector<double> random_unit(SeededRng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

void add_noise(SeededRng& rng, std::span<double> row, double sigma) {
  for (double& x : row) x += sigma * rng.normal();
}

// Gaussian blobs around unit-norm class centers. The OoD centers are pushed
// off the InD directions and shrunk; both effects scale with `displacement`.
struct Clusters {
  static constexpr double kSigma = 0.15;

  std::vector<std::vector<double>> centers;
  std::vector<std::vector<double>> ood_centers;

  Clusters(SeededRng& rng, const SyntheticOptions& o) {
    const double shrink = 1.0 - 0.2 * std::min(o.displacement, 1.0);
    for (std::size_t k = 0; k < o.num_classes; ++k) {
      centers.push_back(random_unit(rng, o.dim));
      const auto push = random_unit(rng, o.dim);
      std::vector<double> c(o.dim);
      double norm = 0.0;
      for (std::size_t j = 0; j < o.dim; ++j) {
        c[j] = centers.back()[j] + o.displacement * push[j];
        norm += c[j] * c[j];
      }
      norm = std::sqrt(norm);
      for (double& x : c) x *= shrink / norm;
      ood_centers.push_back(std::move(c));
    }
  }

  Labeled draw(SeededRng& rng, std::size_t n, bool ood) const {
    const auto& source = ood ? ood_centers : centers;
    Labeled out{Matrix(n, source.front().size()), std::vector<std::size_t>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = rng.uniform_index(source.size());
      out.labels[i] = k;
      auto row = out.features.row(i);
      std::copy(source[k].begin(), source[k].end(), row.begin());
      add_noise(rng, row, kSigma);
    }
    return out;
  }
};

// A rolled sheet r = t at angle t, offset from the origin along e0. OoD points
// sit at r = t + pi, halfway between consecutive layers.
struct SwissRoll {
  static constexpr double kTMin = 1.5 * std::numbers::pi;
  static constexpr double kTMax = 4.5 * std::numbers::pi;
  static constexpr double kHeight = 10.0;
  static constexpr double kScale = 1.0 / 15.0;
  static constexpr double kOffset = 2.0;
  static constexpr double kSigma = 0.01;

  std::size_t num_classes;

  Labeled draw(SeededRng& rng, std::size_t n, std::size_t dim, bool ood) const {
    Labeled out{Matrix(n, dim), std::vector<std::size_t>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform();
      const double t = kTMin + (kTMax - kTMin) * u;
      const double h = kHeight * rng.uniform();
      const double r = ood ? t + std::numbers::pi : t;
      const double coords[4] = {kOffset, kScale * r * std::cos(t), kScale * h, kScale * r * std::sin(t)};
      auto row = out.features.row(i);
      for (std::size_t j = 0; j < std::min<std::size_t>(4, dim); ++j) row[j] = coords[j];
      add_noise(rng, row, kSigma);
      out.labels[i] = std::min(num_classes - 1, static_cast<std::size_t>(u * static_cast<double>(num_classes)));
    }
    return out;
  }
};

// InD: R e0 + a c_k + noise. OoD: R e0 + (mean class offset) + B (c_i - c_j) / sqrt 2,
// which stays inside the affine span of the InD principal directions (so raw
// PCA sees only noise) while pointing away from every InD direction, with
// norms about three times larger.
struct ShiftedNorms {
  static constexpr double kRadiusLow = 0.5;
  static constexpr double kRadiusHigh = 1.5;
  static constexpr double kClassOffset = 0.6;
  static constexpr double kOodSpread = 3.4;
  static constexpr double kSigma = 0.05;

  std::size_t num_classes;

  Labeled draw(SeededRng& rng, std::size_t n, std::size_t dim, bool ood) const {
    Labeled out{Matrix(n, dim), std::vector<std::size_t>(n)};
    auto axis = [&](std::size_t k) { return 1 + k % (dim - 1); };
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = rng.uniform_index(num_classes);
      out.labels[i] = k;
      auto row = out.features.row(i);
      row[0] = kRadiusLow + (kRadiusHigh - kRadiusLow) * rng.uniform();
      if (!ood) {
        row[axis(k)] += kClassOffset;
      } else {
        std::size_t j = rng.uniform_index(num_classes - 1);
        if (j >= k) ++j;
        for (std::size_t c = 0; c < num_classes; ++c) {
          row[axis(c)] += kClassOffset / static_cast<double>(num_classes);
        }
        row[axis(k)] += kOodSpread / std::numbers::sqrt2;
        row[axis(j)] -= kOodSpread / std::numbers::sqrt2;
      }
      add_noise(rng, row, kSigma);
    }
    return out;
  }
};

// Nearest-class-mean linear classifier fitted on the training split:
// f_j(z) = s (z . m_j - |m_j|^2 / 2).
class MeanClassifier {
 public:
  MeanClassifier(const Labeled& train, std::size_t num_classes)
      : means_(num_classes, train.features.cols()), bias_(num_classes, 0.0) {
    std::vector<double> counts(num_classes, 0.0);
    for (std::size_t i = 0; i < train.features.rows(); ++i) {
      const std::size_t k = train.labels[i];
      counts[k] += 1.0;
      auto src = train.features.row(i);
      auto dst = means_.row(k);
      for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
    }
    for (std::size_t k = 0; k < num_classes; ++k) {
      auto m = means_.row(k);
      if (counts[k] > 0.0) {
        for (double& v : m) v /= counts[k];
      }
      double sq = 0.0;
      for (double v : m) sq += v * v;
      bias_[k] = -0.5 * sq;
    }
  }

  Matrix logits(const Matrix& features) const {
    Matrix out(features.rows(), means_.rows());
    for (std::size_t i = 0; i < features.rows(); ++i) {
      for (std::size_t k = 0; k < means_.rows(); ++k) {
        double s = bias_[k];
        for (std::size_t j = 0; j < features.cols(); ++j) s += features(i, j) * means_(k, j);
        out(i, k) = kLogitScale * s;
      }
    }
    return out;
  }

 private:
  Matrix means_;
  std::vector<double> bias_;
};

}  // namespace

std::string_view to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kClusters: return "clusters";
    case SyntheticKind::kSwissRoll: return "swiss-roll";
    case SyntheticKind::kShiftedNorms: return "shifted-norms";
  }
  return "unknown";
}

SyntheticKind parse_synthetic_kind(std::string_view name) {
  if (name == "clusters") return SyntheticKind::kClusters;
  if (name == "swiss-roll") return SyntheticKind::kSwissRoll;
  if (name == "shifted-norms") return SyntheticKind::kShiftedNorms;
  fail(ErrorKind::kUsage, "unknown synthetic kind '" + std::string(name) +
                              "' (expected clusters, swiss-roll or shifted-norms)");
}

DatasetBundle gen_synthetic(const SyntheticOptions& o) {
  if (o.n_ind < 2 || o.n_ood < 2) fail(ErrorKind::kParameter, "synthetic counts must be >= 2");
  if (o.dim < 2) fail(ErrorKind::kParameter, "synthetic dimension must be >= 2");
  if (o.num_classes < 2) fail(ErrorKind::kParameter, "synthetic class count must be >= 2");
  if (!(o.displacement >= 0.0)) fail(ErrorKind::kParameter, "displacement must be >= 0");

  SeededRng root(o.seed);
  SeededRng setup = root.fork(0);
  SeededRng train_rng = root.fork(1);
  SeededRng test_rng = root.fork(2);
  SeededRng ood_rng = root.fork(3);
  const std::size_t n_test = std::max<std::size_t>(2, o.n_ind / 2);

  Labeled train, test, ood;
  switch (o.kind) {
    case SyntheticKind::kClusters: {
      const Clusters gen(setup, o);
      train = gen.draw(train_rng, o.n_ind, false);
      test = gen.draw(test_rng, n_test, false);
      ood = gen.draw(ood_rng, o.n_ood, true);
      break;
    }
    case SyntheticKind::kSwissRoll: {
      const SwissRoll gen{o.num_classes};
      train = gen.draw(train_rng, o.n_ind, o.dim, false);
      test = gen.draw(test_rng, n_test, o.dim, false);
      ood = gen.draw(ood_rng, o.n_ood, o.dim, true);
      break;
    }
    case SyntheticKind::kShiftedNorms: {
      const ShiftedNorms gen{o.num_classes};
      train = gen.draw(train_rng, o.n_ind, o.dim, false);
      test = gen.draw(test_rng, n_test, o.dim, false);
      ood = gen.draw(ood_rng, o.n_ood, o.dim, true);
      break;
    }
  }

  train.features = round_to_f32(std::move(train.features));
  test.features = round_to_f32(std::move(test.features));
  ood.features = round_to_f32(std::move(ood.features));
  const MeanClassifier clf(train, o.num_classes);

  DatasetBundle bundle;
  bundle.ind_train_logits = round_to_f32(clf.logits(train.features));
  bundle.ind_test_logits = round_to_f32(clf.logits(test.features));
  bundle.ind_train = std::move(train.features);
  bundle.ind_test = std::move(test.features);
  NamedSet set{"ood", std::move(ood.features), {}};
  set.logits = round_to_f32(clf.logits(set.features));
  bundle.ood_sets.push_back(std::move(set));
  return bundle;
}

}  // namespace kpca
