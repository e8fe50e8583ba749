#include "kpca/approx_maps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kpca/error.hpp"
#include "kpca/linalg.hpp"
#include "kpca/simd.hpp"

namespace kpca {
namespace {

constexpr std::size_t kApplyChunk = 1024;

void check_dim(std::size_t expected, std::size_t got, const char* who) {
  if (expected != got) {
    fail(ErrorKind::kShape, std::string(who) + ": input dimension " + std::to_string(got) +
                                ", map expects " + std::to_string(expected));
  }
}

}  // namespace

RffMap fit_rff(const KernelSpec& spec, std::size_t input_dim, std::size_t num_features,
               SeededRng& rng) {
  spec.validate();
  if (!spec.shift_invariant()) {
    fail(ErrorKind::kUnsupportedKernel,
         "random Fourier features need a shift-invariant kernel, got " + spec.name());
  }
  if (num_features == 0) fail(ErrorKind::kParameter, "fit_rff: number of features must be >= 1");
  if (input_dim == 0) fail(ErrorKind::kParameter, "fit_rff: input dimension must be >= 1");

  RffMap map;
  map.spec = spec;
  map.seed = rng.seed();
  map.omega = Matrix(num_features, input_dim);
  map.phase.resize(num_features);
  const double stddev = std::sqrt(2.0 * spec.gamma);
  for (double& w : map.omega.data()) {
    w = spec.base == KernelBase::kGaussian ? stddev * rng.normal() : rng.cauchy(spec.gamma);
  }
  for (double& u : map.phase) u = rng.uniform_angle();
  return map;
}

std::vector<double> apply_rff(const RffMap& map, std::span<const double> z) {
  check_dim(map.input_dim(), z.size(), "apply_rff");
  const auto& k = simd::active();
  const double scale = std::sqrt(2.0 / static_cast<double>(map.output_dim()));
  std::vector<double> out(map.output_dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = scale * std::cos(k.dot(map.omega.row(i).data(), z.data(), z.size()) + map.phase[i]);
  }
  return out;
}

Matrix apply_rff(const RffMap& map, const Matrix& rows) {
  check_dim(map.input_dim(), rows.cols(), "apply_rff");
  Matrix out = multiply_abt(rows, map.omega);
  const double scale = std::sqrt(2.0 / static_cast<double>(map.output_dim()));
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = scale * std::cos(r[j] + map.phase[j]);
  }
  return out;
}

std::vector<double> energy_scores(const Matrix& logits, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    fail(ErrorKind::kParameter, "energy temperature must be positive, got " +
                                    std::to_string(temperature));
  }
  if (logits.cols() == 0) fail(ErrorKind::kShape, "energy_scores: logits have no classes");
  std::vector<double> energies(logits.rows());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto r = logits.row(i);
    const double peak = *std::max_element(r.begin(), r.end()) / temperature;
    double sum = 0.0;
    for (double f : r) sum += std::exp(f / temperature - peak);
    energies[i] = temperature * (peak + std::log(sum));
  }
  return energies;
}

std::string_view to_string(LandmarkSampling sampling) {
  switch (sampling) {
    case LandmarkSampling::kLowEnergy: return "low-energy";
    case LandmarkSampling::kHighEnergy: return "high-energy";
    case LandmarkSampling::kUniform: return "uniform";
  }
  return "unknown";
}

std::optional<LandmarkSampling> parse_sampling(std::string_view name) {
  if (name == "low-energy") return LandmarkSampling::kLowEnergy;
  if (name == "high-energy") return LandmarkSampling::kHighEnergy;
  if (name == "uniform") return LandmarkSampling::kUniform;
  return std::nullopt;
}

std::vector<std::size_t> select_landmarks(std::size_t num_train,
                                          std::optional<std::span<const double>> energies,
                                          std::size_t num_landmarks, LandmarkSampling sampling,
                                          SeededRng& rng) {
  if (num_landmarks == 0) fail(ErrorKind::kParameter, "number of landmarks must be >= 1");
  if (num_landmarks > num_train) {
    fail(ErrorKind::kParameter, "cannot select " + std::to_string(num_landmarks) +
                                    " landmarks from " + std::to_string(num_train) +
                                    " training samples");
  }
  if (sampling == LandmarkSampling::kUniform) {
    return rng.sample_without_replacement(num_train, num_landmarks);
  }
  if (!energies) {
    fail(ErrorKind::kUsage, std::string(to_string(sampling)) + " sampling requires energies");
  }
  if (energies->size() != num_train) {
    fail(ErrorKind::kShape, "select_landmarks: " + std::to_string(energies->size()) +
                                " energies for " + std::to_string(num_train) + " samples");
  }
  const auto& e = *energies;
  std::vector<std::size_t> order(num_train);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const bool low = sampling == LandmarkSampling::kLowEnergy;
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(num_landmarks),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      if (e[a] != e[b]) return low ? e[a] < e[b] : e[a] > e[b];
                      return a < b;
                    });
  order.resize(num_landmarks);
  return order;
}

NystromMap::NystromMap(KernelSpec spec, LandmarkSampling sampling, Matrix landmarks,
                       Matrix basis, std::vector<double> eigenvalues)
    : spec_(spec),
      sampling_(sampling),
      landmarks_(std::move(landmarks)),
      basis_(std::move(basis)),
      eigenvalues_(std::move(eigenvalues)) {
  if (basis_.rows() != landmarks_.rows() || basis_.cols() != eigenvalues_.size()) {
    fail(ErrorKind::kShape, "NystromMap: basis is " + std::to_string(basis_.rows()) + "x" +
                                std::to_string(basis_.cols()) + " for " +
                                std::to_string(landmarks_.rows()) + " landmarks and " +
                                std::to_string(eigenvalues_.size()) + " eigenvalues");
  }
  whitening_ = basis_.transposed();
  for (std::size_t j = 0; j < eigenvalues_.size(); ++j) {
    if (!(eigenvalues_[j] > 0.0)) {
      fail(ErrorKind::kDegenerateKernel, "NystromMap: non-positive retained eigenvalue");
    }
    const double s = 1.0 / std::sqrt(eigenvalues_[j]);
    for (double& v : whitening_.row(j)) v *= s;
  }
}

std::vector<double> NystromMap::apply(std::span<const double> z) const {
  check_dim(input_dim(), z.size(), "apply_nystrom");
  const KernelSpec base = spec_.without_prefix();
  std::vector<double> kz(num_landmarks());
  for (std::size_t i = 0; i < kz.size(); ++i) kz[i] = kernel_eval(base, z, landmarks_.row(i));
  const auto& k = simd::active();
  std::vector<double> out(output_dim());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = k.dot(whitening_.row(j).data(), kz.data(), kz.size());
  }
  return out;
}

Matrix NystromMap::apply(const Matrix& rows) const {
  check_dim(input_dim(), rows.cols(), "apply_nystrom");
  const KernelSpec base = spec_.without_prefix();
  Matrix out(rows.rows(), output_dim());
  for (std::size_t first = 0; first < rows.rows(); first += kApplyChunk) {
    const std::size_t count = std::min(kApplyChunk, rows.rows() - first);
    const Matrix kz = kernel_matrix(base, rows.slice_rows(first, count), landmarks_);
    const Matrix mapped = multiply_abt(kz, whitening_);
    std::copy(mapped.data().begin(), mapped.data().end(),
              out.data().begin() + static_cast<std::ptrdiff_t>(first * output_dim()));
  }
  return out;
}

NystromMap fit_nystrom(const KernelSpec& spec, Matrix landmarks, LandmarkSampling sampling) {
  spec.validate();
  if (landmarks.rows() == 0) fail(ErrorKind::kParameter, "fit_nystrom: no landmarks");
  const KernelSpec base = spec.without_prefix();
  const EigenDecomposition eig = sym_eigen(kernel_matrix(base, landmarks, landmarks));

  const double top = eig.eigenvalues.front();
  std::size_t kept = 0;
  if (top > 0.0) {
    while (kept < eig.eigenvalues.size() && eig.eigenvalues[kept] > kEigenRelativeCutoff * top) {
      ++kept;
    }
  }
  if (kept == 0) {
    fail(ErrorKind::kDegenerateKernel,
         "landmark kernel matrix has no positive eigenvalues (largest " + std::to_string(top) + ")");
  }
  std::vector<double> values(eig.eigenvalues.begin(),
                             eig.eigenvalues.begin() + static_cast<std::ptrdiff_t>(kept));
  return NystromMap(spec, sampling, std::move(landmarks), eig.eigenvectors.leading_cols(kept),
                    std::move(values));
}

}  // namespace kpca
