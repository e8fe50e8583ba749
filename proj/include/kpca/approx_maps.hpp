#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "kpca/kernels.hpp"
#include "kpca/matrix.hpp"
#include "kpca/rng.hpp"

namespace kpca {

/// Random Fourier features for a shift-invariant kernel.
///
/// phi(z)_i = sqrt(2 / M) * cos(omega_i . z + u_i). Row i of `omega` is the
/// frequency omega_i. `spec` keeps the cosine prefix flag for bookkeeping but
/// the map itself acts on already-normalized inputs.
struct RffMap {
  KernelSpec spec;
  std::uint64_t seed = 0;
  Matrix omega;                // M x m
  std::vector<double> phase;   // M

  std::size_t input_dim() const noexcept { return omega.cols(); }
  std::size_t output_dim() const noexcept { return omega.rows(); }

  bool operator==(const RffMap&) const = default;
};

/// Gaussian: omega ~ N(0, 2 gamma I). Laplacian: each coordinate Cauchy with
/// scale gamma. Throws kUnsupportedKernel for any other base.
RffMap fit_rff(const KernelSpec& spec, std::size_t input_dim, std::size_t num_features,
               SeededRng& rng);

std::vector<double> apply_rff(const RffMap& map, std::span<const double> z);
Matrix apply_rff(const RffMap& map, const Matrix& rows);

/// T * log sum_j exp(f_j / T) per row, with max subtraction.
std::vector<double> energy_scores(const Matrix& logits, double temperature = 1.0);

// Serialized codes; do not renumber.
enum class LandmarkSampling : std::uint8_t { kLowEnergy = 0, kHighEnergy = 1, kUniform = 2 };

std::string_view to_string(LandmarkSampling sampling);
std::optional<LandmarkSampling> parse_sampling(std::string_view name);

/// Indices of the chosen landmarks. Energy schemes return indices ordered by
/// (energy, index), ascending for low-energy and descending energy for
/// high-energy; uniform returns draw order.
std::vector<std::size_t> select_landmarks(std::size_t num_train,
                                          std::optional<std::span<const double>> energies,
                                          std::size_t num_landmarks, LandmarkSampling sampling,
                                          SeededRng& rng);

/// Nystrom feature map Phi(z) = Lambda^{-1/2} U^T [k(z, l_1), ..., k(z, l_M)].
class NystromMap {
 public:
  NystromMap() = default;
  NystromMap(KernelSpec spec, LandmarkSampling sampling, Matrix landmarks, Matrix basis,
             std::vector<double> eigenvalues);

  const KernelSpec& spec() const noexcept { return spec_; }
  LandmarkSampling sampling() const noexcept { return sampling_; }
  const Matrix& landmarks() const noexcept { return landmarks_; }
  // M x kept, columns are retained eigenvectors of the landmark kernel matrix.
  const Matrix& basis() const noexcept { return basis_; }
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }

  std::size_t num_landmarks() const noexcept { return landmarks_.rows(); }
  std::size_t input_dim() const noexcept { return landmarks_.cols(); }
  std::size_t output_dim() const noexcept { return eigenvalues_.size(); }

  std::vector<double> apply(std::span<const double> z) const;
  Matrix apply(const Matrix& rows) const;

  bool operator==(const NystromMap& other) const {
    return spec_ == other.spec_ && sampling_ == other.sampling_ &&
           landmarks_ == other.landmarks_ && basis_ == other.basis_ &&
           eigenvalues_ == other.eigenvalues_;
  }

 private:
  KernelSpec spec_;
  LandmarkSampling sampling_ = LandmarkSampling::kUniform;
  Matrix landmarks_;
  Matrix basis_;
  std::vector<double> eigenvalues_;
  Matrix whitening_;  // kept x M, Lambda^{-1/2} U^T
};

/// Relative cutoff below which landmark kernel eigenpairs are dropped.
inline constexpr double kEigenRelativeCutoff = 1e-10;

/// Landmarks must already be in the map's input space (post cosine map when
/// the kernel carries the prefix). Throws kDegenerateKernel if nothing survives
/// the eigenvalue cutoff.
NystromMap fit_nystrom(const KernelSpec& spec, Matrix landmarks,
                       LandmarkSampling sampling = LandmarkSampling::kUniform);

inline std::vector<double> apply_nystrom(const NystromMap& map, std::span<const double> z) {
  return map.apply(z);
}
inline Matrix apply_nystrom(const NystromMap& map, const Matrix& rows) { return map.apply(rows); }

}  // namespace kpca
