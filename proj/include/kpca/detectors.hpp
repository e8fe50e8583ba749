#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kpca/approx_maps.hpp"
#include "kpca/kernels.hpp"
#include "kpca/matrix.hpp"
#include "kpca/subspace.hpp"

namespace kpca {

// Serialized codes; do not renumber.
enum class Method : std::uint8_t {
  kPca = 0,
  kKpcaRff = 1,
  kKpcaNys = 2,
  kKnn = 3,
  kMsp = 4,
  kMaxLogit = 5,
  kEnergy = 6,
};

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view name);

bool uses_logits_for_scoring(Method method);

inline constexpr double kDefaultEvrRff = 0.90;
inline constexpr double kDefaultEvrNystrom = 0.99;
inline constexpr double kDefaultEvrPca = 0.90;

struct DetectorConfig {
  Method method = Method::kKpcaNys;
  KernelSpec kernel = KernelSpec::gaussian(1.0, true);
  // Unset selects the median heuristic.
  std::optional<double> gamma;
  std::size_t num_features = 4096;
  std::size_t num_landmarks = 2048;
  // Unset picks the per-method default.
  std::optional<double> evr_threshold;
  std::optional<std::size_t> fixed_q;
  LandmarkSampling sampling = LandmarkSampling::kLowEnergy;
  double temperature = 1.0;
  std::optional<double> clip_percentile;
  std::uint64_t seed = 0;
};

double default_evr(Method method);

struct DetectorModel {
  Method method = Method::kPca;
  std::uint64_t seed = 0;
  std::uint64_t dim = 0;
  std::uint64_t n_train = 0;
  double temperature = 1.0;
  std::optional<double> clip_percentile;
  std::vector<double> clip_thresholds;  // empty when clipping is off

  KernelSpec kernel;
  std::optional<RffMap> rff;
  std::optional<NystromMap> nystrom;
  std::optional<SubspaceModel> subspace;
  // Indices into the training set, kpca-nys only (metadata, not used to score).
  std::vector<std::uint64_t> landmark_indices;
  Matrix knn_bank;

  bool operator==(const DetectorModel&) const = default;
};

// Whether scoring normalizes feature rows first (knn and cosine-prefixed kpca).
bool uses_cosine_map(const DetectorModel& model);

/// gamma = 1 / (2 * median squared distance) for the Gaussian base and
/// 1 / median L1 distance for the Laplacian, over 1000 random pairs of rows
/// (already cosine-mapped when the kernel carries the prefix).
double median_heuristic_gamma(const Matrix& rows, KernelBase base, SeededRng& rng);

/// Per-dimension order statistic at ceil(p / 100 * n).
std::vector<double> clip_thresholds(const Matrix& features, double percentile);
Matrix clip_features(const Matrix& features, std::span<const double> thresholds);
/// Uses the thresholds stored in the model; kUsage if it has none.
Matrix clip_features(const DetectorModel& model, const Matrix& features);

/// `train_logits` may be empty unless the method needs them (energy landmark
/// sampling for kpca-nys).
DetectorModel fit_detector(const DetectorConfig& config, const Matrix& train_features,
                           const Matrix& train_logits);

/// Higher score means more in-distribution for every method. Throws RowError
/// on the first degenerate row.
std::vector<double> score(const DetectorModel& model, const Matrix& features, const Matrix& logits);

struct RejectedRow {
  std::size_t row;
  std::string reason;
};

struct LenientScores {
  std::vector<std::size_t> rows;
  std::vector<double> scores;
  std::vector<RejectedRow> rejected;
};

/// Scores the rows that can be scored and lists the others.
LenientScores score_lenient(const DetectorModel& model, const Matrix& features, const Matrix& logits);

/// Model file: "KPCM", u16 version, u8 method, then metadata and the
/// method-specific blocks; f64 payloads, u64 length prefixes, little-endian.
std::vector<std::uint8_t> serialize_model(const DetectorModel& model);
DetectorModel deserialize_model(std::span<const std::uint8_t> bytes);
void save_model(const DetectorModel& model, const std::string& path);
DetectorModel load_model(const std::string& path);

}  // namespace kpca
