#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kpca/matrix.hpp"

namespace kpca {

// Serialized codes; do not renumber.
enum class MatrixRole : std::uint8_t { kFeatures = 0, kLogits = 1 };

enum class MatrixFormat { kBinary, kCsv };

struct FeatureMatrix {
  Matrix values;
  MatrixRole role = MatrixRole::kFeatures;
};

/// ".csv" selects CSV, anything else the binary format.
MatrixFormat format_for_path(std::string_view path);

/// Binary layout, little-endian: "KPCF", u16 version = 1, u8 dtype = 0 (f32),
/// u8 role, u64 rows, u64 cols, rows * cols f32 row-major.
inline constexpr std::size_t kMatrixHeaderBytes = 24;

std::vector<std::uint8_t> encode_matrix(const Matrix& m, MatrixRole role);
FeatureMatrix decode_matrix(std::span<const std::uint8_t> bytes);

std::string encode_csv(const Matrix& m);
// `source` names the input in diagnostics.
Matrix decode_csv(std::string_view text, std::string_view source = "<csv>");

/// CSV carries no role; `csv_role` is attached to the result.
FeatureMatrix read_matrix(const std::string& path, MatrixFormat format,
                          MatrixRole csv_role = MatrixRole::kFeatures);
inline FeatureMatrix read_matrix(const std::string& path) {
  return read_matrix(path, format_for_path(path));
}

void write_matrix(const Matrix& m, const std::string& path, MatrixFormat format,
                  MatrixRole role = MatrixRole::kFeatures);
inline void write_matrix(const Matrix& m, const std::string& path,
                         MatrixRole role = MatrixRole::kFeatures) {
  write_matrix(m, path, format_for_path(path), role);
}

/// Rounds every entry to the nearest f32, the precision of binary files.
Matrix round_to_f32(Matrix m);

struct NamedSet {
  std::string name;
  Matrix features;
  Matrix logits;  // empty when not available
};

struct DatasetBundle {
  Matrix ind_train;
  Matrix ind_train_logits;
  Matrix ind_test;
  Matrix ind_test_logits;
  std::vector<NamedSet> ood_sets;

  std::size_t dim() const noexcept { return ind_train.cols(); }
};

enum class SyntheticKind { kClusters, kSwissRoll, kShiftedNorms };

std::string_view to_string(SyntheticKind kind);
// Throws kUsage for unknown names.
SyntheticKind parse_synthetic_kind(std::string_view name);

struct SyntheticOptions {
  SyntheticKind kind = SyntheticKind::kClusters;
  std::size_t n_ind = 1000;
  std::size_t n_ood = 500;
  std::size_t dim = 16;
  std::uint64_t seed = 0;
  std::size_t num_classes = 4;
  // clusters only: 0 draws OoD from the InD distribution.
  double displacement = 1.0;
};

/// InD train has n_ind rows, InD test max(2, n_ind / 2), one OoD set named
/// "ood" with n_ood rows. Logits come from a nearest-class-mean linear
/// classifier. All values are rounded to f32 so in-memory and on-disk bundles
/// agree.
DatasetBundle gen_synthetic(const SyntheticOptions& options);

}  // namespace kpca
