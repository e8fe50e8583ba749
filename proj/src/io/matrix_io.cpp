#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kpca/binary_stream.hpp"
#include "kpca/data_io.hpp"
#include "kpca/error.hpp"

namespace kpca {
namespace {

constexpr std::uint16_t kMatrixVersion = 1;
constexpr std::uint8_t kDtypeF32 = 0;

std::string cell_name(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row) + ", col " + std::to_string(col);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

MatrixFormat format_for_path(std::string_view path) {
  return path.ends_with(".csv") ? MatrixFormat::kCsv : MatrixFormat::kBinary;
}

std::vector<std::uint8_t> encode_matrix(const Matrix& m, MatrixRole role) {
  if (m.rows() == 0 || m.cols() == 0) {
    fail(ErrorKind::kLength, "cannot write an empty matrix (" + std::to_string(m.rows()) + "x" +
                                 std::to_string(m.cols()) + ")");
  }
  ByteWriter w;
  w.magic("KPCF");
  w.u16(kMatrixVersion);
  w.u8(kDtypeF32);
  w.u8(static_cast<std::uint8_t>(role));
  w.u64(m.rows());
  w.u64(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const float v = static_cast<float>(m(i, j));
      if (!std::isfinite(v)) {
        fail(ErrorKind::kData, "non-finite value at " + cell_name(i, j) + " (after f32 rounding)");
      }
      w.f32(v);
    }
  }
  return w.release();
}

FeatureMatrix decode_matrix(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("KPCF");
  const std::uint16_t version = r.u16();
  if (version != kMatrixVersion) {
    fail(ErrorKind::kFormat, "unsupported matrix file version " + std::to_string(version));
  }
  const std::uint8_t dtype = r.u8();
  if (dtype != kDtypeF32) fail(ErrorKind::kFormat, "unsupported dtype code " + std::to_string(dtype));
  const std::uint8_t role = r.u8();
  if (role > 1) fail(ErrorKind::kFormat, "unknown role code " + std::to_string(role));
  const std::uint64_t rows = r.u64();
  const std::uint64_t cols = r.u64();
  if (rows == 0 || cols == 0) {
    fail(ErrorKind::kLength, "matrix header declares " + std::to_string(rows) + "x" +
                                 std::to_string(cols) + ", need at least 1x1");
  }
  if (rows > r.remaining() / 4 / cols) {
    fail(ErrorKind::kLength, "truncated payload: " + std::to_string(rows) + "x" +
                                 std::to_string(cols) + " needs " + std::to_string(rows * cols * 4) +
                                 " bytes, " + std::to_string(r.remaining()) + " present");
  }
  FeatureMatrix out;
  out.role = static_cast<MatrixRole>(role);
  out.values = Matrix(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const float v = r.f32();
      if (!std::isfinite(v)) fail(ErrorKind::kData, "non-finite value at " + cell_name(i, j));
      out.values(i, j) = v;
    }
  }
  r.expect_end();
  return out;
}

std::string encode_csv(const Matrix& m) {
  std::string out;
  out.reserve(m.size() * 12);
  char buf[64];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j > 0) out.push_back(',');
      const auto res = std::to_chars(buf, buf + sizeof buf, m(i, j));
      out.append(buf, res.ptr);
    }
    out.push_back('\n');
  }
  return out;
}

Matrix decode_csv(std::string_view text, std::string_view source) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;

    std::size_t count = 0;
    while (true) {
      const std::size_t comma = line.find(',');
      const std::string_view field = trim(line.substr(0, comma));
      double v = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        fail(ErrorKind::kFormat, std::string(source) + ": line " + std::to_string(line_no) +
                                     ", field " + std::to_string(count) + ": cannot parse '" +
                                     std::string(field) + "'");
      }
      if (!std::isfinite(v)) {
        fail(ErrorKind::kData, std::string(source) + ": non-finite value at " + cell_name(rows, count));
      }
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      fail(ErrorKind::kFormat, std::string(source) + ": line " + std::to_string(line_no) + " has " +
                                   std::to_string(count) + " fields, expected " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) fail(ErrorKind::kLength, std::string(source) + ": no data rows");
  return Matrix(rows, cols, std::move(values));
}

FeatureMatrix read_matrix(const std::string& path, MatrixFormat format, MatrixRole csv_role) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  try {
    if (format == MatrixFormat::kBinary) return decode_matrix(bytes);
    const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    return {decode_csv(text, path), csv_role};
  } catch (const Error& e) {
    if (format == MatrixFormat::kCsv) throw;
    throw Error(e.kind(), path + ": " + e.what());
  }
}

void write_matrix(const Matrix& m, const std::string& path, MatrixFormat format, MatrixRole role) {
  if (format == MatrixFormat::kBinary) {
    write_file_bytes(path, encode_matrix(m, role));
    return;
  }
  if (m.rows() == 0 || m.cols() == 0) fail(ErrorKind::kLength, "cannot write an empty matrix");
  const std::string text = encode_csv(m);
  write_file_bytes(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

Matrix round_to_f32(Matrix m) {
  for (double& v : m.data()) v = static_cast<double>(static_cast<float>(v));
  return m;
}

}  // namespace kpca
