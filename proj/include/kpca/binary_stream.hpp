#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kpca/matrix.hpp"

namespace kpca {

/// Little-endian encoder for model and matrix files.
class ByteWriter {
 public:
  void bytes(std::span<const std::uint8_t> data);
  void magic(std::string_view tag);
  void u8(std::uint8_t v);
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v);
  void f64(double v);
  // u64 length prefix, then the values.
  void f64_array(std::span<const double> values);
  // u64 rows, u64 cols, then row-major f64 values.
  void matrix(const Matrix& m);

  const std::vector<std::uint8_t>& buffer() const noexcept { return buffer_; }
  std::vector<std::uint8_t> release() { return std::move(buffer_); }

 private:
  std::vector<std::uint8_t> buffer_;
};

/// Bounds-checked decoder. Reading past the end throws kLength.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  void expect_magic(std::string_view tag);
  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  float f32();
  double f64();
  std::vector<double> f64_array();
  Matrix matrix();

  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  std::size_t position() const noexcept { return pos_; }
  // Throws kFormat if unread bytes remain.
  void expect_end() const;

 private:
  std::span<const std::uint8_t> take(std::size_t n);

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace kpca
