#include "kpca/binary_stream.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "kpca/error.hpp"

namespace kpca {
namespace {

template <typename U>
void put_le(std::vector<std::uint8_t>& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename U>
U get_le(std::span<const std::uint8_t> in) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(in[i]) << (8 * i);
  return v;
}

}  // namespace

void ByteWriter::bytes(std::span<const std::uint8_t> data) {
  buffer_.insert(buffer_.end(), data.begin(), data.end());
}

void ByteWriter::magic(std::string_view tag) {
  for (char c : tag) buffer_.push_back(static_cast<std::uint8_t>(c));
}

void ByteWriter::u8(std::uint8_t v) { buffer_.push_back(v); }
void ByteWriter::u16(std::uint16_t v) { put_le(buffer_, v); }
void ByteWriter::u32(std::uint32_t v) { put_le(buffer_, v); }
void ByteWriter::u64(std::uint64_t v) { put_le(buffer_, v); }
void ByteWriter::f32(float v) { put_le(buffer_, std::bit_cast<std::uint32_t>(v)); }
void ByteWriter::f64(double v) { put_le(buffer_, std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::f64_array(std::span<const double> values) {
  u64(values.size());
  buffer_.reserve(buffer_.size() + values.size() * 8);
  for (double v : values) f64(v);
}

void ByteWriter::matrix(const Matrix& m) {
  u64(m.rows());
  u64(m.cols());
  buffer_.reserve(buffer_.size() + m.size() * 8);
  for (double v : m.data()) f64(v);
}

std::span<const std::uint8_t> ByteReader::take(std::size_t n) {
  if (n > remaining()) {
    fail(ErrorKind::kLength, "truncated input: need " + std::to_string(n) + " bytes at offset " +
                                 std::to_string(pos_) + ", " + std::to_string(remaining()) +
                                 " left");
  }
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

void ByteReader::expect_magic(std::string_view tag) {
  if (remaining() < tag.size()) {
    fail(ErrorKind::kFormat, "file too short for magic '" + std::string(tag) + "'");
  }
  auto got = take(tag.size());
  if (std::memcmp(got.data(), tag.data(), tag.size()) != 0) {
    fail(ErrorKind::kFormat, "bad magic, expected '" + std::string(tag) + "'");
  }
}

std::uint8_t ByteReader::u8() { return take(1)[0]; }
std::uint16_t ByteReader::u16() { return get_le<std::uint16_t>(take(2)); }
std::uint32_t ByteReader::u32() { return get_le<std::uint32_t>(take(4)); }
std::uint64_t ByteReader::u64() { return get_le<std::uint64_t>(take(8)); }
float ByteReader::f32() { return std::bit_cast<float>(u32()); }
double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::vector<double> ByteReader::f64_array() {
  const std::uint64_t n = u64();
  if (n > remaining() / 8) {
    fail(ErrorKind::kLength, "array of " + std::to_string(n) + " values exceeds the remaining " +
                                 std::to_string(remaining()) + " bytes");
  }
  std::vector<double> out(n);
  for (double& v : out) v = f64();
  return out;
}

Matrix ByteReader::matrix() {
  const std::uint64_t rows = u64();
  const std::uint64_t cols = u64();
  if (cols != 0 && rows > std::numeric_limits<std::uint64_t>::max() / cols) {
    fail(ErrorKind::kFormat, "matrix shape overflows");
  }
  const std::uint64_t n = rows * cols;
  if (n > remaining() / 8) {
    fail(ErrorKind::kLength, "matrix " + std::to_string(rows) + "x" + std::to_string(cols) +
                                 " exceeds the remaining " + std::to_string(remaining()) + " bytes");
  }
  std::vector<double> values(n);
  for (double& v : values) v = f64();
  return Matrix(rows, cols, std::move(values));
}

void ByteReader::expect_end() const {
  if (remaining() != 0) {
    fail(ErrorKind::kFormat, std::to_string(remaining()) + " trailing bytes after payload");
  }
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::kIo, "error reading '" + path + "'");
  return bytes;
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, "error writing '" + path + "'");
}

}  // namespace kpca
