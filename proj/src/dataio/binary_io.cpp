#include "fccd/dataio/binary_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "fccd/errors.hpp"

namespace fccd::dataio {
namespace {

template <typename U>
void put_le(std::vector<std::uint8_t>& buf, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

void ByteWriter::put_bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
void ByteWriter::put_u16(std::uint16_t v) { put_le(buf_, v); }
void ByteWriter::put_u32(std::uint32_t v) { put_le(buf_, v); }
void ByteWriter::put_u64(std::uint64_t v) { put_le(buf_, v); }
void ByteWriter::put_i32(std::int32_t v) { put_le(buf_, static_cast<std::uint32_t>(v)); }
void ByteWriter::put_i64(std::int64_t v) { put_le(buf_, static_cast<std::uint64_t>(v)); }
void ByteWriter::put_f32(float v) { put_le(buf_, std::bit_cast<std::uint32_t>(v)); }
void ByteWriter::put_f64(double v) { put_le(buf_, std::bit_cast<std::uint64_t>(v)); }
void ByteWriter::put_string(std::string_view s) {
  put_u32(static_cast<std::uint32_t>(s.size()));
  put_bytes(s);
}

void ByteReader::need(std::size_t n) const {
  if (remaining() < n) {
    throw FormatError("truncated input: need " + std::to_string(n) + " bytes, have " +
                          std::to_string(remaining()),
                      pos_);
  }
}

std::string ByteReader::get_bytes(std::size_t n) {
  need(n);
  std::string out(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
  pos_ += n;
  return out;
}

namespace {
template <typename U>
U get_le(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[pos + i]) << (8 * i);
  pos += sizeof(U);
  return v;
}
}  // namespace

std::uint16_t ByteReader::get_u16() {
  need(2);
  return get_le<std::uint16_t>(bytes_, pos_);
}
std::uint32_t ByteReader::get_u32() {
  need(4);
  return get_le<std::uint32_t>(bytes_, pos_);
}
std::uint64_t ByteReader::get_u64() {
  need(8);
  return get_le<std::uint64_t>(bytes_, pos_);
}
std::int32_t ByteReader::get_i32() { return static_cast<std::int32_t>(get_u32()); }
std::int64_t ByteReader::get_i64() { return static_cast<std::int64_t>(get_u64()); }
float ByteReader::get_f32() { return std::bit_cast<float>(get_u32()); }
double ByteReader::get_f64() { return std::bit_cast<double>(get_u64()); }
std::string ByteReader::get_string() {
  const std::uint32_t n = get_u32();
  return get_bytes(n);
}

void ByteReader::expect_end() const {
  if (remaining() != 0) {
    throw FormatError(std::to_string(remaining()) + " unexpected trailing bytes", pos_);
  }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return out;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace fccd::dataio
