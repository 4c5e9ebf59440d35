#include "fccd/dataio/container.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fccd/dataio/binary_io.hpp"
#include "fccd/errors.hpp"

namespace fccd::dataio {

std::vector<std::uint8_t> encode_container(const EmbeddingSet& set) {
  set.validate();
  ByteWriter w;
  w.put_bytes("FCCD");
  w.put_u16(kContainerVersion);
  w.put_u16(set.has_labels() ? kFlagLabels : 0);
  w.put_u64(set.count());
  w.put_u32(static_cast<std::uint32_t>(set.dim()));
  w.put_u32(0);
  for (float v : set.data.values()) w.put_f32(v);
  if (set.labels) {
    for (std::int32_t l : *set.labels) w.put_i32(l);
  }
  return w.bytes();
}

EmbeddingSet decode_container(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.get_bytes(4) != "FCCD") throw FormatError("bad magic, expected \"FCCD\"", 0);
  const std::uint16_t version = r.get_u16();
  if (version != kContainerVersion) {
    throw FormatError("unsupported container version " + std::to_string(version), 4);
  }
  const std::uint16_t flags = r.get_u16();
  if ((flags & ~kFlagLabels) != 0) throw FormatError("unknown flag bits set", 6);
  const std::uint64_t n = r.get_u64();
  if (n == 0) throw FormatError("row count must be >= 1", 8);
  const std::uint32_t d = r.get_u32();
  if (d == 0) throw FormatError("dimension must be >= 1", 16);
  if (r.get_u32() != 0) throw FormatError("non-zero header padding", 20);

  const bool has_labels = (flags & kFlagLabels) != 0;
  const std::uint64_t per_row = 4ull * d + (has_labels ? 4ull : 0ull);
  if (n > (std::numeric_limits<std::uint64_t>::max() - kContainerHeaderSize) / per_row) {
    throw FormatError("declared size overflows", 8);
  }
  const std::uint64_t expected = kContainerHeaderSize + n * per_row;
  if (bytes.size() < expected) {
    throw FormatError("truncated payload: declared " + std::to_string(n) + "x" + std::to_string(d) +
                          " needs " + std::to_string(expected) + " bytes, file has " +
                          std::to_string(bytes.size()),
                      bytes.size());
  }
  if (bytes.size() > expected) throw FormatError("trailing bytes after payload", expected);

  EmbeddingSet set;
  set.data = Matrix(static_cast<std::size_t>(n), d);
  auto values = set.data.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t at = r.offset();
    values[i] = r.get_f32();
    if (!std::isfinite(values[i])) throw FormatError("non-finite value in payload", at);
  }
  if (has_labels) {
    set.labels.emplace(static_cast<std::size_t>(n));
    for (auto& l : *set.labels) {
      const std::size_t at = r.offset();
      l = r.get_i32();
      if (l < kUnlabeled) throw FormatError("label below -1", at);
    }
  }
  r.expect_end();
  return set;
}

EmbeddingSet read_embedding_container(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_container(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.reason(), e.offset());
  }
}

void write_embedding_container(const EmbeddingSet& set, const std::filesystem::path& path) {
  write_file(path, encode_container(set));
}

}  // namespace fccd::dataio
