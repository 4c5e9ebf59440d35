#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fccd/dataio/embedding_set.hpp"

// Embedding container, little-endian:
//
//   offset  size  field
//        0     4  magic "FCCD"
//        4     2  version (u16) = 1
//        6     2  flags (u16), bit 0 = label block present, other bits 0
//        8     8  row count N (u64), N >= 1
//       16     4  dimension D (u32), D >= 1
//       20     4  padding (u32) = 0
//       24  4*N*D float32 payload, row-major
//        .   4*N  int32 labels, only when flags bit 0 is set (-1 = unlabeled row)
//
// The file must end exactly after the last section.
namespace fccd::dataio {

inline constexpr std::uint16_t kContainerVersion = 1;
inline constexpr std::uint16_t kFlagLabels = 0x1;
inline constexpr std::size_t kContainerHeaderSize = 24;

std::vector<std::uint8_t> encode_container(const EmbeddingSet& set);
// Throws FormatError (with byte offset) on any deviation from the layout.
EmbeddingSet decode_container(std::span<const std::uint8_t> bytes);

EmbeddingSet read_embedding_container(const std::filesystem::path& path);
void write_embedding_container(const EmbeddingSet& set, const std::filesystem::path& path);

}  // namespace fccd::dataio
