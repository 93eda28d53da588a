#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccattest/bytes.hpp"

namespace ccattest {

enum class CodecId { kCanonicalHuffman, kStaticDictionary, kLzGeneral };

inline constexpr std::array<CodecId, 3> kAllCodecs = {
    CodecId::kCanonicalHuffman, CodecId::kStaticDictionary, CodecId::kLzGeneral};

inline constexpr std::array<std::size_t, 6> kBlockSizes = {64, 128, 256, 512, 1024, 2048};

std::string_view to_string(CodecId id);
// Throws Error(kUnknownCodec).
CodecId parse_codec(std::string_view name);
bool is_supported_block_size(std::size_t s);
void require_block_size(std::size_t s);

// Per-block framing flag.
enum class BlockKind : std::uint8_t { kStored = 0, kCoded = 1 };

// Static dictionary of frequent 16-bit words (Option 2a's `dic`).
struct Dictionary {
  std::vector<std::uint16_t> words;

  // 2-byte LE count followed by 2-byte LE entries.
  Bytes serialize() const;
  static Dictionary parse(ByteView data);
  bool operator==(const Dictionary&) const = default;
};

// Greedy most-frequent aligned 16-bit words (count >= 2), ties broken by word
// value. At most min(max_entries, 255) entries: index 0xFF is the escape code.
Dictionary build_dictionary(ByteView data, std::size_t max_entries = 255);

// Block-wise compressed image. Blocks are framed (flag byte + payload) and
// stored back to back in `stream`, which is exactly the compressed region
// placed in program memory.
struct BlockCompressedImage {
  CodecId codec = CodecId::kLzGeneral;
  std::size_t block_size = 512;
  std::size_t original_length = 0;
  Bytes stream;
  std::vector<std::size_t> block_sizes;
  std::optional<Dictionary> dictionary;

  std::size_t block_count() const { return block_sizes.size(); }
  // Uncompressed length of block i (tail block may be short).
  std::size_t raw_length(std::size_t i) const;
  std::size_t compressed_size() const { return stream.size(); }
  ByteView block(std::size_t i) const;
};

BlockCompressedImage compress_blocks(ByteView data, CodecId codec, std::size_t block_size);

// Line address table: 24-bit little-endian offsets of each block's entry
// point, relative to the start of the compressed region.
struct Lat {
  static constexpr std::size_t kEntryWidth = 3;
  static constexpr std::uint32_t kMaxOffset = (1u << 24) - 1;

  std::vector<std::uint32_t> entries;

  std::size_t serialized_size() const { return entries.size() * kEntryWidth; }
  Bytes serialize() const;
  static Lat parse(ByteView data);
  bool operator==(const Lat&) const = default;
};

// Number of LAT entries for an image of `ci_length` bytes: ceil(|CI| / s).
std::size_t lat_entry_count(std::size_t ci_length, std::size_t block_size);

Lat build_lat(const BlockCompressedImage& img);

// Geometry needed to decode blocks out of a raw compressed region.
struct BlockGeometry {
  CodecId codec = CodecId::kLzGeneral;
  std::size_t block_size = 512;
  std::size_t original_length = 0;
  const Dictionary* dictionary = nullptr;

  std::size_t block_count() const;
  std::size_t raw_length(std::size_t i) const;
};

// Decodes block i from `region` using only the bytes [entry[i], entry[i+1]).
Bytes decompress_block(ByteView region, const Lat& lat, std::size_t index, const BlockGeometry& geometry);
Bytes decompress_block(const BlockCompressedImage& img, const Lat& lat, std::size_t index);
Bytes decompress_all(const BlockCompressedImage& img);

// Recovers the framed size of every block without a LAT by decoding them in
// order; each decoder knows how many bytes it consumed. This is the
// sequential-scan alternative to entry points.
std::vector<std::size_t> locate_blocks(ByteView region, const BlockGeometry& geometry);

// Single-block primitives, framed (flag byte + payload). `raw` must be no
// longer than the codec block size. encode never yields more than raw+1 bytes.
Bytes encode_block(CodecId codec, ByteView raw, const Dictionary* dictionary);
Bytes decode_block(CodecId codec, ByteView framed, std::size_t raw_length, const Dictionary* dictionary);

}  // namespace ccattest
