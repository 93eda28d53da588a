#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ccattest/bytes.hpp"
#include "ccattest/codec.hpp"

namespace ccattest {

inline constexpr std::size_t kDefaultCapacity = 131072;

// The originally uploaded, uncompressed program.
struct CodeImage {
  Bytes bytes;
  std::string name;

  std::size_t size() const { return bytes.size(); }
};

enum class ImageFormat { kRaw, kIntelHex };

// Throws Error(kMalformedRecord | kChecksumMismatch | kAddressOverflow | kEmptyImage | kIo).
CodeImage load_code_image(const std::string& path, ImageFormat format);

// Intel HEX text (record types 00, 01, 04). The image spans the lowest to
// the highest written address; gaps read as erased flash (0xFF).
CodeImage parse_intel_hex(std::string_view text, std::string name = {});
std::string export_intel_hex(ByteView data, std::size_t bytes_per_record = 16);

struct PrwSpec {
  std::uint64_t seed = 0;
  std::size_t length = 0;
};

// Pseudorandom fill: SHA-256(LE64(seed) || LE64(i)) blocks, truncated.
Bytes generate_prw(const PrwSpec& spec);

// Which response construction the image is laid out for:
// 1 = C(CI) || PRW, 2a = C(CI) || dic || PRW, 2b = C(CI) || LAT || PRW.
enum class ProtocolOption { k1, k2a, k2b };

std::string_view to_string(ProtocolOption option);
ProtocolOption parse_option(std::string_view text);

struct Region {
  std::size_t offset = 0;
  std::size_t length = 0;

  std::size_t end() const { return offset + length; }
  bool contains(std::size_t addr) const { return addr >= offset && addr < end(); }
  bool operator==(const Region&) const = default;
};

struct MemoryLayout {
  std::size_t capacity = kDefaultCapacity;
  Region compressed;
  std::optional<Region> lat;
  std::optional<Region> dict;
  Region prw;

  // Regions tile [0, capacity) in the order compressed, LAT, dict, PRW.
  bool is_tiling() const;
  bool operator==(const MemoryLayout&) const = default;
};

// Sidecar parameters; not part of attested memory.
struct Manifest {
  CodecId codec = CodecId::kLzGeneral;
  std::size_t block_size = 512;
  std::size_t ci_length = 0;
  std::uint64_t prw_seed = 0;
  ProtocolOption option = ProtocolOption::k2b;
  bool operator==(const Manifest&) const = default;
};

struct PackedImage {
  MemoryLayout layout;
  Bytes memory;
  Manifest manifest;

  ByteView region(const Region& r) const { return ByteView(memory).subspan(r.offset, r.length); }
};

// Option 2a requires the static-dictionary codec (its dictionary is the
// attested `dic`); options 1 and 2b reject it since they have no dictionary
// region.
PackedImage pack(const CodeImage& ci, CodecId codec, std::size_t block_size, std::size_t capacity,
                 std::uint64_t prw_seed, ProtocolOption option);

// Rebuilds the compressed image view and LAT from memory. For options
// without a LAT in memory the block boundaries are recovered by decoding.
struct UnpackedImage {
  BlockCompressedImage compressed;
  Lat lat;
};
UnpackedImage unpack(const PackedImage& img);

// key=value lines: codec, block_size, ci_length, prw_seed, option, capacity,
// and <region>_offset / <region>_length for compressed, lat, dict, prw.
std::string serialize_manifest(const PackedImage& img);
// Parses a manifest and attaches `memory`; validates the layout.
PackedImage restore_packed(std::string_view manifest_text, Bytes memory);

void save_packed(const PackedImage& img, const std::string& memory_path, const std::string& manifest_path);
PackedImage load_packed(const std::string& memory_path, const std::string& manifest_path);

}  // namespace ccattest
