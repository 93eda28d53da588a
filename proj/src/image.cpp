#include "ccattest/image.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "ccattest/error.hpp"
#include "ccattest/hash.hpp"
#include "ccattest/keyvalue.hpp"

namespace ccattest {

namespace {

constexpr std::uint64_t kAddressSpace = 1ull << 32;
constexpr std::size_t kMaxHexSpan = 16u << 20;

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
  throw Error(Errc::kMalformedRecord, "line " + std::to_string(line) + ": " + why);
}

}  // namespace

CodeImage parse_intel_hex(std::string_view text, std::string name) {
  std::map<std::uint64_t, std::uint8_t> cells;
  std::uint64_t base = 0;
  bool saw_eof = false;
  std::size_t line_no = 0;
  while (!text.empty() && !saw_eof) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty()) continue;
    if (line[0] != ':') malformed(line_no, "record must start with ':'");
    line.remove_prefix(1);
    if (line.size() % 2 != 0 || line.size() < 10) malformed(line_no, "bad record length");
    Bytes rec;
    for (std::size_t i = 0; i < line.size(); i += 2) {
      const int hi = nibble(line[i]);
      const int lo = nibble(line[i + 1]);
      if (hi < 0 || lo < 0) malformed(line_no, "non-hex character");
      rec.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
    }
    const std::size_t count = rec[0];
    if (rec.size() != count + 5) malformed(line_no, "byte count does not match record");
    std::uint8_t sum = 0;
    for (auto b : rec) sum = static_cast<std::uint8_t>(sum + b);
    if (sum != 0) {
      throw Error(Errc::kChecksumMismatch, "line " + std::to_string(line_no) + ": record checksum mismatch");
    }
    const std::uint64_t addr = static_cast<std::uint64_t>(rec[1]) << 8 | rec[2];
    const std::uint8_t type = rec[3];
    const ByteView data = ByteView(rec).subspan(4, count);
    switch (type) {
      case 0x00: {
        const std::uint64_t start = base + addr;
        if (start + count > kAddressSpace) {
          throw Error(Errc::kAddressOverflow, "line " + std::to_string(line_no) + ": data beyond 4 GiB");
        }
        for (std::size_t i = 0; i < count; ++i) cells[start + i] = data[i];
        break;
      }
      case 0x01:
        if (count != 0) malformed(line_no, "EOF record with data");
        saw_eof = true;
        break;
      case 0x04:
        if (count != 2 || addr != 0) malformed(line_no, "bad extended linear address record");
        base = (static_cast<std::uint64_t>(data[0]) << 8 | data[1]) << 16;
        break;
      default:
        malformed(line_no, "unsupported record type " + std::to_string(type));
    }
  }
  if (!saw_eof) throw Error(Errc::kMalformedRecord, "missing EOF record");
  if (cells.empty()) throw Error(Errc::kEmptyImage, "no data records");
  const std::uint64_t lo = cells.begin()->first;
  const std::uint64_t hi = cells.rbegin()->first;
  if (hi - lo + 1 > kMaxHexSpan) throw Error(Errc::kAddressOverflow, "image span exceeds 16 MiB");
  CodeImage img;
  img.name = std::move(name);
  img.bytes.assign(hi - lo + 1, 0xFF);
  for (auto [a, v] : cells) img.bytes[a - lo] = v;
  return img;
}

std::string export_intel_hex(ByteView data, std::size_t bytes_per_record) {
  if (bytes_per_record == 0 || bytes_per_record > 255) throw Error(Errc::kInvalidArgument, "bad record size");
  if (data.size() > kAddressSpace) throw Error(Errc::kAddressOverflow, "image larger than 4 GiB");
  std::string out;
  auto emit = [&out](std::uint8_t type, std::uint16_t addr, ByteView payload) {
    Bytes rec{static_cast<std::uint8_t>(payload.size()), static_cast<std::uint8_t>(addr >> 8),
              static_cast<std::uint8_t>(addr & 0xFF), type};
    rec.insert(rec.end(), payload.begin(), payload.end());
    std::uint8_t sum = 0;
    for (auto b : rec) sum = static_cast<std::uint8_t>(sum + b);
    rec.push_back(static_cast<std::uint8_t>(-sum));
    out += ':';
    for (auto b : rec) {
      char buf[3];
      std::snprintf(buf, sizeof buf, "%02X", b);
      out += buf;
    }
    out += '\n';
  };
  std::uint64_t upper = 0;
  for (std::size_t off = 0; off < data.size();) {
    if ((off >> 16) != upper) {
      upper = off >> 16;
      const Bytes ext{static_cast<std::uint8_t>(upper >> 8), static_cast<std::uint8_t>(upper & 0xFF)};
      emit(0x04, 0, ext);
    }
    // Records never straddle a 64 KiB boundary.
    const std::size_t room = 0x10000 - (off & 0xFFFF);
    const std::size_t n = std::min({bytes_per_record, data.size() - off, room});
    emit(0x00, static_cast<std::uint16_t>(off & 0xFFFF), data.subspan(off, n));
    off += n;
  }
  emit(0x01, 0, {});
  return out;
}

CodeImage load_code_image(const std::string& path, ImageFormat format) {
  Bytes raw = read_file(path);
  const auto slash = path.find_last_of('/');
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  if (format == ImageFormat::kIntelHex) {
    return parse_intel_hex(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()), std::move(name));
  }
  if (raw.empty()) throw Error(Errc::kEmptyImage, path + " is empty");
  return CodeImage{std::move(raw), std::move(name)};
}

Bytes generate_prw(const PrwSpec& spec) {
  Bytes seed;
  put_le(seed, spec.seed, 8);
  CounterStream stream(std::move(seed));
  Bytes out(spec.length);
  stream.fill(out);
  return out;
}

std::string_view to_string(ProtocolOption option) {
  switch (option) {
    case ProtocolOption::k1: return "1";
    case ProtocolOption::k2a: return "2a";
    case ProtocolOption::k2b: return "2b";
  }
  return "?";
}

ProtocolOption parse_option(std::string_view text) {
  if (text == "1") return ProtocolOption::k1;
  if (text == "2a") return ProtocolOption::k2a;
  if (text == "2b") return ProtocolOption::k2b;
  throw Error(Errc::kInvalidArgument, "unknown protocol option '" + std::string(text) + "'");
}

bool MemoryLayout::is_tiling() const {
  std::size_t cursor = 0;
  auto step = [&cursor](const Region& r) {
    if (r.offset != cursor) return false;
    cursor = r.end();
    return true;
  };
  if (!step(compressed)) return false;
  if (lat && !step(*lat)) return false;
  if (dict && !step(*dict)) return false;
  return step(prw) && cursor == capacity;
}

PackedImage pack(const CodeImage& ci, CodecId codec, std::size_t block_size, std::size_t capacity,
                 std::uint64_t prw_seed, ProtocolOption option) {
  require_block_size(block_size);
  if (ci.bytes.empty()) throw Error(Errc::kEmptyImage, "code image is empty");
  if (capacity == 0 || capacity % 2 != 0) throw Error(Errc::kInvalidArgument, "capacity must be even and non-zero");
  if (ci.size() > capacity) throw Error(Errc::kCapacityExceeded, "code image larger than program memory");
  if (option == ProtocolOption::k2a && codec != CodecId::kStaticDictionary) {
    throw Error(Errc::kOptionMismatch, "option 2a needs the static-dictionary codec");
  }
  if (option != ProtocolOption::k2a && codec == CodecId::kStaticDictionary) {
    throw Error(Errc::kOptionMismatch, "only option 2a has a dictionary region");
  }

  const BlockCompressedImage compressed = compress_blocks(ci.bytes, codec, block_size);
  Bytes lat_bytes;
  Bytes dict_bytes;
  if (option == ProtocolOption::k2b) lat_bytes = build_lat(compressed).serialize();
  if (option == ProtocolOption::k2a) dict_bytes = compressed.dictionary->serialize();

  const std::size_t used = compressed.stream.size() + lat_bytes.size() + dict_bytes.size();
  if (used > capacity) {
    throw Error(Errc::kCapacityExceeded, "compressed image needs " + std::to_string(used) + " bytes, capacity is " +
                                             std::to_string(capacity));
  }

  PackedImage img;
  img.manifest = Manifest{codec, block_size, ci.size(), prw_seed, option};
  MemoryLayout& layout = img.layout;
  layout.capacity = capacity;
  layout.compressed = {0, compressed.stream.size()};
  std::size_t cursor = layout.compressed.end();
  if (option == ProtocolOption::k2b) {
    layout.lat = Region{cursor, lat_bytes.size()};
    cursor = layout.lat->end();
  }
  if (option == ProtocolOption::k2a) {
    layout.dict = Region{cursor, dict_bytes.size()};
    cursor = layout.dict->end();
  }
  layout.prw = {cursor, capacity - cursor};

  img.memory.reserve(capacity);
  img.memory.insert(img.memory.end(), compressed.stream.begin(), compressed.stream.end());
  img.memory.insert(img.memory.end(), lat_bytes.begin(), lat_bytes.end());
  img.memory.insert(img.memory.end(), dict_bytes.begin(), dict_bytes.end());
  const Bytes prw = generate_prw({prw_seed, layout.prw.length});
  img.memory.insert(img.memory.end(), prw.begin(), prw.end());
  return img;
}

UnpackedImage unpack(const PackedImage& img) {
  UnpackedImage out;
  BlockCompressedImage& c = out.compressed;
  c.codec = img.manifest.codec;
  c.block_size = img.manifest.block_size;
  c.original_length = img.manifest.ci_length;
  const ByteView region = img.region(img.layout.compressed);
  c.stream.assign(region.begin(), region.end());
  if (img.layout.dict) c.dictionary = Dictionary::parse(img.region(*img.layout.dict));
  const BlockGeometry geometry{c.codec, c.block_size, c.original_length, c.dictionary ? &*c.dictionary : nullptr};

  if (img.layout.lat) {
    out.lat = Lat::parse(img.region(*img.layout.lat));
    if (out.lat.entries.size() != geometry.block_count() || out.lat.entries.empty() || out.lat.entries[0] != 0) {
      throw Error(Errc::kCorruptBlock, "LAT does not match the manifest");
    }
    for (std::size_t i = 0; i < out.lat.entries.size(); ++i) {
      const std::size_t end = i + 1 < out.lat.entries.size() ? out.lat.entries[i + 1] : region.size();
      if (end <= out.lat.entries[i] || end > region.size()) throw Error(Errc::kCorruptBlock, "LAT not increasing");
      c.block_sizes.push_back(end - out.lat.entries[i]);
    }
  } else {
    c.block_sizes = locate_blocks(region, geometry);
    out.lat = build_lat(c);
  }
  return out;
}

std::string serialize_manifest(const PackedImage& img) {
  KeyValues kv;
  const Manifest& m = img.manifest;
  kv.set("codec", std::string(to_string(m.codec)));
  kv.set("block_size", std::to_string(m.block_size));
  kv.set("ci_length", std::to_string(m.ci_length));
  kv.set("prw_seed", u64_hex(m.prw_seed));
  kv.set("option", std::string(to_string(m.option)));
  kv.set("capacity", std::to_string(img.layout.capacity));
  auto put_region = [&kv](const std::string& name, const Region& r) {
    kv.set(name + "_offset", std::to_string(r.offset));
    kv.set(name + "_length", std::to_string(r.length));
  };
  put_region("compressed", img.layout.compressed);
  if (img.layout.lat) put_region("lat", *img.layout.lat);
  if (img.layout.dict) put_region("dict", *img.layout.dict);
  put_region("prw", img.layout.prw);
  return kv.to_text();
}

PackedImage restore_packed(std::string_view manifest_text, Bytes memory) {
  const KeyValues kv = KeyValues::parse(manifest_text);
  kv.require_known({"codec", "block_size", "ci_length", "prw_seed", "option", "capacity", "compressed_offset",
                    "compressed_length", "lat_offset", "lat_length", "dict_offset", "dict_length", "prw_offset",
                    "prw_length"});
  PackedImage img;
  img.manifest.codec = parse_codec(kv.get("codec"));
  img.manifest.block_size = kv.get_u64("block_size");
  require_block_size(img.manifest.block_size);
  img.manifest.ci_length = kv.get_u64("ci_length");
  img.manifest.prw_seed = parse_u64_hex(kv.get("prw_seed"));
  img.manifest.option = parse_option(kv.get("option"));
  img.layout.capacity = kv.get_u64("capacity");
  auto region = [&kv](const std::string& name) {
    return Region{kv.get_u64(name + "_offset"), kv.get_u64(name + "_length")};
  };
  img.layout.compressed = region("compressed");
  if (kv.has("lat_offset")) img.layout.lat = region("lat");
  if (kv.has("dict_offset")) img.layout.dict = region("dict");
  img.layout.prw = region("prw");

  const auto option = img.manifest.option;
  const bool shape_ok = (option == ProtocolOption::k1 && !img.layout.lat && !img.layout.dict) ||
                        (option == ProtocolOption::k2a && img.layout.dict && !img.layout.lat) ||
                        (option == ProtocolOption::k2b && img.layout.lat && !img.layout.dict);
  if (!shape_ok) throw Error(Errc::kBadConfig, "manifest regions do not match option");
  if (!img.layout.is_tiling()) throw Error(Errc::kBadConfig, "manifest regions do not tile memory");
  if (memory.size() != img.layout.capacity) {
    throw Error(Errc::kBadConfig, "memory file has " + std::to_string(memory.size()) + " bytes, manifest says " +
                                      std::to_string(img.layout.capacity));
  }
  img.memory = std::move(memory);
  return img;
}

void save_packed(const PackedImage& img, const std::string& memory_path, const std::string& manifest_path) {
  write_file(memory_path, img.memory);
  const std::string text = serialize_manifest(img);
  write_file(manifest_path, ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

PackedImage load_packed(const std::string& memory_path, const std::string& manifest_path) {
  const Bytes manifest = read_file(manifest_path);
  return restore_packed(std::string_view(reinterpret_cast<const char*>(manifest.data()), manifest.size()),
                        read_file(memory_path));
}

}  // namespace ccattest
