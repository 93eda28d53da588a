#include "ccattest/codec.hpp"

#include <algorithm>
#include <map>

#include "ccattest/error.hpp"
#include "codecs/block_codecs.hpp"

namespace ccattest {

std::string_view to_string(CodecId id) {
  switch (id) {
    case CodecId::kCanonicalHuffman: return "canonical-huffman";
    case CodecId::kStaticDictionary: return "static-dictionary";
    case CodecId::kLzGeneral: return "lz-general";
  }
  return "?";
}

CodecId parse_codec(std::string_view name) {
  for (auto id : kAllCodecs) {
    if (to_string(id) == name) return id;
  }
  throw Error(Errc::kUnknownCodec, "unknown codec '" + std::string(name) + "'");
}

bool is_supported_block_size(std::size_t s) {
  return std::find(kBlockSizes.begin(), kBlockSizes.end(), s) != kBlockSizes.end();
}

void require_block_size(std::size_t s) {
  if (!is_supported_block_size(s)) {
    throw Error(Errc::kUnsupportedBlockSize, "block size " + std::to_string(s) + " not in {64..2048}");
  }
}

Bytes Dictionary::serialize() const {
  Bytes out;
  put_le(out, words.size(), 2);
  for (auto w : words) put_le(out, w, 2);
  return out;
}

Dictionary Dictionary::parse(ByteView data) {
  if (data.size() < 2) throw Error(Errc::kCorruptBlock, "dictionary: truncated header");
  const std::size_t n = get_le(data, 2);
  if (data.size() != 2 + 2 * n) throw Error(Errc::kCorruptBlock, "dictionary: length mismatch");
  Dictionary d;
  for (std::size_t i = 0; i < n; ++i) d.words.push_back(static_cast<std::uint16_t>(get_le(data.subspan(2 + 2 * i), 2)));
  return d;
}

Dictionary build_dictionary(ByteView data, std::size_t max_entries) {
  if (max_entries > 256) throw Error(Errc::kInvalidArgument, "dictionary max_entries must be <= 256");
  max_entries = std::min<std::size_t>(max_entries, 255);
  std::map<std::uint16_t, std::size_t> freq;
  for (std::size_t i = 0; i + 1 < data.size(); i += 2) ++freq[static_cast<std::uint16_t>(data[i] | data[i + 1] << 8)];
  std::vector<std::pair<std::size_t, std::uint16_t>> ranked;
  for (auto [word, count] : freq) {
    if (count >= 2) ranked.emplace_back(count, word);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  Dictionary d;
  for (std::size_t i = 0; i < ranked.size() && i < max_entries; ++i) d.words.push_back(ranked[i].second);
  return d;
}

std::size_t BlockCompressedImage::raw_length(std::size_t i) const {
  return BlockGeometry{codec, block_size, original_length, nullptr}.raw_length(i);
}

ByteView BlockCompressedImage::block(std::size_t i) const {
  if (i >= block_sizes.size()) throw Error(Errc::kIndexOutOfRange, "block index out of range");
  std::size_t offset = 0;
  for (std::size_t k = 0; k < i; ++k) offset += block_sizes[k];
  return ByteView(stream).subspan(offset, block_sizes[i]);
}

std::size_t BlockGeometry::block_count() const { return (original_length + block_size - 1) / block_size; }

std::size_t BlockGeometry::raw_length(std::size_t i) const {
  if (i >= block_count()) throw Error(Errc::kIndexOutOfRange, "block index out of range");
  return std::min(block_size, original_length - i * block_size);
}

namespace {

std::optional<Bytes> encode_payload(CodecId codec, ByteView raw, const Dictionary* dictionary) {
  switch (codec) {
    case CodecId::kCanonicalHuffman: return codecs::huffman_encode(raw);
    case CodecId::kStaticDictionary: return codecs::dictionary_encode(raw, dictionary);
    case CodecId::kLzGeneral: return codecs::deflate_encode(raw);
  }
  throw Error(Errc::kUnknownCodec, "unknown codec");
}

// Decodes one framed block at the start of `from`; consumed includes the flag.
codecs::Decoded decode_prefix(CodecId codec, ByteView from, std::size_t raw_length, const Dictionary* dictionary) {
  if (from.empty()) throw Error(Errc::kCorruptBlock, "missing block flag");
  const ByteView payload = from.subspan(1);
  codecs::Decoded d;
  switch (static_cast<BlockKind>(from[0])) {
    case BlockKind::kStored:
      if (payload.size() < raw_length) throw Error(Errc::kCorruptBlock, "truncated stored block");
      d.data.assign(payload.begin(), payload.begin() + static_cast<std::ptrdiff_t>(raw_length));
      d.consumed = raw_length;
      break;
    case BlockKind::kCoded:
      switch (codec) {
        case CodecId::kCanonicalHuffman: d = codecs::huffman_decode(payload, raw_length); break;
        case CodecId::kStaticDictionary: d = codecs::dictionary_decode(payload, raw_length, dictionary); break;
        case CodecId::kLzGeneral: d = codecs::deflate_decode(payload, raw_length); break;
      }
      break;
    default:
      throw Error(Errc::kCorruptBlock, "bad block flag");
  }
  d.consumed += 1;
  return d;
}

}  // namespace

Bytes encode_block(CodecId codec, ByteView raw, const Dictionary* dictionary) {
  Bytes out;
  auto payload = encode_payload(codec, raw, dictionary);
  if (payload && payload->size() < raw.size()) {
    out.reserve(payload->size() + 1);
    out.push_back(static_cast<std::uint8_t>(BlockKind::kCoded));
    out.insert(out.end(), payload->begin(), payload->end());
  } else {
    out.reserve(raw.size() + 1);
    out.push_back(static_cast<std::uint8_t>(BlockKind::kStored));
    out.insert(out.end(), raw.begin(), raw.end());
  }
  return out;
}

Bytes decode_block(CodecId codec, ByteView framed, std::size_t raw_length, const Dictionary* dictionary) {
  auto d = decode_prefix(codec, framed, raw_length, dictionary);
  if (d.consumed != framed.size()) throw Error(Errc::kCorruptBlock, "trailing bytes after block");
  return std::move(d.data);
}

BlockCompressedImage compress_blocks(ByteView data, CodecId codec, std::size_t block_size) {
  require_block_size(block_size);
  if (data.empty()) throw Error(Errc::kEmptyImage, "cannot compress empty data");
  BlockCompressedImage img;
  img.codec = codec;
  img.block_size = block_size;
  img.original_length = data.size();
  if (codec == CodecId::kStaticDictionary) img.dictionary = build_dictionary(data);
  const Dictionary* dict = img.dictionary ? &*img.dictionary : nullptr;
  for (std::size_t off = 0; off < data.size(); off += block_size) {
    const auto raw = data.subspan(off, std::min(block_size, data.size() - off));
    Bytes framed = encode_block(codec, raw, dict);
    img.block_sizes.push_back(framed.size());
    img.stream.insert(img.stream.end(), framed.begin(), framed.end());
  }
  return img;
}

Bytes Lat::serialize() const {
  Bytes out;
  out.reserve(serialized_size());
  for (auto e : entries) put_le(out, e, kEntryWidth);
  return out;
}

Lat Lat::parse(ByteView data) {
  if (data.size() % kEntryWidth != 0) throw Error(Errc::kCorruptBlock, "LAT length not a multiple of 3");
  Lat lat;
  for (std::size_t i = 0; i < data.size(); i += kEntryWidth) {
    lat.entries.push_back(static_cast<std::uint32_t>(get_le(data.subspan(i), kEntryWidth)));
  }
  return lat;
}

std::size_t lat_entry_count(std::size_t ci_length, std::size_t block_size) {
  require_block_size(block_size);
  return (ci_length + block_size - 1) / block_size;
}

Lat build_lat(const BlockCompressedImage& img) {
  Lat lat;
  std::size_t offset = 0;
  for (auto size : img.block_sizes) {
    if (offset > Lat::kMaxOffset) throw Error(Errc::kLatOverflow, "block offset exceeds 24 bits");
    lat.entries.push_back(static_cast<std::uint32_t>(offset));
    offset += size;
  }
  return lat;
}

Bytes decompress_block(ByteView region, const Lat& lat, std::size_t index, const BlockGeometry& geometry) {
  if (index >= lat.entries.size() || index >= geometry.block_count()) {
    throw Error(Errc::kIndexOutOfRange, "block index " + std::to_string(index) + " out of range");
  }
  const std::size_t begin = lat.entries[index];
  const std::size_t end = index + 1 < lat.entries.size() ? lat.entries[index + 1] : region.size();
  if (begin >= end || end > region.size()) throw Error(Errc::kCorruptBlock, "LAT entry outside compressed region");
  return decode_block(geometry.codec, region.subspan(begin, end - begin), geometry.raw_length(index), geometry.dictionary);
}

Bytes decompress_block(const BlockCompressedImage& img, const Lat& lat, std::size_t index) {
  const BlockGeometry geometry{img.codec, img.block_size, img.original_length,
                               img.dictionary ? &*img.dictionary : nullptr};
  return decompress_block(img.stream, lat, index, geometry);
}

Bytes decompress_all(const BlockCompressedImage& img) {
  const Dictionary* dict = img.dictionary ? &*img.dictionary : nullptr;
  Bytes out;
  out.reserve(img.original_length);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < img.block_count(); ++i) {
    const auto framed = ByteView(img.stream).subspan(offset, img.block_sizes[i]);
    const Bytes raw = decode_block(img.codec, framed, img.raw_length(i), dict);
    out.insert(out.end(), raw.begin(), raw.end());
    offset += img.block_sizes[i];
  }
  return out;
}

std::vector<std::size_t> locate_blocks(ByteView region, const BlockGeometry& geometry) {
  std::vector<std::size_t> sizes;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < geometry.block_count(); ++i) {
    if (offset >= region.size()) throw Error(Errc::kCorruptBlock, "compressed region ends early");
    auto d = decode_prefix(geometry.codec, region.subspan(offset), geometry.raw_length(i), geometry.dictionary);
    sizes.push_back(d.consumed);
    offset += d.consumed;
  }
  return sizes;
}

}  // namespace ccattest
