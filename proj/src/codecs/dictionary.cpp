// Static dictionary block coder. Aligned 16-bit words found in the
// dictionary become a single index byte; anything else is escaped as
// 0xFF followed by the literal word. An odd trailing byte is copied verbatim.

#include <algorithm>
#include <unordered_map>

#include "ccattest/error.hpp"
#include "codecs/block_codecs.hpp"

namespace ccattest::codecs {

namespace {
constexpr std::uint8_t kEscape = 0xFF;

[[noreturn]] void corrupt(const char* why) { throw Error(Errc::kCorruptBlock, std::string("dictionary: ") + why); }
}  // namespace

std::optional<Bytes> dictionary_encode(ByteView raw, const Dictionary* dictionary) {
  if (raw.size() < 2 || dictionary == nullptr || dictionary->words.empty()) return std::nullopt;
  std::unordered_map<std::uint16_t, std::uint8_t> index;
  for (std::size_t i = 0; i < dictionary->words.size() && i < kEscape; ++i) {
    index.emplace(dictionary->words[i], static_cast<std::uint8_t>(i));
  }
  Bytes out;
  out.reserve(raw.size());
  std::size_t i = 0;
  for (; i + 1 < raw.size(); i += 2) {
    const auto word = static_cast<std::uint16_t>(raw[i] | raw[i + 1] << 8);
    if (auto it = index.find(word); it != index.end()) {
      out.push_back(it->second);
    } else {
      out.push_back(kEscape);
      out.push_back(raw[i]);
      out.push_back(raw[i + 1]);
    }
  }
  if (i < raw.size()) out.push_back(raw[i]);
  return out;
}

Decoded dictionary_decode(ByteView payload, std::size_t raw_length, const Dictionary* dictionary) {
  const std::size_t entries = dictionary == nullptr ? 0 : dictionary->words.size();
  Decoded result;
  result.data.reserve(raw_length);
  std::size_t pos = 0;
  auto take = [&]() -> std::uint8_t {
    if (pos >= payload.size()) corrupt("truncated payload");
    return payload[pos++];
  };
  while (result.data.size() + 2 <= raw_length) {
    const std::uint8_t t = take();
    if (t == kEscape) {
      result.data.push_back(take());
      result.data.push_back(take());
    } else {
      if (t >= entries) corrupt("index outside dictionary");
      const std::uint16_t w = dictionary->words[t];
      result.data.push_back(static_cast<std::uint8_t>(w & 0xFF));
      result.data.push_back(static_cast<std::uint8_t>(w >> 8));
    }
  }
  if (result.data.size() < raw_length) result.data.push_back(take());
  result.consumed = pos;
  return result;
}

}  // namespace ccattest::codecs
