#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ccattest {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline void put_le(Bytes& out, std::uint64_t v, int width) {
  for (int i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint64_t get_le(ByteView in, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  return v;
}

std::string to_hex(ByteView data);
// Accepts an optional 0x prefix; throws Error(kInvalidArgument) on bad digits.
Bytes from_hex(std::string_view text);
std::uint64_t parse_u64_hex(std::string_view text);
std::string u64_hex(std::uint64_t v);

Bytes read_file(const std::string& path);
void write_file(const std::string& path, ByteView data);

}  // namespace ccattest
