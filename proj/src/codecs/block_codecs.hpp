#pragma once

// Payload coders behind the framed block format. Each encoder returns the
// payload only (no flag byte); each decoder reports how many payload bytes it
// consumed so blocks can be walked without a LAT.

#include <cstddef>
#include <optional>

#include "ccattest/bytes.hpp"
#include "ccattest/codec.hpp"

namespace ccattest::codecs {

struct Decoded {
  Bytes data;
  std::size_t consumed = 0;
};

std::optional<Bytes> huffman_encode(ByteView raw);
Decoded huffman_decode(ByteView payload, std::size_t raw_length);

std::optional<Bytes> dictionary_encode(ByteView raw, const Dictionary* dictionary);
Decoded dictionary_decode(ByteView payload, std::size_t raw_length, const Dictionary* dictionary);

std::optional<Bytes> deflate_encode(ByteView raw);
Decoded deflate_decode(ByteView payload, std::size_t raw_length);

}  // namespace ccattest::codecs
