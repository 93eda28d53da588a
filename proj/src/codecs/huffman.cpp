// Canonical Huffman block coder.
//
// Payload layout:
//   table   0xFF followed by 256 nibble-packed code lengths (high nibble first),
//           or K-1 (K <= 63 used symbols) followed by K (symbol, length) pairs
//   bits    canonical codes, MSB first, zero padded to a byte boundary
//
// Code lengths are limited to 15 so they fit a nibble. A block with a single
// distinct symbol gets one 1-bit code.

#include <algorithm>
#include <array>
#include <cstdint>
#include <queue>
#include <vector>

#include "ccattest/error.hpp"
#include "codecs/block_codecs.hpp"

namespace ccattest::codecs {

namespace {

constexpr int kMaxCodeLength = 15;
constexpr std::size_t kMaxSparseSymbols = 63;
constexpr std::uint8_t kDenseTable = 0xFF;

using Lengths = std::array<std::uint8_t, 256>;

[[noreturn]] void corrupt(const char* why) { throw Error(Errc::kCorruptBlock, std::string("huffman: ") + why); }

// Plain Huffman construction; returns per-symbol depths.
Lengths huffman_lengths(const std::array<std::uint64_t, 256>& freq) {
  struct Node {
    std::uint64_t weight;
    int left;
    int right;
  };
  std::vector<Node> nodes;
  using Entry = std::pair<std::uint64_t, int>;  // (weight, node index)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (int s = 0; s < 256; ++s) {
    if (freq[s] == 0) continue;
    nodes.push_back({freq[s], -1 - s, -1});
    heap.emplace(freq[s], static_cast<int>(nodes.size()) - 1);
  }
  Lengths lengths{};
  if (nodes.size() == 1) {
    lengths[static_cast<std::size_t>(-1 - nodes[0].left)] = 1;
    return lengths;
  }
  while (heap.size() > 1) {
    auto [wa, a] = heap.top();
    heap.pop();
    auto [wb, b] = heap.top();
    heap.pop();
    nodes.push_back({wa + wb, a, b});
    heap.emplace(wa + wb, static_cast<int>(nodes.size()) - 1);
  }
  // Iterative depth walk from the root.
  std::vector<std::pair<int, int>> stack{{heap.top().second, 0}};
  while (!stack.empty()) {
    auto [idx, depth] = stack.back();
    stack.pop_back();
    const Node& n = nodes[static_cast<std::size_t>(idx)];
    if (n.left < 0) {
      lengths[static_cast<std::size_t>(-1 - n.left)] = static_cast<std::uint8_t>(std::min(depth, 255));
    } else {
      stack.emplace_back(n.left, depth + 1);
      stack.emplace_back(n.right, depth + 1);
    }
  }
  return lengths;
}

Lengths limited_lengths(std::array<std::uint64_t, 256> freq) {
  for (;;) {
    Lengths lengths = huffman_lengths(freq);
    if (*std::max_element(lengths.begin(), lengths.end()) <= kMaxCodeLength) return lengths;
    // Flatten the distribution and retry; converges because all nonzero
    // weights eventually become 1 (a balanced tree of depth <= 8).
    for (auto& f : freq) {
      if (f != 0) f = (f + 1) / 2;
    }
  }
}

struct Canonical {
  std::array<std::uint16_t, kMaxCodeLength + 1> count{};
  std::vector<std::uint8_t> symbols;  // sorted by (length, symbol)
  std::array<std::uint16_t, 256> code{};
};

// Validates the Kraft inequality and assigns canonical codes.
Canonical make_canonical(const Lengths& lengths) {
  Canonical c;
  int used = 0;
  for (int s = 0; s < 256; ++s) {
    if (lengths[s] > kMaxCodeLength) corrupt("code length too large");
    if (lengths[s] != 0) {
      ++c.count[lengths[s]];
      ++used;
    }
  }
  if (used == 0) corrupt("empty code table");
  std::int64_t left = 1;
  for (int len = 1; len <= kMaxCodeLength; ++len) {
    left <<= 1;
    left -= c.count[len];
    if (left < 0) corrupt("over-subscribed code");
  }
  if (left != 0 && used > 1) corrupt("incomplete code");
  for (int len = 1; len <= kMaxCodeLength; ++len) {
    for (int s = 0; s < 256; ++s) {
      if (lengths[s] == len) c.symbols.push_back(static_cast<std::uint8_t>(s));
    }
  }
  std::uint16_t next = 0;
  std::size_t k = 0;
  for (int len = 1; len <= kMaxCodeLength; ++len) {
    for (int i = 0; i < c.count[len]; ++i) c.code[c.symbols[k++]] = next++;
    next = static_cast<std::uint16_t>(next << 1);
  }
  return c;
}

class BitWriter {
 public:
  void put(std::uint32_t code, int len) {
    for (int i = len - 1; i >= 0; --i) {
      acc_ = static_cast<std::uint8_t>(acc_ << 1 | ((code >> i) & 1u));
      if (++fill_ == 8) flush();
    }
  }
  Bytes finish(Bytes out) {
    if (fill_ > 0) {
      acc_ = static_cast<std::uint8_t>(acc_ << (8 - fill_));
      flush();
    }
    out.insert(out.end(), buf_.begin(), buf_.end());
    return out;
  }

 private:
  void flush() {
    buf_.push_back(acc_);
    acc_ = 0;
    fill_ = 0;
  }
  Bytes buf_;
  std::uint8_t acc_ = 0;
  int fill_ = 0;
};

}  // namespace

std::optional<Bytes> huffman_encode(ByteView raw) {
  if (raw.empty()) return std::nullopt;
  std::array<std::uint64_t, 256> freq{};
  for (auto b : raw) ++freq[b];
  const Lengths lengths = limited_lengths(freq);
  const Canonical canon = make_canonical(lengths);

  Bytes out;
  if (canon.symbols.size() <= kMaxSparseSymbols) {
    std::vector<std::uint8_t> by_symbol(canon.symbols.begin(), canon.symbols.end());
    std::sort(by_symbol.begin(), by_symbol.end());
    out.push_back(static_cast<std::uint8_t>(by_symbol.size() - 1));
    for (auto s : by_symbol) {
      out.push_back(s);
      out.push_back(lengths[s]);
    }
  } else {
    out.push_back(kDenseTable);
    for (int s = 0; s < 256; s += 2) out.push_back(static_cast<std::uint8_t>(lengths[s] << 4 | lengths[s + 1]));
  }
  BitWriter bits;
  for (auto b : raw) bits.put(canon.code[b], lengths[b]);
  return bits.finish(std::move(out));
}

Decoded huffman_decode(ByteView payload, std::size_t raw_length) {
  if (payload.empty()) corrupt("missing table");
  Lengths lengths{};
  std::size_t pos = 1;
  if (payload[0] == kDenseTable) {
    if (payload.size() < 1 + 128) corrupt("truncated table");
    for (int s = 0; s < 256; s += 2) {
      lengths[s] = payload[pos] >> 4;
      lengths[s + 1] = payload[pos] & 0xF;
      ++pos;
    }
  } else {
    const std::size_t k = payload[0] + 1u;
    if (k > kMaxSparseSymbols) corrupt("bad table form");
    if (payload.size() < 1 + 2 * k) corrupt("truncated table");
    int prev = -1;
    for (std::size_t i = 0; i < k; ++i) {
      const std::uint8_t s = payload[pos++];
      const std::uint8_t len = payload[pos++];
      if (s <= prev || len == 0) corrupt("bad sparse table");
      prev = s;
      lengths[s] = len;
    }
  }
  const Canonical canon = make_canonical(lengths);

  Decoded result;
  result.data.reserve(raw_length);
  std::size_t bitpos = pos * 8;
  const std::size_t bit_end = payload.size() * 8;
  for (std::size_t n = 0; n < raw_length; ++n) {
    // Canonical decode: walk lengths, comparing against the first code of each.
    int code = 0;
    int first = 0;
    int index = 0;
    for (int len = 1;; ++len) {
      if (len > kMaxCodeLength) corrupt("invalid code");
      if (bitpos >= bit_end) corrupt("truncated bitstream");
      code |= (payload[bitpos / 8] >> (7 - bitpos % 8)) & 1;
      ++bitpos;
      const int count = canon.count[len];
      if (code - first < count) {
        result.data.push_back(canon.symbols[static_cast<std::size_t>(index + code - first)]);
        break;
      }
      index += count;
      first = (first + count) << 1;
      code <<= 1;
    }
  }
  result.consumed = (bitpos + 7) / 8;
  return result;
}

}  // namespace ccattest::codecs
