#pragma once

#include <array>
#include <cstdint>

#include "ccattest/bytes.hpp"

namespace ccattest {

using Digest = std::array<std::uint8_t, 32>;

// Incremental SHA-256 (OpenSSL EVP underneath).
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;
  Sha256(Sha256&&) noexcept;
  Sha256& operator=(Sha256&&) noexcept;

  void update(ByteView data);
  Digest finish();

  static Digest of(ByteView data);

 private:
  void* ctx_;
};

// Hash-in-counter-mode byte stream: block i = SHA-256(seed || LE64(i)).
// Used for PRW fill, nonce-seeded permutations and verifier nonces.
class CounterStream {
 public:
  explicit CounterStream(Bytes seed) : seed_(std::move(seed)) {}

  std::uint8_t next_byte();
  std::uint64_t next_u64();
  // Uniform draw in [0, bound) by rejection sampling; bound > 0.
  std::uint64_t uniform(std::uint64_t bound);

  void fill(std::span<std::uint8_t> out);

 private:
  void refill();

  Bytes seed_;
  std::uint64_t counter_ = 0;
  Digest block_{};
  std::size_t pos_ = block_.size();
};

}  // namespace ccattest
