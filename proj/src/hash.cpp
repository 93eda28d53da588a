#include "ccattest/hash.hpp"

#include <openssl/evp.h>

#include <limits>
#include <stdexcept>
#include <utility>

namespace ccattest {

namespace {
EVP_MD_CTX* as_ctx(void* p) { return static_cast<EVP_MD_CTX*>(p); }
}  // namespace

Sha256::Sha256() : ctx_(EVP_MD_CTX_new()) {
  if (ctx_ == nullptr || EVP_DigestInit_ex(as_ctx(ctx_), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("EVP sha256 init failed");
  }
}

Sha256::~Sha256() {
  if (ctx_ != nullptr) EVP_MD_CTX_free(as_ctx(ctx_));
}

Sha256::Sha256(Sha256&& other) noexcept : ctx_(std::exchange(other.ctx_, nullptr)) {}

Sha256& Sha256::operator=(Sha256&& other) noexcept {
  if (this != &other) {
    if (ctx_ != nullptr) EVP_MD_CTX_free(as_ctx(ctx_));
    ctx_ = std::exchange(other.ctx_, nullptr);
  }
  return *this;
}

void Sha256::update(ByteView data) {
  if (!data.empty()) EVP_DigestUpdate(as_ctx(ctx_), data.data(), data.size());
}

Digest Sha256::finish() {
  Digest out{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(as_ctx(ctx_), out.data(), &len);
  EVP_DigestInit_ex(as_ctx(ctx_), EVP_sha256(), nullptr);
  return out;
}

Digest Sha256::of(ByteView data) {
  Sha256 h;
  h.update(data);
  return h.finish();
}

void CounterStream::refill() {
  Bytes input = seed_;
  put_le(input, counter_++, 8);
  block_ = Sha256::of(input);
  pos_ = 0;
}

std::uint8_t CounterStream::next_byte() {
  if (pos_ == block_.size()) refill();
  return block_[pos_++];
}

std::uint64_t CounterStream::next_u64() {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(next_byte()) << (8 * i);
  return v;
}

std::uint64_t CounterStream::uniform(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Accept v < 2^64 - (2^64 mod bound) so every residue is equally likely.
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t excess = (max % bound + 1) % bound;
  for (;;) {
    std::uint64_t v = next_u64();
    if (excess == 0 || v <= max - excess) return v % bound;
  }
}

void CounterStream::fill(std::span<std::uint8_t> out) {
  for (auto& b : out) b = next_byte();
}

}  // namespace ccattest
