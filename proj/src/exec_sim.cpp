#include "ccattest/exec_sim.hpp"

#include <cstdio>
#include <random>
#include <sstream>

#include "ccattest/error.hpp"
#include "ccattest/keyvalue.hpp"

namespace ccattest {

DecompressionCache::DecompressionCache(std::size_t capacity_blocks) : capacity_(capacity_blocks) {
  if (capacity_blocks == 0) throw Error(Errc::kInvalidArgument, "cache needs at least one block");
}

DecompressionCache::Access DecompressionCache::access(std::size_t addr, const BlockCompressedImage& img,
                                                      const Lat& lat) {
  if (addr >= img.original_length) {
    throw Error(Errc::kIndexOutOfRange, "address " + std::to_string(addr) + " outside code image");
  }
  const std::size_t block = addr / img.block_size;
  const std::size_t offset = addr % img.block_size;
  if (auto it = index_.find(block); it != index_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second);
    ++hits_;
    return {lru_.front().data[offset], true};
  }
  Bytes data = decompress_block(img, lat, block);
  ++misses_;
  bytes_decompressed_ += img.block_size;
  if (lru_.size() == capacity_) {
    index_.erase(lru_.back().block);
    lru_.pop_back();
  }
  lru_.push_front({block, std::move(data)});
  index_[block] = lru_.begin();
  return {lru_.front().data[offset], false};
}

CacheReport run_trace(const std::vector<std::size_t>& trace, std::size_t capacity_blocks,
                      const BlockCompressedImage& img, const Lat& lat, const DeviceProfile& profile) {
  DecompressionCache cache(capacity_blocks);
  for (auto addr : trace) cache.access(addr, img, lat);
  CacheReport r;
  r.block_size = img.block_size;
  r.capacity_blocks = capacity_blocks;
  r.misses = cache.misses();
  r.hits = cache.hits();
  r.bytes_decompressed = cache.bytes_decompressed();
  CostCounters cost;
  cost.add_decomp(img.codec, r.bytes_decompressed);
  r.modeled_ms = elapsed(cost, profile) * 1e3;
  return r;
}

std::string cache_report_csv_header() { return "s_h,capacity,misses,hits,bytes_decompressed,modeled_ms"; }

std::string to_csv_row(const CacheReport& r) {
  char ms[64];
  std::snprintf(ms, sizeof ms, "%.6f", r.modeled_ms);
  std::ostringstream out;
  out << r.block_size << ',' << r.capacity_blocks << ',' << r.misses << ',' << r.hits << ','
      << r.bytes_decompressed << ',' << ms;
  return out.str();
}

std::vector<std::size_t> parse_trace(const std::string& text) {
  std::vector<std::size_t> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    line = line.substr(b, line.find_last_not_of(" \t\r") - b + 1);
    out.push_back(parse_u64(line, "trace address"));
  }
  return out;
}

std::vector<std::size_t> sequential_trace(std::size_t length, std::size_t passes) {
  std::vector<std::size_t> out;
  out.reserve(length * passes);
  for (std::size_t p = 0; p < passes; ++p) {
    for (std::size_t a = 0; a < length; ++a) out.push_back(a);
  }
  return out;
}

std::vector<std::size_t> looped_trace(std::size_t length, std::size_t loop_span, std::size_t iterations,
                                      std::uint64_t seed) {
  // Straight-line runs punctuated by short loops, a crude stand-in for code.
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> out;
  std::size_t pc = 0;
  for (std::size_t i = 0; i < iterations; ++i) {
    const std::size_t start = pc;
    const std::size_t span = std::min(loop_span, length - start);
    const std::size_t reps = 1 + rng() % 8;
    for (std::size_t r = 0; r < reps; ++r) {
      for (std::size_t a = start; a < start + span; a += 2) out.push_back(a);
    }
    pc = (start + span + (rng() % 64) * 2) % length;
    if (rng() % 16 == 0) pc = (rng() % (length / 2)) * 2;
  }
  return out;
}

std::vector<std::size_t> random_trace(std::size_t length, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dist(0, length - 1);
  std::vector<std::size_t> out(count);
  for (auto& a : out) a = dist(rng);
  return out;
}

}  // namespace ccattest
