#pragma once

#include <cstddef>
#include <cstdint>
#include <list>
#include <string>
#include <unordered_map>
#include <vector>

#include "ccattest/codec.hpp"
#include "ccattest/timing.hpp"

namespace ccattest {

// LRU cache of decompressed blocks in front of a LAT-addressed compressed
// image; one entry holds one block of s_h bytes.
class DecompressionCache {
 public:
  explicit DecompressionCache(std::size_t capacity_blocks = 1);

  struct Access {
    std::uint8_t value;
    bool hit;
  };

  // Throws Error(kIndexOutOfRange) if addr >= original length.
  Access access(std::size_t addr, const BlockCompressedImage& img, const Lat& lat);

  std::size_t capacity_blocks() const { return capacity_; }
  std::size_t resident_count() const { return lru_.size(); }
  std::uint64_t misses() const { return misses_; }
  std::uint64_t hits() const { return hits_; }
  std::uint64_t bytes_decompressed() const { return bytes_decompressed_; }

 private:
  struct Line {
    std::size_t block;
    Bytes data;
  };
  std::size_t capacity_;
  std::list<Line> lru_;  // front = most recent
  std::unordered_map<std::size_t, std::list<Line>::iterator> index_;
  std::uint64_t misses_ = 0;
  std::uint64_t hits_ = 0;
  std::uint64_t bytes_decompressed_ = 0;
};

struct CacheReport {
  std::size_t block_size = 0;
  std::size_t capacity_blocks = 0;
  std::uint64_t misses = 0;
  std::uint64_t hits = 0;
  std::uint64_t bytes_decompressed = 0;
  double modeled_ms = 0;
};

CacheReport run_trace(const std::vector<std::size_t>& trace, std::size_t capacity_blocks,
                      const BlockCompressedImage& img, const Lat& lat, const DeviceProfile& profile);

std::string cache_report_csv_header();
std::string to_csv_row(const CacheReport& r);

// One decimal address per line; blank lines ignored.
std::vector<std::size_t> parse_trace(const std::string& text);

// Synthetic workloads, labeled as such in reports.
std::vector<std::size_t> sequential_trace(std::size_t length, std::size_t passes = 1);
std::vector<std::size_t> looped_trace(std::size_t length, std::size_t loop_span, std::size_t iterations,
                                      std::uint64_t seed);
std::vector<std::size_t> random_trace(std::size_t length, std::size_t count, std::uint64_t seed);

}  // namespace ccattest
