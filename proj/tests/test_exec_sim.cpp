#include <gtest/gtest.h>

#include <random>

#include "ccattest/error.hpp"
#include "ccattest/exec_sim.hpp"
#include "ccattest/samples.hpp"

using namespace ccattest;

namespace {

struct Fixture {
  Bytes data;
  BlockCompressedImage img;
  Lat lat;
};

Fixture make(std::size_t n, std::size_t s) {
  Fixture f;
  f.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.data[i] = static_cast<std::uint8_t>(i * 7 + i / 13);
  f.img = compress_blocks(f.data, CodecId::kCanonicalHuffman, s);
  f.lat = build_lat(f.img);
  return f;
}

}  // namespace

TEST(Cache, SequentialScanFaultsEachBlockOnce) {
  auto f = make(1024, 512);
  DecompressionCache cache(1);
  for (std::size_t a = 0; a < 1024; ++a) {
    const auto r = cache.access(a, f.img, f.lat);
    ASSERT_EQ(r.value, f.data[a]);
  }
  EXPECT_EQ(cache.misses(), 2u);
  EXPECT_EQ(cache.hits(), 1022u);
}

TEST(Cache, AlternatingBlocksThrash) {
  auto f = make(1024, 512);
  DecompressionCache cache(1);
  for (int i = 0; i < 10; ++i) cache.access(i % 2 ? 600 : 10, f.img, f.lat);
  EXPECT_EQ(cache.misses(), 10u);
}

TEST(Cache, FullResidencyOnReplay) {
  auto f = make(5000, 256);
  const auto trace = random_trace(5000, 3000, 4);
  DecompressionCache cache(f.img.block_count());
  for (auto a : trace) cache.access(a, f.img, f.lat);
  const auto first = cache.misses();
  for (auto a : trace) cache.access(a, f.img, f.lat);
  EXPECT_EQ(cache.misses(), first);
  EXPECT_LE(cache.resident_count(), cache.capacity_blocks());
}

TEST(Cache, OutOfRange) {
  auto f = make(100, 64);
  DecompressionCache cache(1);
  EXPECT_THROW(cache.access(100, f.img, f.lat), Error);
}

TEST(Cache, LruEvictsLeastRecent) {
  auto f = make(64 * 3, 64);
  DecompressionCache cache(2);
  cache.access(0, f.img, f.lat);    // miss: {0}
  cache.access(64, f.img, f.lat);   // miss: {1,0}
  cache.access(0, f.img, f.lat);    // hit:  {0,1}
  cache.access(128, f.img, f.lat);  // miss, evicts 1
  cache.access(0, f.img, f.lat);    // hit
  cache.access(64, f.img, f.lat);   // miss
  EXPECT_EQ(cache.misses(), 4u);
  EXPECT_EQ(cache.hits(), 2u);
}

TEST(RunTrace, EmptyTrace) {
  auto f = make(1000, 512);
  const auto r = run_trace({}, 2, f.img, f.lat, slow_node());
  EXPECT_EQ(r.misses, 0u);
  EXPECT_EQ(r.hits, 0u);
  EXPECT_EQ(r.bytes_decompressed, 0u);
  EXPECT_EQ(r.modeled_ms, 0.0);
}

TEST(RunTrace, BytesDecompressedIsMissesTimesBlockSize) {
  auto f = make(4096, 512);
  const auto r = run_trace(random_trace(4096, 500, 1), 2, f.img, f.lat, slow_node());
  EXPECT_EQ(r.bytes_decompressed, r.misses * 512);
  EXPECT_DOUBLE_EQ(r.modeled_ms, 1e3 * static_cast<double>(r.bytes_decompressed) / 1e6);
}

TEST(RunTrace, LruInclusionProperty) {
  const auto ci = sample_image("sense-synth");
  const auto img = compress_blocks(ci.bytes, CodecId::kLzGeneral, 128);
  const auto lat = build_lat(img);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto trace = seed % 2 ? random_trace(ci.size(), 800, seed) : looped_trace(ci.size(), 400, 8, seed);
    std::uint64_t prev = ~0ull;
    for (std::size_t k = 1; k <= img.block_count() + 1; ++k) {
      const auto m = run_trace(trace, k, img, lat, slow_node()).misses;
      ASSERT_LE(m, prev) << "seed " << seed << " k " << k;
      prev = m;
    }
  }
}

TEST(Traces, ParseAndCsv) {
  EXPECT_EQ(parse_trace("1\n\n20\n  300 \n"), (std::vector<std::size_t>{1, 20, 300}));
  EXPECT_THROW(parse_trace("12x\n"), Error);
  EXPECT_EQ(sequential_trace(4, 2), (std::vector<std::size_t>{0, 1, 2, 3, 0, 1, 2, 3}));
  EXPECT_EQ(cache_report_csv_header(), "s_h,capacity,misses,hits,bytes_decompressed,modeled_ms");
  CacheReport r{512, 2, 3, 4, 1536, 1.536};
  EXPECT_EQ(to_csv_row(r), "512,2,3,4,1536,1.536000");
}
