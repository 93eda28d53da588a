#include <gtest/gtest.h>

#include <cmath>

#include "ccattest/adversary.hpp"
#include "ccattest/error.hpp"
#include "ccattest/samples.hpp"

using namespace ccattest;

TEST(Formulas, TotalGain) {
  EXPECT_EQ(total_gain(20000, 17000), 3000);
  EXPECT_EQ(total_gain(100, 130), -30);
  const auto ci = sample_image("sense-synth");
  EXPECT_EQ(total_gain(ci.bytes, CodecId::kLzGeneral, 512, CodecId::kLzGeneral, 512), 0);
}

TEST(Formulas, BlocksNeededHandExample) {
  const double bt = blocks_total(64 * 512, 512);
  EXPECT_DOUBLE_EQ(bt, 64.0);
  const double gpb = gain_per_block(2048, bt);
  EXPECT_DOUBLE_EQ(gpb, 32.0);
  EXPECT_EQ(blocks_needed(1024, gpb), 32u);
  EXPECT_EQ(blocks_needed(1025, gpb), 33u);  // ceiling
  EXPECT_EQ(blocks_needed(0, gpb), 0u);
  EXPECT_FALSE(blocks_needed(1024, 0.0).has_value());
  EXPECT_FALSE(blocks_needed(1024, -3.0).has_value());
}

TEST(Formulas, MemoryOverhead) {
  EXPECT_NEAR(memory_overhead(9, 2048, 0.51), 19'251'855.36, 1e-3);
  EXPECT_EQ(memory_overhead(0, 2048, 0.51), 0.0);
  // full-image recompression read volume: s_a * |C_a(CI)| with ~18 KB
  EXPECT_NEAR(2048.0 * 18000 / 1e6, 36.9, 0.1);
}

TEST(Plan, IdenticalPipelineIsInfeasibleUnlessNoPayload) {
  const auto ci = sample_image("oscilloscope-synth");
  const auto p = make_plan(ci.bytes, CodecId::kLzGeneral, 512, CodecId::kLzGeneral, 512, slow_node());
  EXPECT_EQ(p.total_gain, 0);
  EXPECT_FALSE(p.feasible());
  EXPECT_THROW(memory_overhead(p), Error);
  const auto zero = make_plan(ci.bytes, CodecId::kLzGeneral, 512, CodecId::kLzGeneral, 512, slow_node(), 0);
  EXPECT_TRUE(zero.feasible());
  EXPECT_EQ(memory_overhead(zero), 0.0);
}

TEST(Plan, FromSizes) {
  const auto p = make_plan_from_sizes(25906, CodecId::kCanonicalHuffman, 512, 20000, CodecId::kLzGeneral, 2048, 17000,
                                      slow_node());
  EXPECT_EQ(p.total_gain, 3000);
  EXPECT_NEAR(p.blocks_total, 25906.0 / 2048, 1e-12);
  EXPECT_EQ(*p.blocks_needed, static_cast<std::uint64_t>(std::ceil(1024 / (3000 / (25906.0 / 2048)))));
  EXPECT_TRUE(p.feasible());
  EXPECT_NEAR(p.memory_overhead_bytes, *p.blocks_needed * 2048.0 * (17000.0 / 25906) * 2048, 1e-6);
  EXPECT_DOUBLE_EQ(p.est_attest_seconds, p.memory_overhead_bytes / 1e6);
  EXPECT_EQ(p.detectable, p.est_attest_seconds > kDefaultDetectSeconds);
}

TEST(Plan, NeedsMoreBlocksThanExistIsInfeasible) {
  const auto p =
      make_plan_from_sizes(2048, CodecId::kLzGeneral, 512, 1500, CodecId::kLzGeneral, 2048, 1400, slow_node());
  // gain 100 over one block cannot cover 1024 bytes
  EXPECT_FALSE(p.feasible());
}

TEST(Plan, SmallAttackerBlocksOnRandomDataGainNothing) {
  const CodeImage rnd{generate_prw({3, 8192}), "random"};
  const auto p = make_plan(rnd.bytes, CodecId::kLzGeneral, 512, CodecId::kCanonicalHuffman, 128, slow_node());
  EXPECT_LE(p.total_gain, 0);
  EXPECT_FALSE(p.feasible());
}

TEST(Sweep, LargestHonestBlockLeavesNoUndetectablePlan) {
  for (const auto& spec : kSamples) {
    const auto ci = sample_image(spec);
    for (auto c_h : {CodecId::kLzGeneral, CodecId::kCanonicalHuffman}) {
      const auto plans = feasibility_sweep(ci.bytes, c_h, {2048}, {kAllCodecs.begin(), kAllCodecs.end()},
                                           {kBlockSizes.begin(), kBlockSizes.end()}, slow_node());
      for (const auto& p : plans) EXPECT_TRUE(!p.feasible() || p.detectable) << to_csv_row(p);
    }
  }
}

TEST(Sweep, DetectableFromHalfKilobyteUpWithLz) {
  // With lz-general as C_h, every feasible plan at s_h >= 512 exceeds 5 s.
  for (const auto& spec : kSamples) {
    const auto plans =
        feasibility_sweep(sample_image(spec).bytes, CodecId::kLzGeneral, {512, 1024, 2048},
                          {kAllCodecs.begin(), kAllCodecs.end()}, {kBlockSizes.begin(), kBlockSizes.end()},
                          slow_node());
    for (const auto& p : plans) EXPECT_TRUE(!p.feasible() || p.detectable) << to_csv_row(p);
  }
}

TEST(Sweep, ShapeAndEmptyMenu) {
  const auto ci = sample_image("sense-synth");
  EXPECT_TRUE(feasibility_sweep(ci.bytes, CodecId::kLzGeneral, {512}, {}, {512}, slow_node()).empty());
  const auto plans = feasibility_sweep(ci.bytes, CodecId::kLzGeneral, {256, 512},
                                       {CodecId::kLzGeneral, CodecId::kCanonicalHuffman}, {512, 1024, 2048},
                                       slow_node());
  EXPECT_EQ(plans.size(), 2u * 2 * 3);
  EXPECT_EQ(sweep_csv_header(), "c_h,s_h,c_a,s_a,total_gain,blocks_needed,overhead_bytes,est_seconds,detectable");
  for (const auto& p : plans) {
    const auto row = to_csv_row(p);
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 8) << row;
  }
}

TEST(LatAttack, SmallLatsGainNothing) {
  const auto lat18 = build_lat(compress_blocks(sample_image("sense-synth").bytes, CodecId::kLzGeneral, 512));
  ASSERT_EQ(lat18.serialized_size(), 18u);
  for (auto c : kAllCodecs) EXPECT_EQ(lat_compression_attack(lat18, c).gain, 0u) << to_string(c);
  for (auto c : kAllCodecs) EXPECT_EQ(lat_compression_attack(Lat{}, c).gain, 0u);
}

TEST(LatAttack, OscilloscopeGainIsTiny) {
  const auto lat = build_lat(compress_blocks(sample_image("oscilloscope-synth").bytes, CodecId::kLzGeneral, 512));
  ASSERT_EQ(lat.serialized_size(), 153u);
  for (auto c : kAllCodecs) {
    const auto r = lat_compression_attack(lat, c);
    EXPECT_EQ(r.lat_size, 153u);
    EXPECT_EQ(r.gain, r.compressed_size < 153 ? 153 - r.compressed_size : 0);
  }
}

class AttackFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    ci = sample_image("oscilloscope-synth");
    img = pack(ci, CodecId::kCanonicalHuffman, 512, kDefaultCapacity, 0x5EED, ProtocolOption::k2b);
    policy.option = ProtocolOption::k2b;
  }
  CodeImage ci;
  PackedImage img;
  VerifierPolicy policy;
};

TEST_F(AttackFixture, ZeroRecompressionCostsLikeHonest) {
  const auto plan = make_plan(ci.bytes, CodecId::kCanonicalHuffman, 512, CodecId::kLzGeneral, 2048, slow_node(), 0);
  CompressionAttackProver atk(img, plan, slow_node());
  EXPECT_EQ(atk.recompressed_groups(), 0u);
  HonestProver honest(img, slow_node());
  const Nonce n{5, 8};
  const auto a = atk.respond(n, 0);
  const auto h = honest.respond(n, 0);
  EXPECT_EQ(a->cost, h->cost);
  EXPECT_EQ(a->x, h->x);
}

TEST_F(AttackFixture, CorrectDigestAndStrictlyMoreCost) {
  HonestProver honest(img, slow_node());
  for (auto c_a : kAllCodecs) {
    for (std::size_t s_a : {1024, 2048}) {
      const auto plan = make_plan(ci.bytes, CodecId::kCanonicalHuffman, 512, c_a, s_a, slow_node());
      if (!plan.feasible()) continue;
      CompressionAttackProver atk(img, plan, slow_node());
      EXPECT_GE(atk.freed_bytes(), 1024);
      EXPECT_GE(atk.recompressed_groups(), 1u);
      const Nonce n{1000 + s_a, 8};
      const auto a = atk.respond(n, 0);
      const auto h = honest.respond(n, 0);
      EXPECT_EQ(a->x, compute_response(img, n, policy));
      EXPECT_GT(elapsed(a->cost, slow_node()), elapsed(h->cost, slow_node()));
    }
  }
}

TEST_F(AttackFixture, CachedVariantIsCheaper) {
  const auto plan =
      make_plan(ci.bytes, CodecId::kCanonicalHuffman, 512, CodecId::kLzGeneral, 2048, slow_node());
  ASSERT_TRUE(plan.feasible());
  CompressionAttackProver worst(img, plan, slow_node());
  CompressionAttackOptions cached;
  cached.cached = true;
  CompressionAttackProver cheap(img, plan, slow_node(), cached);
  const Nonce n{31, 8};
  const auto a = worst.respond(n, 0);
  const auto b = cheap.respond(n, 0);
  EXPECT_EQ(a->x, b->x);
  EXPECT_LT(elapsed(b->cost, slow_node()), elapsed(a->cost, slow_node()));
}

TEST_F(AttackFixture, InfeasiblePayloadRejected) {
  const auto plan = make_plan(ci.bytes, CodecId::kCanonicalHuffman, 512, CodecId::kLzGeneral, 2048, slow_node(),
                              ci.size());
  try {
    CompressionAttackProver atk(img, plan, slow_node());
    FAIL() << "expected infeasible";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kInfeasiblePlan);
  }
}

TEST_F(AttackFixture, FullRecompressionReadVolume) {
  for (std::size_t s_a : {512, 1024, 2048}) {
    const auto plan = make_plan(ci.bytes, CodecId::kCanonicalHuffman, 512, CodecId::kLzGeneral, s_a, slow_node(), 0);
    CompressionAttackOptions full;
    full.full_recompression = true;
    CompressionAttackProver atk(img, plan, slow_node(), full);
    const auto r = atk.respond(Nonce{s_a, 8}, 0);
    const double extra = static_cast<double>(r->cost.pm_bytes - (img.memory.size() - img.layout.compressed.length));
    const double law = static_cast<double>(s_a) * static_cast<double>(atk.attacker_compressed_size());
    EXPECT_GE(extra / law, 0.5);
    EXPECT_LE(extra / law, 2.0);
  }
}

TEST_F(AttackFixture, ExternalMemory) {
  const Nonce n{8, 8};
  ExternalMemoryProver same(img, slow_node(), slow_node().pm_read_bw);
  HonestProver honest(img, slow_node());
  EXPECT_DOUBLE_EQ(elapsed(same.respond(n, 0)->cost, same.profile()),
                   elapsed(honest.respond(n, 0)->cost, honest.profile()));

  // read component: 131072 bytes at 1 MB/s vs 50 MB/s
  ExternalMemoryProver slow(img, slow_node(), 1e6);
  const auto c = slow.respond(n, 0)->cost;
  EXPECT_NEAR(static_cast<double>(c.em_bytes) / 1e6, 0.131, 0.001);
  EXPECT_NEAR(static_cast<double>(c.em_bytes) / 50e6, 0.0026, 0.0001);
  EXPECT_EQ(slow.respond(n, 0)->x, compute_response(img, n, policy));
}

TEST_F(AttackFixture, LatCompressorCorrectAndSlower) {
  LatCompressorProver lc(img, CodecId::kLzGeneral, slow_node());
  HonestProver honest(img, slow_node());
  const Nonce n{77, 8};
  const auto a = lc.respond(n, 0);
  EXPECT_EQ(a->x, compute_response(img, n, policy));
  EXPECT_GT(elapsed(a->cost, slow_node()), elapsed(honest.respond(n, 0)->cost, slow_node()));
  const auto o1 = pack(ci, CodecId::kLzGeneral, 512, kDefaultCapacity, 1, ProtocolOption::k1);
  EXPECT_THROW(LatCompressorProver(o1, CodecId::kLzGeneral, slow_node()), Error);
}

TEST(Ratios, TableAndCsv) {
  const auto ci = sample_image("sense-synth");
  const auto rows = ratio_table(ci.bytes, {CodecId::kLzGeneral}, {512, 2048});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].original, 2860u);
  EXPECT_EQ(ratio_csv_header(), "codec,block_size,original_bytes,compressed_bytes,ratio");
  EXPECT_EQ(to_csv_row(rows[0]).rfind("lz-general,512,2860,", 0), 0u);
}
