#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ccattest/attestation.hpp"
#include "ccattest/codec.hpp"
#include "ccattest/image.hpp"
#include "ccattest/timing.hpp"

namespace ccattest {

// |~CI| + |C_a^-1| + |LAT_a| presets.
inline constexpr std::size_t kDefaultBogusPayload = 1024;
inline constexpr std::size_t kHuffmanRoutinePayload = 1707;

// Overhead above 5 MB at 1 MB/s, i.e. more than 5 s of extra reading.
inline constexpr double kDefaultDetectSeconds = 5.0;

// TotalGain = |C_h(CI)| - |C_a(CI)|; may be <= 0.
std::int64_t total_gain(std::size_t honest_size, std::size_t attacker_size);
std::int64_t total_gain(ByteView ci, CodecId c_h, std::size_t s_h, CodecId c_a, std::size_t s_a);

// #Blocks_total = |CI| / s_a (real valued).
double blocks_total(std::size_t ci_length, std::size_t s_a);
// GainPerBlock = TotalGain / #Blocks_total.
double gain_per_block(std::int64_t total_gain, double blocks_total);
// ceil(payload / gain_per_block); nullopt marks an infeasible attack
// (non-positive gain per block).
std::optional<std::uint64_t> blocks_needed(double payload, double gain_per_block);
// blocks * s_a * ratio * s_a, ratio = |C_a(CI)| / |CI|.
double memory_overhead(std::uint64_t blocks, std::size_t s_a, double ratio);

struct AttackPlan {
  CodecId c_h = CodecId::kLzGeneral;
  std::size_t s_h = 512;
  CodecId c_a = CodecId::kLzGeneral;
  std::size_t s_a = 512;
  std::size_t ci_length = 0;
  std::size_t honest_size = 0;    // |C_h(CI)|
  std::size_t attacker_size = 0;  // |C_a(CI)|
  std::size_t bogus_payload_bytes = kDefaultBogusPayload;
  std::int64_t total_gain = 0;
  double blocks_total = 0;
  double gain_per_block = 0;
  std::optional<std::uint64_t> blocks_needed;
  double memory_overhead_bytes = 0;
  double est_attest_seconds = 0;  // overhead read time at the profile's pm bandwidth
  double detect_threshold_seconds = kDefaultDetectSeconds;
  bool detectable = false;

  // blocks_needed exists and does not exceed #Blocks_total.
  bool feasible() const;
  double attacker_ratio() const;
};

// Throws Error(kInfeasiblePlan) for infeasible plans.
double memory_overhead(const AttackPlan& plan);

AttackPlan make_plan(ByteView ci, CodecId c_h, std::size_t s_h, CodecId c_a, std::size_t s_a,
                     const DeviceProfile& profile, std::size_t payload = kDefaultBogusPayload,
                     double detect_threshold_seconds = kDefaultDetectSeconds);
// Same, with precomputed compressed sizes.
AttackPlan make_plan_from_sizes(std::size_t ci_length, CodecId c_h, std::size_t s_h, std::size_t honest_size,
                                CodecId c_a, std::size_t s_a, std::size_t attacker_size,
                                const DeviceProfile& profile, std::size_t payload = kDefaultBogusPayload,
                                double detect_threshold_seconds = kDefaultDetectSeconds);

// Every (c_a, s_a) against every s_h. Compressed sizes are computed once per
// (codec, block size).
std::vector<AttackPlan> feasibility_sweep(ByteView ci, CodecId c_h, const std::vector<std::size_t>& s_h_set,
                                          const std::vector<CodecId>& c_a_set,
                                          const std::vector<std::size_t>& s_a_set, const DeviceProfile& profile,
                                          std::size_t payload = kDefaultBogusPayload,
                                          double detect_threshold_seconds = kDefaultDetectSeconds);

std::string sweep_csv_header();
std::string to_csv_row(const AttackPlan& plan);

struct RatioRow {
  CodecId codec;
  std::size_t block_size;
  std::size_t original;
  std::size_t compressed;
  double ratio() const { return static_cast<double>(compressed) / static_cast<double>(original); }
};
std::vector<RatioRow> ratio_table(ByteView ci, const std::vector<CodecId>& codecs,
                                  const std::vector<std::size_t>& block_sizes);
std::string ratio_csv_header();
std::string to_csv_row(const RatioRow& row);

struct LatGainReport {
  CodecId codec;
  std::size_t lat_size = 0;
  std::size_t compressed_size = 0;  // includes any dictionary the attacker must keep
  std::size_t gain = 0;             // max(0, lat - compressed)
};

LatGainReport lat_compression_attack(const Lat& lat, CodecId c_a);

struct CompressionAttackOptions {
  // Keep the last rebuilt C_h block (sensitivity analysis); default is the
  // cache-less worst case.
  bool cached = false;
  // Recompress every block regardless of payload and skip the capacity
  // check; used to measure the read-volume law.
  bool full_recompression = false;
};

// Compression attacker: reconstructs CI from C_h(CI), recompresses it with
// (C_a, s_a) and keeps only the groups it needs to free room for the bogus
// payload. During attestation every byte of a replaced C_h block is rebuilt
// from the attacker's store: decompress the covering C_a block(s) (reading
// them plus their LAT_a entries from program memory), then re-encode with C_h.
class CompressionAttackProver : public Prover {
 public:
  // Throws Error(kInfeasiblePlan) if the recompressed groups cannot free
  // enough memory for the payload.
  CompressionAttackProver(PackedImage memory, const AttackPlan& plan, DeviceProfile profile,
                          CompressionAttackOptions options = {});

  std::string model_name() const override { return "compression"; }

  std::size_t recompressed_groups() const { return selected_.size(); }
  std::size_t recompressed_attacker_blocks() const;
  std::int64_t freed_bytes() const { return freed_; }
  // Sum of |C_a| over the recompressed attacker blocks.
  std::size_t recompressed_attacker_bytes() const;
  std::size_t attacker_compressed_size() const { return attacker_.compressed_size(); }

 protected:
  ProverReply compute(const Nonce& nonce) override;

 private:
  struct Group {
    std::size_t first_h_block;
    std::size_t end_h_block;
    std::size_t first_a_block;
    std::size_t end_a_block;
    std::int64_t gain;
  };

  const Bytes& rebuilt_block(std::size_t h_block);

  PackedImage memory_;
  CompressionAttackOptions options_;
  BlockCompressedImage honest_;
  BlockCompressedImage attacker_;
  std::vector<std::size_t> h_offsets_;  // start of each C_h block in memory
  std::vector<std::size_t> a_offsets_;  // start of each C_a block in the attacker's stream
  std::vector<Group> groups_;
  std::vector<std::size_t> selected_;
  std::vector<std::int64_t> group_of_h_block_;  // -1 when untouched
  std::int64_t freed_ = 0;
  std::map<std::size_t, Bytes> rebuilt_;
};

// Every attested word is fetched from external memory.
class ExternalMemoryProver : public Prover {
 public:
  // `profile.em_read_bw` is replaced by ext_bandwidth when given.
  ExternalMemoryProver(PackedImage memory, DeviceProfile profile, std::optional<double> ext_bandwidth = {});
  std::string model_name() const override { return "external-memory"; }

 protected:
  ProverReply compute(const Nonce& nonce) override;

 private:
  PackedImage memory_;
};

// Replays eavesdropped (nonce, x) pairs. On an unseen nonce it can only
// resend its latest recording (or zeros).
class ReplayProver : public Prover {
 public:
  explicit ReplayProver(DeviceProfile profile) : Prover(std::move(profile)) {}
  std::string model_name() const override { return "replay"; }

  void observe(const Nonce& nonce, const Digest& x);
  std::size_t recorded() const { return recorded_.size(); }
  std::size_t replays() const { return replays_; }

 protected:
  ProverReply compute(const Nonce& nonce) override;

 private:
  std::map<Nonce, Digest> recorded_;
  std::optional<Digest> latest_;
  std::size_t replays_ = 0;
};

// Stores C_a(LAT_h) instead of LAT_h (option 2b images only); each visited
// LAT byte costs a cache-less decompression of the compressed LAT.
class LatCompressorProver : public Prover {
 public:
  LatCompressorProver(PackedImage memory, CodecId c_a, DeviceProfile profile);
  std::string model_name() const override { return "lat-compressor"; }
  const LatGainReport& gain() const { return gain_; }

 protected:
  ProverReply compute(const Nonce& nonce) override;

 private:
  PackedImage memory_;
  CodecId c_a_;
  BlockCompressedImage compressed_lat_;
  LatGainReport gain_;
};

// Bundled attacker names: honest, compression, external-memory, replay,
// lat-compressor.
std::vector<std::string> attacker_names();

}  // namespace ccattest
