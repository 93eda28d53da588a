#include "ccattest/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "ccattest/error.hpp"

namespace ccattest {

std::int64_t total_gain(std::size_t honest_size, std::size_t attacker_size) {
  return static_cast<std::int64_t>(honest_size) - static_cast<std::int64_t>(attacker_size);
}

std::int64_t total_gain(ByteView ci, CodecId c_h, std::size_t s_h, CodecId c_a, std::size_t s_a) {
  return total_gain(compress_blocks(ci, c_h, s_h).compressed_size(), compress_blocks(ci, c_a, s_a).compressed_size());
}

double blocks_total(std::size_t ci_length, std::size_t s_a) {
  return static_cast<double>(ci_length) / static_cast<double>(s_a);
}

double gain_per_block(std::int64_t total_gain, double blocks_total) {
  return static_cast<double>(total_gain) / blocks_total;
}

std::optional<std::uint64_t> blocks_needed(double payload, double gain_per_block) {
  if (payload <= 0) return 0;
  if (!(gain_per_block > 0)) return std::nullopt;
  return static_cast<std::uint64_t>(std::ceil(payload / gain_per_block));
}

double memory_overhead(std::uint64_t blocks, std::size_t s_a, double ratio) {
  const double s = static_cast<double>(s_a);
  return static_cast<double>(blocks) * s * ratio * s;
}

bool AttackPlan::feasible() const {
  return blocks_needed.has_value() && static_cast<double>(*blocks_needed) <= blocks_total;
}

double AttackPlan::attacker_ratio() const {
  return ci_length == 0 ? 0.0 : static_cast<double>(attacker_size) / static_cast<double>(ci_length);
}

double memory_overhead(const AttackPlan& plan) {
  if (!plan.feasible()) throw Error(Errc::kInfeasiblePlan, "attack plan is infeasible");
  return memory_overhead(*plan.blocks_needed, plan.s_a, plan.attacker_ratio());
}

AttackPlan make_plan_from_sizes(std::size_t ci_length, CodecId c_h, std::size_t s_h, std::size_t honest_size,
                                CodecId c_a, std::size_t s_a, std::size_t attacker_size,
                                const DeviceProfile& profile, std::size_t payload, double detect_threshold_seconds) {
  require_block_size(s_h);
  require_block_size(s_a);
  if (ci_length == 0) throw Error(Errc::kEmptyImage, "attack plan on an empty image");
  AttackPlan p;
  p.c_h = c_h;
  p.s_h = s_h;
  p.c_a = c_a;
  p.s_a = s_a;
  p.ci_length = ci_length;
  p.honest_size = honest_size;
  p.attacker_size = attacker_size;
  p.bogus_payload_bytes = payload;
  p.total_gain = total_gain(honest_size, attacker_size);
  p.blocks_total = blocks_total(ci_length, s_a);
  p.gain_per_block = gain_per_block(p.total_gain, p.blocks_total);
  p.blocks_needed = blocks_needed(static_cast<double>(payload), p.gain_per_block);
  p.detect_threshold_seconds = detect_threshold_seconds;
  if (p.feasible()) {
    p.memory_overhead_bytes = memory_overhead(p);
    p.est_attest_seconds = p.memory_overhead_bytes / profile.pm_read_bw;
    p.detectable = p.est_attest_seconds > detect_threshold_seconds;
  }
  return p;
}

AttackPlan make_plan(ByteView ci, CodecId c_h, std::size_t s_h, CodecId c_a, std::size_t s_a,
                     const DeviceProfile& profile, std::size_t payload, double detect_threshold_seconds) {
  return make_plan_from_sizes(ci.size(), c_h, s_h, compress_blocks(ci, c_h, s_h).compressed_size(), c_a, s_a,
                              compress_blocks(ci, c_a, s_a).compressed_size(), profile, payload,
                              detect_threshold_seconds);
}

std::vector<AttackPlan> feasibility_sweep(ByteView ci, CodecId c_h, const std::vector<std::size_t>& s_h_set,
                                          const std::vector<CodecId>& c_a_set,
                                          const std::vector<std::size_t>& s_a_set, const DeviceProfile& profile,
                                          std::size_t payload, double detect_threshold_seconds) {
  std::map<std::pair<CodecId, std::size_t>, std::size_t> sizes;
  auto size_of = [&](CodecId c, std::size_t s) {
    auto key = std::make_pair(c, s);
    auto it = sizes.find(key);
    if (it == sizes.end()) it = sizes.emplace(key, compress_blocks(ci, c, s).compressed_size()).first;
    return it->second;
  };
  std::vector<AttackPlan> plans;
  for (auto s_h : s_h_set) {
    for (auto c_a : c_a_set) {
      for (auto s_a : s_a_set) {
        plans.push_back(make_plan_from_sizes(ci.size(), c_h, s_h, size_of(c_h, s_h), c_a, s_a, size_of(c_a, s_a),
                                             profile, payload, detect_threshold_seconds));
      }
    }
  }
  return plans;
}

std::string sweep_csv_header() {
  return "c_h,s_h,c_a,s_a,total_gain,blocks_needed,overhead_bytes,est_seconds,detectable";
}

std::string to_csv_row(const AttackPlan& p) {
  std::ostringstream out;
  out << to_string(p.c_h) << ',' << p.s_h << ',' << to_string(p.c_a) << ',' << p.s_a << ',' << p.total_gain << ',';
  if (p.feasible()) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%llu,%.0f,%.6f,%d", static_cast<unsigned long long>(*p.blocks_needed),
                  p.memory_overhead_bytes, p.est_attest_seconds, p.detectable ? 1 : 0);
    out << buf;
  } else {
    out << "infeasible,,,0";
  }
  return out.str();
}

std::vector<RatioRow> ratio_table(ByteView ci, const std::vector<CodecId>& codecs,
                                  const std::vector<std::size_t>& block_sizes) {
  std::vector<RatioRow> rows;
  for (auto c : codecs) {
    for (auto s : block_sizes) rows.push_back({c, s, ci.size(), compress_blocks(ci, c, s).compressed_size()});
  }
  return rows;
}

std::string ratio_csv_header() { return "codec,block_size,original_bytes,compressed_bytes,ratio"; }

std::string to_csv_row(const RatioRow& row) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%zu,%.6f", std::string(to_string(row.codec)).c_str(), row.block_size,
                row.original, row.compressed, row.ratio());
  return buf;
}

namespace {

// Smallest supported block size holding `n` bytes, else the largest.
std::size_t block_size_for(std::size_t n) {
  for (auto s : kBlockSizes) {
    if (s >= n) return s;
  }
  return kBlockSizes.back();
}

std::size_t attacker_footprint(const BlockCompressedImage& img) {
  return img.compressed_size() + (img.dictionary ? img.dictionary->serialize().size() : 0);
}

}  // namespace

LatGainReport lat_compression_attack(const Lat& lat, CodecId c_a) {
  LatGainReport r;
  r.codec = c_a;
  r.lat_size = lat.serialized_size();
  if (r.lat_size == 0) return r;
  const Bytes raw = lat.serialize();
  const auto compressed = compress_blocks(raw, c_a, block_size_for(raw.size()));
  r.compressed_size = attacker_footprint(compressed);
  r.gain = r.compressed_size < r.lat_size ? r.lat_size - r.compressed_size : 0;
  return r;
}

CompressionAttackProver::CompressionAttackProver(PackedImage memory, const AttackPlan& plan, DeviceProfile profile,
                                                 CompressionAttackOptions options)
    : Prover(std::move(profile)), memory_(std::move(memory)), options_(options) {
  if (memory_.manifest.codec != plan.c_h || memory_.manifest.block_size != plan.s_h) {
    throw Error(Errc::kInvalidArgument, "plan does not match the packed image's (C_h, s_h)");
  }
  honest_ = unpack(memory_).compressed;
  const Bytes ci = decompress_all(honest_);
  attacker_ = compress_blocks(ci, plan.c_a, plan.s_a);

  h_offsets_.resize(honest_.block_count());
  std::exclusive_scan(honest_.block_sizes.begin(), honest_.block_sizes.end(), h_offsets_.begin(),
                      memory_.layout.compressed.offset);
  a_offsets_.resize(attacker_.block_count());
  std::exclusive_scan(attacker_.block_sizes.begin(), attacker_.block_sizes.end(), a_offsets_.begin(),
                      std::size_t{0});

  // A group is the smallest CI span made of whole C_h and whole C_a blocks.
  const std::size_t g = std::max(plan.s_h, plan.s_a);
  for (std::size_t start = 0; start < ci.size(); start += g) {
    const std::size_t end = std::min(ci.size(), start + g);
    Group grp{};
    grp.first_h_block = start / plan.s_h;
    grp.end_h_block = (end + plan.s_h - 1) / plan.s_h;
    grp.first_a_block = start / plan.s_a;
    grp.end_a_block = (end + plan.s_a - 1) / plan.s_a;
    std::int64_t h = 0;
    std::int64_t a = 0;
    for (auto b = grp.first_h_block; b < grp.end_h_block; ++b) h += static_cast<std::int64_t>(honest_.block_sizes[b]);
    for (auto b = grp.first_a_block; b < grp.end_a_block; ++b) a += static_cast<std::int64_t>(attacker_.block_sizes[b]);
    grp.gain = h - a;
    groups_.push_back(grp);
  }

  if (options_.full_recompression) {
    selected_.resize(groups_.size());
    std::iota(selected_.begin(), selected_.end(), std::size_t{0});
  } else {
    // Best-gain groups first until the payload fits.
    std::vector<std::size_t> order(groups_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [this](std::size_t x, std::size_t y) { return groups_[x].gain > groups_[y].gain; });
    const auto need = static_cast<std::int64_t>(plan.bogus_payload_bytes);
    std::int64_t have = 0;
    for (auto idx : order) {
      if (have >= need || groups_[idx].gain <= 0) break;
      selected_.push_back(idx);
      have += groups_[idx].gain;
    }
    if (have < need) {
      throw Error(Errc::kInfeasiblePlan, "recompression frees " + std::to_string(have) + " bytes, payload needs " +
                                             std::to_string(need));
    }
    std::sort(selected_.begin(), selected_.end());
  }
  group_of_h_block_.assign(honest_.block_count(), -1);
  for (auto idx : selected_) {
    freed_ += groups_[idx].gain;
    for (auto b = groups_[idx].first_h_block; b < groups_[idx].end_h_block; ++b) {
      group_of_h_block_[b] = static_cast<std::int64_t>(idx);
    }
  }
}

std::size_t CompressionAttackProver::recompressed_attacker_blocks() const {
  std::size_t n = 0;
  for (auto idx : selected_) n += groups_[idx].end_a_block - groups_[idx].first_a_block;
  return n;
}

std::size_t CompressionAttackProver::recompressed_attacker_bytes() const {
  std::size_t n = 0;
  for (auto idx : selected_) {
    for (auto b = groups_[idx].first_a_block; b < groups_[idx].end_a_block; ++b) n += attacker_.block_sizes[b];
  }
  return n;
}

const Bytes& CompressionAttackProver::rebuilt_block(std::size_t h_block) {
  // Host-side memo only; the modeled device pays for every rebuild.
  auto it = rebuilt_.find(h_block);
  if (it != rebuilt_.end()) return it->second;
  const std::size_t lo = h_block * honest_.block_size;
  const std::size_t hi = lo + honest_.raw_length(h_block);
  const Dictionary* a_dict = attacker_.dictionary ? &*attacker_.dictionary : nullptr;
  Bytes raw;
  for (std::size_t a = lo / attacker_.block_size; a * attacker_.block_size < hi; ++a) {
    const Bytes part = decode_block(attacker_.codec, attacker_.block(a), attacker_.raw_length(a), a_dict);
    const std::size_t a_lo = a * attacker_.block_size;
    const std::size_t from = std::max(lo, a_lo) - a_lo;
    const std::size_t to = std::min(hi, a_lo + part.size()) - a_lo;
    raw.insert(raw.end(), part.begin() + static_cast<std::ptrdiff_t>(from),
               part.begin() + static_cast<std::ptrdiff_t>(to));
  }
  const Dictionary* h_dict = honest_.dictionary ? &*honest_.dictionary : nullptr;
  return rebuilt_.emplace(h_block, encode_block(honest_.codec, raw, h_dict)).first->second;
}

ProverReply CompressionAttackProver::compute(const Nonce& nonce) {
  ProverReply reply;
  CostCounters& cost = reply.cost;
  const std::size_t capacity = memory_.memory.size();
  const auto perm = derive_permutation(nonce, capacity / 2);
  const Bytes prefix = response_prefix(nonce, key());
  const Region& region = memory_.layout.compressed;
  std::int64_t cached_block = -1;

  auto read_byte = [&](std::size_t addr) -> std::uint8_t {
    if (region.contains(addr)) {
      const auto it = std::upper_bound(h_offsets_.begin(), h_offsets_.end(), addr);
      const auto h_block = static_cast<std::size_t>(it - h_offsets_.begin()) - 1;
      if (group_of_h_block_[h_block] >= 0) {
        const Bytes& block = rebuilt_block(h_block);
        if (!options_.cached || cached_block != static_cast<std::int64_t>(h_block)) {
          const std::size_t lo = h_block * honest_.block_size;
          const std::size_t hi = lo + honest_.raw_length(h_block);
          for (std::size_t a = lo / attacker_.block_size; a * attacker_.block_size < hi; ++a) {
            cost.pm_bytes += attacker_.block_sizes[a] + Lat::kEntryWidth;
            cost.add_decomp(attacker_.codec, attacker_.raw_length(a));
          }
          cached_block = static_cast<std::int64_t>(h_block);
        }
        return block[addr - h_offsets_[h_block]];
      }
    }
    ++cost.pm_bytes;
    return memory_.memory[addr];
  };

  reply.x = digest_permuted(prefix, perm, [&](std::size_t w) {
    const std::uint8_t lo = read_byte(2 * w);
    const std::uint8_t hi = read_byte(2 * w + 1);
    return static_cast<std::uint16_t>(lo | hi << 8);
  });
  cost.hash_bytes = prefix.size() + capacity;
  return reply;
}

ExternalMemoryProver::ExternalMemoryProver(PackedImage memory, DeviceProfile profile,
                                           std::optional<double> ext_bandwidth)
    : Prover([&] {
        if (ext_bandwidth) profile.em_read_bw = *ext_bandwidth;
        profile.validate();
        return std::move(profile);
      }()),
      memory_(std::move(memory)) {}

ProverReply ExternalMemoryProver::compute(const Nonce& nonce) {
  ProverReply r;
  r.x = response_over(memory_.memory, nonce, key());
  r.cost.em_bytes = memory_.memory.size();
  r.cost.hash_bytes = response_prefix(nonce, key()).size() + memory_.memory.size();
  return r;
}

void ReplayProver::observe(const Nonce& nonce, const Digest& x) {
  recorded_[nonce] = x;
  latest_ = x;
}

ProverReply ReplayProver::compute(const Nonce& nonce) {
  ProverReply r;
  if (auto it = recorded_.find(nonce); it != recorded_.end()) {
    r.x = it->second;
    ++replays_;
  } else if (latest_) {
    r.x = *latest_;
  }
  return r;
}

LatCompressorProver::LatCompressorProver(PackedImage memory, CodecId c_a, DeviceProfile profile)
    : Prover(std::move(profile)), memory_(std::move(memory)), c_a_(c_a) {
  if (!memory_.layout.lat) throw Error(Errc::kOptionMismatch, "LAT compression needs an option 2b image");
  const ByteView lat = memory_.region(*memory_.layout.lat);
  gain_ = lat_compression_attack(Lat::parse(lat), c_a);
  compressed_lat_ = compress_blocks(lat, c_a, block_size_for(lat.size()));
  if (decompress_all(compressed_lat_) != Bytes(lat.begin(), lat.end())) {
    throw Error(Errc::kCorruptBlock, "LAT recompression is not lossless");
  }
}

ProverReply LatCompressorProver::compute(const Nonce& nonce) {
  ProverReply r;
  const Region lat = *memory_.layout.lat;
  const std::size_t capacity = memory_.memory.size();
  const auto perm = derive_permutation(nonce, capacity / 2);
  const Bytes prefix = response_prefix(nonce, key());
  auto read_byte = [&](std::size_t addr) {
    if (lat.contains(addr)) {
      const std::size_t block = (addr - lat.offset) / compressed_lat_.block_size;
      r.cost.pm_bytes += compressed_lat_.block_sizes[block];
      r.cost.add_decomp(c_a_, compressed_lat_.raw_length(block));
    } else {
      ++r.cost.pm_bytes;
    }
    return memory_.memory[addr];
  };
  r.x = digest_permuted(prefix, perm, [&](std::size_t w) {
    const std::uint8_t lo = read_byte(2 * w);
    const std::uint8_t hi = read_byte(2 * w + 1);
    return static_cast<std::uint16_t>(lo | hi << 8);
  });
  r.cost.hash_bytes = prefix.size() + capacity;
  return r;
}

std::vector<std::string> attacker_names() {
  return {"honest", "compression", "external-memory", "replay", "lat-compressor"};
}

}  // namespace ccattest
