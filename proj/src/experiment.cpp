#include "ccattest/experiment.hpp"

#include <cmath>
#include <limits>

#include "ccattest/error.hpp"
#include "ccattest/samples.hpp"

namespace ccattest {

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error(Errc::kBadConfig, key + ": expected a boolean, got '" + v + "'");
}

std::vector<std::size_t> parse_sizes(const KeyValues& kv, const std::string& key, bool block_sizes) {
  std::vector<std::size_t> out;
  for (const auto& item : kv.get_list(key)) {
    const auto n = static_cast<std::size_t>(parse_u64(item, key));
    if (block_sizes) require_block_size(n);
    out.push_back(n);
  }
  return out;
}

ImageFormat parse_format(const std::string& v) {
  if (v == "raw" || v == "bin") return ImageFormat::kRaw;
  if (v == "ihex" || v == "hex") return ImageFormat::kIntelHex;
  throw Error(Errc::kBadConfig, "image_format: expected raw or ihex, got '" + v + "'");
}

const std::string kProfilePrefix = "profile.";

}  // namespace

const std::set<std::string>& ExperimentConfig::known_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k{
        "image", "image_format", "sample", "packed", "codec", "block_size", "block_sizes", "capacity", "option",
        "prw_seed", "profile", "auto_calibrate", "margin", "t_em", "t_pm", "attacker", "attacker_codecs",
        "attacker_block_sizes", "c_a", "s_a", "payload", "cached_attacker", "ext_bandwidth", "detect_seconds",
        "runs", "seed", "nonce_width", "jitter", "key", "rate_epoch", "rate_n_max", "out", "ratio_out", "trace",
        "trace_kind", "trace_length", "cache_capacities"};
    for (const char* p : {"name", "pm_read_bw", "em_read_bw", "hash_bw"}) k.insert(kProfilePrefix + p);
    for (auto c : kAllCodecs) k.insert(kProfilePrefix + "decomp_bw." + std::string(to_string(c)));
    return k;
  }();
  return keys;
}

ExperimentConfig ExperimentConfig::from(const KeyValues& kv) {
  kv.require_known(known_keys());
  ExperimentConfig c;
  auto str = [&](const char* key, std::string& dst) {
    if (kv.has(key)) dst = kv.get(key);
  };
  auto size = [&](const char* key, std::size_t& dst) {
    if (kv.has(key)) dst = static_cast<std::size_t>(kv.get_u64(key));
  };
  auto real = [&](const char* key, double& dst) {
    if (kv.has(key)) dst = kv.get_double(key);
  };
  auto opt_real = [&](const char* key, std::optional<double>& dst) {
    if (kv.has(key)) dst = kv.get_double(key);
  };

  str("image", c.image);
  if (kv.has("image_format")) c.image_format = parse_format(kv.get("image_format"));
  str("sample", c.sample);
  str("packed", c.packed);
  if (kv.has("codec")) c.codec = parse_codec(kv.get("codec"));
  size("block_size", c.block_size);
  require_block_size(c.block_size);
  if (kv.has("block_sizes")) c.block_sizes = parse_sizes(kv, "block_sizes", true);
  size("capacity", c.capacity);
  if (kv.has("option")) c.option = parse_option(kv.get("option"));
  if (kv.has("prw_seed")) c.prw_seed = parse_u64_hex(kv.get("prw_seed"));

  if (kv.has("profile")) c.profile = profile_by_name(kv.get("profile"));
  KeyValues overrides;
  for (const auto& [key, value] : kv.entries()) {
    if (key.rfind(kProfilePrefix, 0) == 0) overrides.set(key.substr(kProfilePrefix.size()), value);
  }
  c.profile = profile_from_config(overrides, c.profile);

  if (kv.has("auto_calibrate")) c.auto_calibrate = parse_bool(kv.get("auto_calibrate"), "auto_calibrate");
  real("margin", c.margin);
  opt_real("t_em", c.t_em);
  opt_real("t_pm", c.t_pm);
  if (c.t_em || c.t_pm) {
    if (!(c.t_em && c.t_pm)) throw Error(Errc::kBadConfig, "t_em and t_pm must be given together");
    c.auto_calibrate = false;
  }

  str("attacker", c.attacker);
  {
    bool known = false;
    for (const auto& n : attacker_names()) known = known || n == c.attacker;
    if (!known) throw Error(Errc::kBadConfig, "unknown attacker '" + c.attacker + "'");
  }
  if (kv.has("attacker_codecs")) {
    c.attacker_codecs.clear();
    for (const auto& item : kv.get_list("attacker_codecs")) c.attacker_codecs.push_back(parse_codec(item));
  }
  if (kv.has("attacker_block_sizes")) c.attacker_block_sizes = parse_sizes(kv, "attacker_block_sizes", true);
  if (kv.has("c_a")) c.c_a = parse_codec(kv.get("c_a"));
  size("s_a", c.s_a);
  require_block_size(c.s_a);
  size("payload", c.payload);
  if (kv.has("cached_attacker")) c.cached_attacker = parse_bool(kv.get("cached_attacker"), "cached_attacker");
  opt_real("ext_bandwidth", c.ext_bandwidth);
  real("detect_seconds", c.detect_seconds);

  size("runs", c.runs);
  if (kv.has("seed")) c.seed = parse_u64_hex(kv.get("seed"));
  size("nonce_width", c.nonce_width);
  real("jitter", c.jitter);
  if (c.jitter < 0) throw Error(Errc::kBadConfig, "jitter must be >= 0");
  if (kv.has("key")) {
    const Bytes k = from_hex(kv.get("key"));
    if (k.size() != MacKey{}.size()) throw Error(Errc::kBadConfig, "key must be 16 bytes of hex");
    MacKey m{};
    std::copy(k.begin(), k.end(), m.begin());
    c.key = m;
  }
  opt_real("rate_epoch", c.rate_epoch);
  size("rate_n_max", c.rate_n_max);

  str("out", c.out);
  str("ratio_out", c.ratio_out);
  str("trace", c.trace);
  str("trace_kind", c.trace_kind);
  size("trace_length", c.trace_length);
  if (kv.has("cache_capacities")) c.cache_capacities = parse_sizes(kv, "cache_capacities", false);
  return c;
}

CodeImage load_input(const ExperimentConfig& cfg) {
  if (!cfg.image.empty()) return load_code_image(cfg.image, cfg.image_format);
  return sample_image(cfg.sample);
}

PackedImage load_or_pack(const ExperimentConfig& cfg) {
  if (!cfg.packed.empty()) return load_packed(cfg.packed + ".bin", cfg.packed + ".manifest");
  return pack(load_input(cfg), cfg.codec, cfg.block_size, cfg.capacity, cfg.prw_seed, cfg.option);
}

Calibration auto_calibrate(const PackedImage& img, const DeviceProfile& profile, double margin,
                           std::size_t payload) {
  Calibration cal;
  const std::size_t prefix = 8;  // widest nonce; the key adds 16 more, negligible either way
  cal.honest_seconds = elapsed(HonestProver::honest_cost(img.memory.size(), prefix), profile);
  CostCounters ext;
  ext.em_bytes = img.memory.size();
  ext.hash_bytes = prefix + img.memory.size();
  cal.ext_attack_seconds = elapsed(ext, profile);

  // Formula model: extra reads on top of an honest run.
  const Bytes ci = decompress_all(unpack(img).compressed);
  const auto plans = feasibility_sweep(ci, img.manifest.codec, {img.manifest.block_size},
                                       {kAllCodecs.begin(), kAllCodecs.end()},
                                       {kBlockSizes.begin(), kBlockSizes.end()}, profile, payload);
  for (const auto& p : plans) {
    if (!p.feasible()) continue;
    const double t = cal.honest_seconds + p.est_attest_seconds;
    if (!cal.pm_attack_seconds || t < *cal.pm_attack_seconds) cal.pm_attack_seconds = t;
  }
  const double pm = cal.pm_attack_seconds.value_or(std::numeric_limits<double>::infinity());
  cal.thresholds = calibrate_thresholds(cal.honest_seconds, cal.ext_attack_seconds, pm, margin);
  return cal;
}

Thresholds thresholds_for(const ExperimentConfig& cfg, const PackedImage& img) {
  if (!cfg.auto_calibrate) {
    if (!(cfg.t_em && cfg.t_pm)) throw Error(Errc::kBadConfig, "auto_calibrate=0 needs t_em and t_pm");
    return {*cfg.t_em, *cfg.t_pm};
  }
  return auto_calibrate(img, cfg.profile, cfg.margin, cfg.payload).thresholds;
}

std::unique_ptr<Prover> make_prover(const ExperimentConfig& cfg, const PackedImage& img) {
  std::unique_ptr<Prover> p;
  if (cfg.attacker == "honest") {
    p = std::make_unique<HonestProver>(img, cfg.profile);
  } else if (cfg.attacker == "compression") {
    const Bytes ci = decompress_all(unpack(img).compressed);
    const auto plan = make_plan(ci, img.manifest.codec, img.manifest.block_size, cfg.c_a, cfg.s_a, cfg.profile,
                                cfg.payload, cfg.detect_seconds);
    CompressionAttackOptions opts;
    opts.cached = cfg.cached_attacker;
    p = std::make_unique<CompressionAttackProver>(img, plan, cfg.profile, opts);
  } else if (cfg.attacker == "external-memory") {
    p = std::make_unique<ExternalMemoryProver>(img, cfg.profile, cfg.ext_bandwidth);
  } else if (cfg.attacker == "replay") {
    p = std::make_unique<ReplayProver>(cfg.profile);
  } else if (cfg.attacker == "lat-compressor") {
    p = std::make_unique<LatCompressorProver>(img, cfg.c_a, cfg.profile);
  } else {
    throw Error(Errc::kBadConfig, "unknown attacker '" + cfg.attacker + "'");
  }
  p->set_key(cfg.key);
  if (cfg.rate_epoch) p->set_rate_limiter(RateLimiter(*cfg.rate_epoch, cfg.rate_n_max));
  return p;
}

}  // namespace ccattest
