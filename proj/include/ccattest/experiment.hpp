#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ccattest/adversary.hpp"
#include "ccattest/attestation.hpp"
#include "ccattest/image.hpp"
#include "ccattest/keyvalue.hpp"
#include "ccattest/timing.hpp"

namespace ccattest {

// Parsed key=value experiment configuration. Unknown keys are an error.
struct ExperimentConfig {
  // input: either a file (raw or ihex) or one of the bundled samples
  std::string image;
  ImageFormat image_format = ImageFormat::kRaw;
  std::string sample = "oscilloscope-synth";
  std::string packed;  // prefix of a previously packed image (<prefix>.bin / .manifest)

  CodecId codec = CodecId::kLzGeneral;
  std::size_t block_size = 512;
  std::vector<std::size_t> block_sizes{kBlockSizes.begin(), kBlockSizes.end()};
  std::size_t capacity = kDefaultCapacity;
  ProtocolOption option = ProtocolOption::k2b;
  std::uint64_t prw_seed = 0x5EED;

  DeviceProfile profile = slow_node();

  bool auto_calibrate = true;
  double margin = 1.5;
  std::optional<double> t_em;
  std::optional<double> t_pm;

  std::string attacker = "honest";
  std::vector<CodecId> attacker_codecs{kAllCodecs.begin(), kAllCodecs.end()};
  std::vector<std::size_t> attacker_block_sizes{kBlockSizes.begin(), kBlockSizes.end()};
  CodecId c_a = CodecId::kLzGeneral;
  std::size_t s_a = 2048;
  std::size_t payload = kDefaultBogusPayload;
  bool cached_attacker = false;
  std::optional<double> ext_bandwidth;
  double detect_seconds = kDefaultDetectSeconds;

  std::size_t runs = 10;
  std::uint64_t seed = 1;
  std::size_t nonce_width = 8;
  double jitter = 0.0;
  std::optional<MacKey> key;
  std::optional<double> rate_epoch;
  std::size_t rate_n_max = 1;

  std::string out;
  std::string ratio_out;
  std::string trace;
  std::string trace_kind = "looped";
  std::size_t trace_length = 20000;
  std::vector<std::size_t> cache_capacities{1, 2, 4, 8};

  static const std::set<std::string>& known_keys();
  // Throws Error(kBadConfig) for unknown keys or malformed values and
  // Error(kUnknownCodec) / Error(kUnsupportedBlockSize) as appropriate.
  static ExperimentConfig from(const KeyValues& kv);
};

// Loads the configured input as a code image (file or bundled sample).
CodeImage load_input(const ExperimentConfig& cfg);
// Packs the configured input, or loads `packed` when given.
PackedImage load_or_pack(const ExperimentConfig& cfg);

struct Calibration {
  double honest_seconds = 0;
  double ext_attack_seconds = 0;
  // Cheapest feasible compression attack by the formula model; nullopt when
  // no bundled attacker choice is feasible.
  std::optional<double> pm_attack_seconds;
  Thresholds thresholds;
};

// T_em from the honest time and the margin; T_pm from the cheapest
// feasible formula plan (infinite if none). Throws Error(kCalibrationFailure).
Calibration auto_calibrate(const PackedImage& img, const DeviceProfile& profile, double margin,
                           std::size_t payload = kDefaultBogusPayload);

Thresholds thresholds_for(const ExperimentConfig& cfg, const PackedImage& img);

// Builds the named prover (see attacker_names()). The compression attacker
// uses (cfg.c_a, cfg.s_a); the replay attacker starts with no recordings.
std::unique_ptr<Prover> make_prover(const ExperimentConfig& cfg, const PackedImage& img);

}  // namespace ccattest
