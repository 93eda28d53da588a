#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ccattest/hash.hpp"
#include "ccattest/image.hpp"
#include "ccattest/timing.hpp"

namespace ccattest {

struct Nonce {
  std::uint64_t value = 0;
  std::size_t width = 8;  // bytes, 4..8

  // Little-endian, `width` bytes.
  Bytes bytes() const;
  std::string hex() const;
  bool operator==(const Nonce&) const = default;
  auto operator<=>(const Nonce&) const = default;
};

// Verifier-side nonce generator. Fresh mode runs a monotonic counter through
// a keyed Feistel permutation of the nonce space, so nonces never repeat and
// are not predictable from earlier ones without the key. Fixed mode always
// hands out the same nonce; it exists only as a broken-verifier fixture.
class NonceSource {
 public:
  enum class Mode { kFresh, kFixed };

  // Throws Error(kNonceExhausted) if `lifetime_runs` exceeds the nonce space
  // and Error(kInvalidArgument) for widths outside 4..8.
  NonceSource(std::uint64_t seed, std::size_t width = 8, std::uint64_t lifetime_runs = 0,
              Mode mode = Mode::kFresh);

  Nonce next();
  std::uint64_t issued() const { return counter_; }
  Mode mode() const { return mode_; }

 private:
  std::uint64_t permute(std::uint64_t x) const;

  Bytes key_;
  std::size_t width_;
  std::uint64_t limit_;  // counter values available; 0 means 2^64
  Mode mode_;
  std::uint64_t counter_ = 0;
};

// Fisher-Yates over [0, word_count) driven by the counter stream seeded
// with the nonce bytes; draws use rejection sampling.
std::vector<std::uint32_t> derive_permutation(const Nonce& nonce, std::size_t word_count);

using MacKey = std::array<std::uint8_t, 16>;

enum class Verdict { kAccept, kRejectHash, kRejectTiming, kAborted };
std::string_view to_string(Verdict v);

struct VerifierPolicy {
  Thresholds thresholds;
  ProtocolOption option = ProtocolOption::k2b;
  std::optional<MacKey> key;
  std::size_t retry_factor = 2;
  std::size_t max_mismatches = 2;
};

// Prefix hashed before the permuted memory words: nonce, or key || nonce.
Bytes response_prefix(const Nonce& nonce, const std::optional<MacKey>& key);

// SHA-256(prefix || w[perm[0]] || w[perm[1]] || ...) where w[i] is the
// 16-bit little-endian word at byte offset 2i, fetched through `word_at`.
Digest digest_permuted(ByteView prefix, std::span<const std::uint32_t> perm,
                       const std::function<std::uint16_t(std::size_t)>& word_at);

// Response over a raw memory image (length must be even).
Digest response_over(ByteView memory, const Nonce& nonce, const std::optional<MacKey>& key);

// Reference response over the full program memory. Throws
// Error(kOptionMismatch) if the image was packed for a different option.
Digest compute_response(const PackedImage& img, const Nonce& nonce, const VerifierPolicy& policy);

// At most n_max responses per epoch of `epoch_seconds` simulated time.
class RateLimiter {
 public:
  enum class Decision { kRespond, kRefuse };

  RateLimiter(double epoch_seconds, std::size_t n_max);
  Decision request(double now);

 private:
  double epoch_;
  std::size_t n_max_;
  std::int64_t current_epoch_ = -1;
  std::size_t count_ = 0;
};

struct ProverReply {
  Digest x{};
  CostCounters cost;
};

// A device answering challenges. `respond` returns nullopt when the device
// refuses (rate limited); the verifier records that as an abort.
class Prover {
 public:
  explicit Prover(DeviceProfile profile) : profile_(std::move(profile)) {}
  virtual ~Prover() = default;

  virtual std::string model_name() const = 0;
  const DeviceProfile& profile() const { return profile_; }

  void set_rate_limiter(std::optional<RateLimiter> limiter) { limiter_ = std::move(limiter); }
  void set_key(std::optional<MacKey> key) { key_ = key; }

  std::optional<ProverReply> respond(const Nonce& nonce, double now);

 protected:
  virtual ProverReply compute(const Nonce& nonce) = 0;
  const std::optional<MacKey>& key() const { return key_; }

 private:
  DeviceProfile profile_;
  std::optional<RateLimiter> limiter_;
  std::optional<MacKey> key_;
};

// Reads every memory word once from program memory and hashes it.
class HonestProver : public Prover {
 public:
  HonestProver(PackedImage memory, DeviceProfile profile);
  std::string model_name() const override { return "honest"; }

  static CostCounters honest_cost(std::size_t capacity, std::size_t prefix_bytes);

 protected:
  ProverReply compute(const Nonce& nonce) override;

 private:
  PackedImage memory_;
};

struct AttestationTranscript {
  std::uint64_t run_id = 0;
  Nonce nonce;
  std::optional<Digest> x;
  double t0 = 0;
  double t1 = 0;
  double epsilon = 0;
  Verdict verdict = Verdict::kAborted;
  std::string prover_model;
  bool nonce_reused = false;
  CostCounters cost;
};

// Seen nonces plus the transcript log.
class FreshnessLedger {
 public:
  bool seen(const Nonce& n) const { return nonces_.count(n) != 0; }
  // Returns true if the nonce had been used before (a reuse to flag).
  bool record_nonce(const Nonce& n) { return !nonces_.insert(n).second; }
  void log(AttestationTranscript t) { log_.push_back(std::move(t)); }

  const std::vector<AttestationTranscript>& transcripts() const { return log_; }
  std::size_t reuse_count() const;

 private:
  std::set<Nonce> nonces_;
  std::vector<AttestationTranscript> log_;
};

class Verifier {
 public:
  Verifier(PackedImage reference, VerifierPolicy policy, NonceSource nonces);

  const VerifierPolicy& policy() const { return policy_; }
  VerifierPolicy& policy() { return policy_; }
  const FreshnessLedger& ledger() const { return ledger_; }
  const PackedImage& reference() const { return reference_; }

  // Draws a nonce not yet in the ledger (fresh mode); fixed mode may repeat
  // and the reuse is flagged in the transcript.
  Nonce draw_nonce(bool& reused);
  void log(AttestationTranscript t) { ledger_.log(std::move(t)); }
  std::uint64_t next_run_id() { return run_id_++; }

 private:
  PackedImage reference_;
  VerifierPolicy policy_;
  NonceSource nonces_;
  FreshnessLedger ledger_;
  std::uint64_t run_id_ = 0;
};

// One challenge-response exchange. Accepts iff x matches the verifier's
// reference and epsilon <= min(T_em, T_pm).
AttestationTranscript run_attestation(Verifier& verifier, Prover& prover, SimClock& clock);

enum class Decision { kPending, kTrusted, kCompromised };
std::string_view to_string(Decision d);

// Retry/abort rule: any accept -> trusted; a second hash mismatch (each under
// its own nonce) -> compromised; an abort -> compromised; otherwise retry
// while retries used < retry_factor * max(1, mismatches so far).
class RetryController {
 public:
  explicit RetryController(std::size_t retry_factor = 2, std::size_t max_mismatches = 2)
      : retry_factor_(retry_factor), max_mismatches_(max_mismatches) {}

  Decision observe(Verdict v);
  Decision decision() const { return decision_; }
  std::size_t runs() const { return runs_; }
  std::size_t mismatches() const { return mismatches_; }

 private:
  std::size_t retry_factor_;
  std::size_t max_mismatches_;
  std::size_t runs_ = 0;
  std::size_t mismatches_ = 0;
  Decision decision_ = Decision::kPending;
};

// Folds a verdict sequence; verdicts after a final decision are ignored.
Decision retry_controller(std::span<const Verdict> outcomes);

struct AttestationSession {
  Decision decision = Decision::kPending;
  std::vector<AttestationTranscript> runs;
};

// Runs the protocol until the retry controller reaches a decision.
AttestationSession attest_with_retries(Verifier& verifier, Prover& prover, SimClock& clock);

std::string transcript_csv_header();
std::string to_csv_row(const AttestationTranscript& t);

}  // namespace ccattest
