#include "ccattest/attestation.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "ccattest/error.hpp"

namespace ccattest {

Bytes Nonce::bytes() const {
  Bytes out;
  put_le(out, value, static_cast<int>(width));
  return out;
}

std::string Nonce::hex() const {
  Bytes be;
  for (std::size_t i = width; i-- > 0;) be.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  return to_hex(be);
}

NonceSource::NonceSource(std::uint64_t seed, std::size_t width, std::uint64_t lifetime_runs, Mode mode)
    : width_(width), limit_(width >= 8 ? 0 : 1ull << (8 * width)), mode_(mode) {
  if (width < 4 || width > 8) throw Error(Errc::kInvalidArgument, "nonce width must be 4..8 bytes");
  if (limit_ != 0 && lifetime_runs > limit_) {
    throw Error(Errc::kNonceExhausted, "a " + std::to_string(width) + "-byte nonce cannot cover " +
                                           std::to_string(lifetime_runs) + " runs");
  }
  put_le(key_, seed, 8);
  key_.insert(key_.end(), {'n', 'o', 'n', 'c', 'e'});
}

std::uint64_t NonceSource::permute(std::uint64_t x) const {
  // Balanced 4-round Feistel network on 8*width bits.
  const unsigned half_bits = static_cast<unsigned>(4 * width_);
  const std::uint64_t mask = half_bits >= 64 ? ~0ull : (1ull << half_bits) - 1;
  std::uint64_t left = (x >> half_bits) & mask;
  std::uint64_t right = x & mask;
  for (std::uint8_t round = 0; round < 4; ++round) {
    Bytes input = key_;
    input.push_back(round);
    put_le(input, right, 8);
    const Digest d = Sha256::of(input);
    const std::uint64_t f = get_le(d, 8) & mask;
    const std::uint64_t next_right = left ^ f;
    left = right;
    right = next_right;
  }
  return left << half_bits | right;
}

Nonce NonceSource::next() {
  if (mode_ == Mode::kFixed) {
    ++counter_;
    return Nonce{permute(0), width_};
  }
  if (limit_ != 0 && counter_ >= limit_) throw Error(Errc::kNonceExhausted, "nonce space exhausted");
  return Nonce{permute(counter_++), width_};
}

std::vector<std::uint32_t> derive_permutation(const Nonce& nonce, std::size_t word_count) {
  if (word_count == 0) throw Error(Errc::kInvalidArgument, "word_count must be >= 1");
  std::vector<std::uint32_t> perm(word_count);
  for (std::size_t i = 0; i < word_count; ++i) perm[i] = static_cast<std::uint32_t>(i);
  CounterStream rng(nonce.bytes());
  for (std::size_t i = word_count - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform(i + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kAccept: return "accept";
    case Verdict::kRejectHash: return "reject-hash";
    case Verdict::kRejectTiming: return "reject-timing";
    case Verdict::kAborted: return "aborted";
  }
  return "?";
}

Bytes response_prefix(const Nonce& nonce, const std::optional<MacKey>& key) {
  Bytes prefix;
  if (key) prefix.assign(key->begin(), key->end());
  const Bytes n = nonce.bytes();
  prefix.insert(prefix.end(), n.begin(), n.end());
  return prefix;
}

Digest digest_permuted(ByteView prefix, std::span<const std::uint32_t> perm,
                       const std::function<std::uint16_t(std::size_t)>& word_at) {
  Bytes buf;
  buf.reserve(prefix.size() + 2 * perm.size());
  buf.insert(buf.end(), prefix.begin(), prefix.end());
  for (auto w : perm) {
    const std::uint16_t v = word_at(w);
    buf.push_back(static_cast<std::uint8_t>(v & 0xFF));
    buf.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  return Sha256::of(buf);
}

Digest response_over(ByteView memory, const Nonce& nonce, const std::optional<MacKey>& key) {
  if (memory.empty() || memory.size() % 2 != 0) throw Error(Errc::kInvalidArgument, "memory length must be even");
  const auto perm = derive_permutation(nonce, memory.size() / 2);
  const Bytes prefix = response_prefix(nonce, key);
  return digest_permuted(prefix, perm, [memory](std::size_t w) {
    return static_cast<std::uint16_t>(memory[2 * w] | memory[2 * w + 1] << 8);
  });
}

Digest compute_response(const PackedImage& img, const Nonce& nonce, const VerifierPolicy& policy) {
  if (img.manifest.option != policy.option) {
    throw Error(Errc::kOptionMismatch, "image packed for option " + std::string(to_string(img.manifest.option)) +
                                           ", policy expects " + std::string(to_string(policy.option)));
  }
  return response_over(img.memory, nonce, policy.key);
}

RateLimiter::RateLimiter(double epoch_seconds, std::size_t n_max) : epoch_(epoch_seconds), n_max_(n_max) {
  if (!(epoch_seconds > 0)) throw Error(Errc::kInvalidArgument, "epoch length must be > 0");
}

RateLimiter::Decision RateLimiter::request(double now) {
  const auto epoch = static_cast<std::int64_t>(now / epoch_);
  if (epoch != current_epoch_) {
    current_epoch_ = epoch;
    count_ = 0;
  }
  if (count_ >= n_max_) return Decision::kRefuse;
  ++count_;
  return Decision::kRespond;
}

std::optional<ProverReply> Prover::respond(const Nonce& nonce, double now) {
  if (limiter_ && limiter_->request(now) == RateLimiter::Decision::kRefuse) return std::nullopt;
  return compute(nonce);
}

HonestProver::HonestProver(PackedImage memory, DeviceProfile profile)
    : Prover(std::move(profile)), memory_(std::move(memory)) {}

CostCounters HonestProver::honest_cost(std::size_t capacity, std::size_t prefix_bytes) {
  CostCounters c;
  c.pm_bytes = capacity;
  c.hash_bytes = prefix_bytes + capacity;
  return c;
}

ProverReply HonestProver::compute(const Nonce& nonce) {
  ProverReply r;
  r.x = response_over(memory_.memory, nonce, key());
  r.cost = honest_cost(memory_.memory.size(), response_prefix(nonce, key()).size());
  return r;
}

std::size_t FreshnessLedger::reuse_count() const {
  return static_cast<std::size_t>(
      std::count_if(log_.begin(), log_.end(), [](const auto& t) { return t.nonce_reused; }));
}

Verifier::Verifier(PackedImage reference, VerifierPolicy policy, NonceSource nonces)
    : reference_(std::move(reference)), policy_(std::move(policy)), nonces_(std::move(nonces)) {}

Nonce Verifier::draw_nonce(bool& reused) {
  Nonce n = nonces_.next();
  while (nonces_.mode() == NonceSource::Mode::kFresh && ledger_.seen(n)) n = nonces_.next();
  reused = ledger_.record_nonce(n);
  return n;
}

AttestationTranscript run_attestation(Verifier& verifier, Prover& prover, SimClock& clock) {
  AttestationTranscript t;
  t.run_id = verifier.next_run_id();
  t.prover_model = prover.model_name();
  t.nonce = verifier.draw_nonce(t.nonce_reused);
  t.t0 = clock.now();
  auto reply = prover.respond(t.nonce, t.t0);
  if (!reply) {
    t.t1 = t.t0;
    t.verdict = Verdict::kAborted;
    verifier.log(t);
    return t;
  }
  clock.advance(elapsed(reply->cost, prover.profile()));
  t.t1 = clock.now();
  t.epsilon = t.t1 - t.t0;
  t.x = reply->x;
  t.cost = reply->cost;
  const Digest expected = compute_response(verifier.reference(), t.nonce, verifier.policy());
  if (reply->x != expected) {
    t.verdict = Verdict::kRejectHash;
  } else if (t.epsilon > verifier.policy().thresholds.acceptance()) {
    t.verdict = Verdict::kRejectTiming;
  } else {
    t.verdict = Verdict::kAccept;
  }
  verifier.log(t);
  return t;
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::kPending: return "pending";
    case Decision::kTrusted: return "trusted";
    case Decision::kCompromised: return "compromised";
  }
  return "?";
}

Decision RetryController::observe(Verdict v) {
  if (decision_ != Decision::kPending) return decision_;
  ++runs_;
  switch (v) {
    case Verdict::kAccept:
      return decision_ = Decision::kTrusted;
    case Verdict::kAborted:
      return decision_ = Decision::kCompromised;
    case Verdict::kRejectHash:
      if (++mismatches_ >= max_mismatches_) return decision_ = Decision::kCompromised;
      break;
    case Verdict::kRejectTiming:
      break;
  }
  const std::size_t retries_used = runs_ - 1;
  const std::size_t budget = retry_factor_ * std::max<std::size_t>(1, mismatches_);
  if (retries_used >= budget) decision_ = Decision::kCompromised;
  return decision_;
}

Decision retry_controller(std::span<const Verdict> outcomes) {
  RetryController rc;
  for (auto v : outcomes) {
    if (rc.observe(v) != Decision::kPending) break;
  }
  return rc.decision();
}

AttestationSession attest_with_retries(Verifier& verifier, Prover& prover, SimClock& clock) {
  RetryController rc(verifier.policy().retry_factor, verifier.policy().max_mismatches);
  AttestationSession session;
  while (rc.decision() == Decision::kPending) {
    session.runs.push_back(run_attestation(verifier, prover, clock));
    rc.observe(session.runs.back().verdict);
  }
  session.decision = rc.decision();
  return session;
}

std::string transcript_csv_header() { return "run_id,nonce_hex,x_hex,epsilon_ms,verdict,prover_model"; }

std::string to_csv_row(const AttestationTranscript& t) {
  char eps[64];
  std::snprintf(eps, sizeof eps, "%.6f", t.epsilon * 1e3);
  std::ostringstream out;
  out << t.run_id << ',' << t.nonce.hex() << ',' << (t.x ? to_hex(*t.x) : std::string()) << ',' << eps << ','
      << to_string(t.verdict) << ',' << t.prover_model;
  return out.str();
}

}  // namespace ccattest
