#include "ccattest/samples.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "ccattest/error.hpp"

namespace ccattest {

namespace {

constexpr std::size_t kVocabulary = 384;

void push_word(Bytes& out, std::uint16_t w) {
  out.push_back(static_cast<std::uint8_t>(w & 0xFF));
  out.push_back(static_cast<std::uint8_t>(w >> 8));
}

}  // namespace

CodeImage synthetic_firmware(std::string_view name, std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // Opcode words: the high byte comes from a small skewed set of opcode
  // groups, the low byte mostly encodes low register numbers.
  std::vector<double> group_weights(28);
  for (std::size_t i = 0; i < group_weights.size(); ++i) group_weights[i] = 1.0 / static_cast<double>(i + 1);
  std::discrete_distribution<std::size_t> pick_group(group_weights.begin(), group_weights.end());
  std::vector<std::uint8_t> groups(group_weights.size());
  for (auto& g : groups) g = static_cast<std::uint8_t>(rng());
  std::vector<std::uint16_t> vocab(kVocabulary);
  for (auto& w : vocab) {
    const auto low = static_cast<std::uint8_t>(rng() % 4 == 0 ? rng() : (rng() % 32) << (rng() % 2 ? 4 : 0));
    w = static_cast<std::uint16_t>(groups[pick_group(rng)] << 8 | low);
  }
  std::vector<double> weights(kVocabulary);
  for (std::size_t i = 0; i < kVocabulary; ++i) weights[i] = 1.0 / std::pow(static_cast<double>(i + 1), 1.4);
  std::discrete_distribution<std::size_t> pick_op(weights.begin(), weights.end());
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  Bytes out;
  out.reserve(size + 512);
  // Vector table.
  for (int i = 0; i < 35; ++i) {
    push_word(out, 0x940C);
    push_word(out, static_cast<std::uint16_t>(0x0046 + 2 * i));
  }

  std::vector<std::size_t> routines;  // start offsets of emitted routines
  while (out.size() < size) {
    const double r = coin(rng);
    if (r < 0.07) {
      // Lookup table: stepped values or text.
      const std::size_t n = 8 + rng() % 56;
      if (rng() % 2 == 0) {
        std::uint16_t v = static_cast<std::uint16_t>(rng() % 512);
        const std::uint16_t step = static_cast<std::uint16_t>(1 + rng() % 9);
        for (std::size_t i = 0; i < n; ++i, v = static_cast<std::uint16_t>(v + step)) push_word(out, v);
      } else {
        static constexpr char kText[] = "radio init failed\0sensor read\0msg queue full\0ok\0timer overflow\0";
        const std::size_t from = rng() % (sizeof kText - 16);
        for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>(kText[(from + i) % sizeof kText]));
      }
    } else if (r < 0.5 && !routines.empty()) {
      // Inlined/duplicated routine with a few patched operands.
      const std::size_t src = routines[rng() % routines.size()] & ~std::size_t{1};
      const std::size_t len = std::min<std::size_t>(16 + 2 * (rng() % 60), out.size() - src) & ~std::size_t{1};
      for (std::size_t i = 0; i < len; i += 2) {
        if (coin(rng) < 0.08) {
          push_word(out, static_cast<std::uint16_t>(rng() & 0x0FFF));
        } else {
          out.push_back(out[src + i]);
          out.push_back(out[src + i + 1]);
        }
      }
    } else {
      routines.push_back(out.size());
      const std::size_t words = 10 + rng() % 90;
      for (std::size_t i = 0; i < words; ++i) {
        const double k = coin(rng);
        if (k < 0.85) {
          push_word(out, vocab[pick_op(rng)]);
        } else if (k < 0.97) {
          // Register/immediate operand: small values dominate.
          push_word(out, static_cast<std::uint16_t>((vocab[pick_op(rng)] & 0xF0F0) | (rng() % 16) << 8 | rng() % 16));
        } else {
          push_word(out, static_cast<std::uint16_t>(rng()));
        }
      }
      push_word(out, 0x9508);  // ret
    }
  }
  out.resize(size);
  return CodeImage{std::move(out), std::string(name)};
}

CodeImage sample_image(const SampleSpec& spec) { return synthetic_firmware(spec.name, spec.size, spec.seed); }

CodeImage sample_image(std::string_view name) {
  for (const auto& s : kSamples) {
    if (s.name == name) return sample_image(s);
  }
  throw Error(Errc::kInvalidArgument, "unknown sample image '" + std::string(name) + "'");
}

}  // namespace ccattest
