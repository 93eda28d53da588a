#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include "ccattest/image.hpp"

namespace ccattest {

// Synthetic firmware-like images whose sizes match the multi-hop
// oscilloscope, BaseStation and Sense benchmark binaries. The content is
// generated (Zipf-distributed opcode words, repeated routines, lookup
// tables); only the lengths mirror the real applications.
struct SampleSpec {
  std::string_view name;
  std::size_t size;
  std::uint64_t seed;
};

inline constexpr std::array<SampleSpec, 3> kSamples = {{
    {"oscilloscope-synth", 25906, 0x05C1},
    {"basestation-synth", 15240, 0xBA5E},
    {"sense-synth", 2860, 0x5E25},
}};

CodeImage synthetic_firmware(std::string_view name, std::size_t size, std::uint64_t seed);
CodeImage sample_image(const SampleSpec& spec);
// Throws Error(kInvalidArgument) for unknown names.
CodeImage sample_image(std::string_view name);

}  // namespace ccattest
