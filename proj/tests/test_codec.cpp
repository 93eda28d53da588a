#include <gtest/gtest.h>

#include <random>

#include "ccattest/codec.hpp"
#include "ccattest/error.hpp"
#include "ccattest/image.hpp"
#include "ccattest/samples.hpp"

using namespace ccattest;

namespace {

Bytes random_bytes(std::mt19937_64& rng, std::size_t n, unsigned alphabet = 256) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng() % alphabet);
  return b;
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::kInvalidArgument;
}

}  // namespace

TEST(Codec, NamesRoundTrip) {
  for (auto c : kAllCodecs) EXPECT_EQ(parse_codec(to_string(c)), c);
  EXPECT_EQ(code_of([] { parse_codec("ppmz"); }), Errc::kUnknownCodec);
  EXPECT_EQ(code_of([] { require_block_size(768); }), Errc::kUnsupportedBlockSize);
}

TEST(Codec, BlockCountAndRawLengths) {
  const auto ci = sample_image("sense-synth");
  const auto img = compress_blocks(ci.bytes, CodecId::kLzGeneral, 512);
  EXPECT_EQ(img.block_count(), 6u);
  EXPECT_EQ(img.raw_length(0), 512u);
  EXPECT_EQ(img.raw_length(5), 2860u - 5 * 512);
  const auto even = compress_blocks(Bytes(1024, 1), CodecId::kLzGeneral, 512);
  EXPECT_EQ(even.raw_length(1), 512u);
}

TEST(Codec, AllZeroHuffmanBlocksAreSmall) {
  const auto img = compress_blocks(Bytes(1024, 0), CodecId::kCanonicalHuffman, 512);
  ASSERT_EQ(img.block_count(), 2u);
  for (auto s : img.block_sizes) EXPECT_LT(s, 80u);
  EXPECT_EQ(decompress_all(img), Bytes(1024, 0));
}

TEST(Codec, PrwBlocksAreStored) {
  const auto prw = generate_prw({77, 4096});
  for (auto codec : kAllCodecs) {
    const auto img = compress_blocks(prw, codec, 512);
    EXPECT_EQ(img.compressed_size(), prw.size() + img.block_count()) << to_string(codec);
    for (std::size_t i = 0; i < img.block_count(); ++i) {
      EXPECT_EQ(img.block(i)[0], static_cast<std::uint8_t>(BlockKind::kStored));
    }
  }
}

TEST(Codec, DeflateMatchesZlibOracle) {
  // Python: zlib.compressobj(9, DEFLATED, -15, 9) over b'attestation ' * 20.
  Bytes data;
  for (int i = 0; i < 20; ++i) {
    for (char c : std::string("attestation ")) data.push_back(static_cast<std::uint8_t>(c));
  }
  const Bytes framed = encode_block(CodecId::kLzGeneral, data, nullptr);
  EXPECT_EQ(to_hex(framed), "01" "4b2c29492d2e492cc9cccf53481c016c00");
}

TEST(Codec, RoundTripAllCodecsAllSizes) {
  std::mt19937_64 rng(3);
  const auto ci = sample_image("basestation-synth");
  for (auto codec : kAllCodecs) {
    for (auto s : kBlockSizes) {
      EXPECT_EQ(decompress_all(compress_blocks(ci.bytes, codec, s)), ci.bytes);
      for (unsigned alphabet : {1u, 3u, 17u, 256u}) {
        const auto data = random_bytes(rng, 1 + rng() % (4 * s), alphabet);
        ASSERT_EQ(decompress_all(compress_blocks(data, codec, s)), data)
            << to_string(codec) << " s=" << s << " alphabet=" << alphabet;
      }
    }
  }
}

TEST(Codec, TinyInputs) {
  for (auto codec : kAllCodecs) {
    for (Bytes data : {Bytes{0x5A}, Bytes{1, 2}, Bytes{9, 9, 9}}) {
      const auto img = compress_blocks(data, codec, 64);
      EXPECT_EQ(decompress_all(img), data);
    }
    // a single byte cannot be coded smaller, so it is stored
    const auto one = compress_blocks(Bytes{0x5A}, codec, 64);
    EXPECT_EQ(one.block(0)[0], static_cast<std::uint8_t>(BlockKind::kStored));
  }
  EXPECT_EQ(code_of([] { compress_blocks(Bytes{}, CodecId::kLzGeneral, 64); }), Errc::kEmptyImage);
}

TEST(Codec, HuffmanHandlesSkewAndLengthLimit) {
  // Fibonacci-like frequencies force long codes before limiting.
  Bytes data;
  std::uint64_t a = 1, b = 1;
  for (int sym = 0; sym < 30; ++sym) {
    for (std::uint64_t k = 0; k < std::min<std::uint64_t>(a, 4000); ++k) data.push_back(static_cast<std::uint8_t>(sym));
    const auto c = a + b;
    a = b;
    b = c;
  }
  std::mt19937_64 rng(9);
  std::shuffle(data.begin(), data.end(), rng);
  const auto img = compress_blocks(data, CodecId::kCanonicalHuffman, 2048);
  EXPECT_EQ(decompress_all(img), data);
  EXPECT_LT(img.compressed_size(), data.size());
}

TEST(Lat, SizesForBenchmarks) {
  EXPECT_EQ(lat_entry_count(25906, 512), 51u);
  EXPECT_EQ(lat_entry_count(15240, 512), 30u);
  EXPECT_EQ(lat_entry_count(2860, 512), 6u);
  for (const auto& spec : kSamples) {
    const auto lat = build_lat(compress_blocks(sample_image(spec).bytes, CodecId::kCanonicalHuffman, 512));
    EXPECT_EQ(lat.entries.size(), lat_entry_count(spec.size, 512));
    EXPECT_EQ(lat.serialized_size(), 3 * lat.entries.size());
  }
}

TEST(Lat, InvariantsAndSerialization) {
  const auto img = compress_blocks(sample_image("oscilloscope-synth").bytes, CodecId::kLzGeneral, 256);
  const auto lat = build_lat(img);
  ASSERT_FALSE(lat.entries.empty());
  EXPECT_EQ(lat.entries[0], 0u);
  for (std::size_t i = 1; i < lat.entries.size(); ++i) EXPECT_GT(lat.entries[i], lat.entries[i - 1]);
  EXPECT_EQ(Lat::parse(lat.serialize()), lat);
  // 24-bit little-endian
  Lat small{{0, 0x0A0B0C}};
  EXPECT_EQ(small.serialize(), (Bytes{0, 0, 0, 0x0C, 0x0B, 0x0A}));
  EXPECT_THROW(Lat::parse(Bytes{1, 2}), Error);
}

TEST(Lat, SingleBlock) {
  const auto lat = build_lat(compress_blocks(Bytes(100, 3), CodecId::kLzGeneral, 512));
  EXPECT_EQ(lat.entries, std::vector<std::uint32_t>{0});
}

TEST(RandomAccess, BlockEqualsSliceOfFullDecompression) {
  std::mt19937_64 rng(21);
  for (auto codec : kAllCodecs) {
    for (int t = 0; t < 20; ++t) {
      const std::size_t s = kBlockSizes[rng() % kBlockSizes.size()];
      const auto data = random_bytes(rng, 1 + rng() % 9000, 1 + rng() % 64);
      const auto img = compress_blocks(data, codec, s);
      const auto lat = build_lat(img);
      const auto full = decompress_all(img);
      const std::size_t i = rng() % img.block_count();
      const Bytes blk = decompress_block(img, lat, i);
      const Bytes slice(full.begin() + static_cast<std::ptrdiff_t>(i * s),
                        full.begin() + static_cast<std::ptrdiff_t>(std::min(full.size(), (i + 1) * s)));
      ASSERT_EQ(blk, slice);
    }
  }
}

TEST(RandomAccess, OutOfRangeIndex) {
  const auto img = compress_blocks(Bytes(1000, 1), CodecId::kLzGeneral, 512);
  EXPECT_EQ(code_of([&] { decompress_block(img, build_lat(img), 2); }), Errc::kIndexOutOfRange);
}

TEST(Corruption, DetectedAndLocal) {
  const auto ci = sample_image("sense-synth");
  for (auto codec : {CodecId::kCanonicalHuffman, CodecId::kLzGeneral}) {
    auto img = compress_blocks(ci.bytes, codec, 512);
    const auto lat = build_lat(img);
    // truncate block 2's payload by lying about its flag: mark coded data as a
    // different, invalid flag value
    img.stream[lat.entries[2]] = 0x7F;
    EXPECT_EQ(code_of([&] { decompress_block(img, lat, 2); }), Errc::kCorruptBlock) << to_string(codec);
    for (std::size_t i : {0u, 1u, 3u, 4u, 5u}) {
      const Bytes blk = decompress_block(img, lat, i);
      EXPECT_TRUE(std::equal(blk.begin(), blk.end(), ci.bytes.begin() + static_cast<std::ptrdiff_t>(i * 512)));
    }
  }
}

TEST(Corruption, PayloadDamageNeverSilentlyMisdecodesLength) {
  // Flipping payload bits may decode to other bytes, but must never return a
  // block of the wrong length or read outside the block.
  std::mt19937_64 rng(5);
  const auto ci = sample_image("sense-synth");
  for (auto codec : kAllCodecs) {
    const auto clean = compress_blocks(ci.bytes, codec, 512);
    const auto lat = build_lat(clean);
    for (int t = 0; t < 200; ++t) {
      auto img = clean;
      const std::size_t i = rng() % img.block_count();
      const std::size_t lo = lat.entries[i] + 1;
      const std::size_t hi = i + 1 < lat.entries.size() ? lat.entries[i + 1] : img.stream.size();
      if (hi <= lo) continue;
      img.stream[lo + rng() % (hi - lo)] ^= static_cast<std::uint8_t>(1 + rng() % 255);
      try {
        const auto blk = decompress_block(img, lat, i);
        EXPECT_EQ(blk.size(), img.raw_length(i));
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::kCorruptBlock);
      }
    }
  }
}

TEST(LocateBlocks, MatchesLat) {
  const auto ci = sample_image("oscilloscope-synth");
  for (auto codec : kAllCodecs) {
    const auto img = compress_blocks(ci.bytes, codec, 1024);
    BlockGeometry g{codec, 1024, ci.size(), img.dictionary ? &*img.dictionary : nullptr};
    const auto sizes = locate_blocks(img.stream, g);
    EXPECT_EQ(sizes, img.block_sizes);
    const auto lat = build_lat(img);
    std::size_t offset = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      EXPECT_EQ(offset, lat.entries[i]);
      offset += sizes[i];
    }
  }
}

TEST(Dictionary, SingleRepeatedWord) {
  Bytes data;
  for (int i = 0; i < 1000; ++i) {
    data.push_back(0x34);
    data.push_back(0x12);
  }
  const auto dict = build_dictionary(data);
  EXPECT_EQ(dict.words, std::vector<std::uint16_t>{0x1234});
  const auto img = compress_blocks(data, CodecId::kStaticDictionary, 512);
  EXPECT_LT(static_cast<double>(img.compressed_size()), 0.6 * static_cast<double>(data.size()));
  EXPECT_EQ(decompress_all(img), data);
}

TEST(Dictionary, ShortInputStored) {
  const auto img = compress_blocks(Bytes{0x42}, CodecId::kStaticDictionary, 64);
  EXPECT_EQ(img.block(0)[0], static_cast<std::uint8_t>(BlockKind::kStored));
  EXPECT_EQ(decompress_all(img), Bytes{0x42});
}

TEST(Dictionary, SerializationBoundAndRoundTrip) {
  std::mt19937_64 rng(8);
  const auto data = random_bytes(rng, 20000, 24);
  for (std::size_t max : {0u, 1u, 16u, 255u}) {
    const auto dict = build_dictionary(data, max);
    EXPECT_LE(dict.words.size(), max);
    EXPECT_LE(dict.serialize().size(), 2 + 2 * max);
    EXPECT_EQ(Dictionary::parse(dict.serialize()), dict);
  }
  EXPECT_THROW(build_dictionary(data, 300), Error);
}

TEST(Dictionary, RankedByFrequencyThenValue) {
  // words: 0x0002 x3, 0x0001 x3, 0x0005 x2, 0x0009 x1 (little-endian pairs)
  const Bytes data{2, 0, 1, 0, 2, 0, 1, 0, 5, 0, 2, 0, 1, 0, 5, 0, 9, 0};
  const auto dict = build_dictionary(data);
  EXPECT_EQ(dict.words, (std::vector<std::uint16_t>{1, 2, 5}));
}
