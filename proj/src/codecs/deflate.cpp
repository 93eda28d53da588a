// DEFLATE-class coder backed by zlib raw streams (no zlib/gzip wrapper).

#include <zlib.h>

#include "ccattest/error.hpp"
#include "codecs/block_codecs.hpp"

namespace ccattest::codecs {

std::optional<Bytes> deflate_encode(ByteView raw) {
  if (raw.empty()) return std::nullopt;
  z_stream zs{};
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -15, 9, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw std::runtime_error("deflateInit2 failed");
  }
  Bytes out(deflateBound(&zs, static_cast<uLong>(raw.size())));
  zs.next_in = const_cast<Bytef*>(raw.data());
  zs.avail_in = static_cast<uInt>(raw.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw std::runtime_error("deflate did not finish");
  return out;
}

Decoded deflate_decode(ByteView payload, std::size_t raw_length) {
  z_stream zs{};
  if (inflateInit2(&zs, -15) != Z_OK) throw std::runtime_error("inflateInit2 failed");
  Decoded result;
  // One spare byte so an over-long stream is detected instead of truncated.
  result.data.resize(raw_length + 1);
  zs.next_in = const_cast<Bytef*>(payload.data());
  zs.avail_in = static_cast<uInt>(payload.size());
  zs.next_out = result.data.data();
  zs.avail_out = static_cast<uInt>(result.data.size());
  const int rc = inflate(&zs, Z_FINISH);
  const std::size_t produced = zs.total_out;
  result.consumed = zs.total_in;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != raw_length) {
    throw Error(Errc::kCorruptBlock, "deflate: bad stream");
  }
  result.data.resize(raw_length);
  return result;
}

}  // namespace ccattest::codecs
