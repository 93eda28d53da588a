#include "ccattest/bytes.hpp"

#include <fstream>
#include <iterator>

#include "ccattest/error.hpp"

namespace ccattest {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::kMalformedRecord: return "malformed record";
    case Errc::kChecksumMismatch: return "checksum mismatch";
    case Errc::kAddressOverflow: return "address overflow";
    case Errc::kEmptyImage: return "empty image";
    case Errc::kIo: return "i/o error";
    case Errc::kCapacityExceeded: return "capacity exceeded";
    case Errc::kUnknownCodec: return "unknown codec";
    case Errc::kUnsupportedBlockSize: return "unsupported block size";
    case Errc::kLatOverflow: return "LAT offset overflow";
    case Errc::kIndexOutOfRange: return "index out of range";
    case Errc::kCorruptBlock: return "corrupt block";
    case Errc::kOptionMismatch: return "option mismatch";
    case Errc::kNonceExhausted: return "nonce space exhausted";
    case Errc::kInfeasiblePlan: return "infeasible plan";
    case Errc::kCalibrationFailure: return "calibration failure";
    case Errc::kBadConfig: return "bad config";
    case Errc::kInvalidArgument: return "invalid argument";
  }
  return "unknown error";
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string_view strip_prefix(std::string_view text) {
  if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    text.remove_prefix(2);
  }
  return text;
}

}  // namespace

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

Bytes from_hex(std::string_view text) {
  text = strip_prefix(text);
  if (text.size() % 2 != 0) throw Error(Errc::kInvalidArgument, "odd-length hex string");
  Bytes out;
  out.reserve(text.size() / 2);
  for (std::size_t i = 0; i < text.size(); i += 2) {
    int hi = hex_value(text[i]);
    int lo = hex_value(text[i + 1]);
    if (hi < 0 || lo < 0) throw Error(Errc::kInvalidArgument, "bad hex digit in '" + std::string(text) + "'");
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return out;
}

std::uint64_t parse_u64_hex(std::string_view text) {
  text = strip_prefix(text);
  if (text.empty() || text.size() > 16) throw Error(Errc::kInvalidArgument, "expected 1..16 hex digits");
  std::uint64_t v = 0;
  for (char c : text) {
    int d = hex_value(c);
    if (d < 0) throw Error(Errc::kInvalidArgument, "bad hex digit in '" + std::string(text) + "'");
    v = v << 4 | static_cast<std::uint64_t>(d);
  }
  return v;
}

std::string u64_hex(std::uint64_t v) {
  Bytes be;
  for (int i = 7; i >= 0; --i) be.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  return to_hex(be);
}

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, ByteView data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIo, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(Errc::kIo, "short write to " + path);
}

}  // namespace ccattest
