#include "stc/version_key.hpp"

#include "stc/error.hpp"

namespace stc {

namespace {

template <typename Int>
void put_be(std::string& out, Int v) {
  for (int shift = 8 * (sizeof(Int) - 1); shift >= 0; shift -= 8) {
    out.push_back(static_cast<char>((v >> shift) & 0xff));
  }
}

template <typename Int>
Int get_be(std::string_view bytes) {
  Int v = 0;
  for (std::size_t i = 0; i < sizeof(Int); ++i) {
    v = static_cast<Int>((v << 8) | static_cast<unsigned char>(bytes[i]));
  }
  return v;
}

}  // namespace

std::string encode_timepoint(const TimePoint& t) {
  std::string out;
  out.reserve(kTimePointBytes);
  put_be(out, t.timestamp);
  put_be(out, t.sequence);
  return out;
}

TimePoint decode_timepoint(std::string_view bytes) {
  if (bytes.size() != kTimePointBytes) {
    throw Error(ErrorCode::kInvalidArgument, "time point needs 12 bytes");
  }
  return {get_be<std::uint64_t>(bytes.substr(0, 8)),
          get_be<std::uint32_t>(bytes.substr(8, 4))};
}

std::string encode_path_prefix(const Path& p) {
  std::string out;
  append_path(out, p);
  out.push_back('\0');
  return out;
}

std::string encode_version_key(const Path& p, const TimePoint& t) {
  std::string out;
  out.reserve(40);
  append_path(out, p);
  out.push_back('\0');
  put_be(out, t.timestamp);
  put_be(out, t.sequence);
  return out;
}

VersionKey decode_version_key(std::string_view bytes) {
  if (bytes.size() < kTimePointBytes + 2 ||
      bytes[bytes.size() - kTimePointBytes - 1] != '\0') {
    throw Error(ErrorCode::kMalformedPath, "bad version key");
  }
  std::string_view path = bytes.substr(0, bytes.size() - kTimePointBytes - 1);
  return {string_to_path(path), decode_timepoint(bytes.substr(bytes.size() - kTimePointBytes))};
}

}  // namespace stc
