#pragma once

#include <string>
#include <string_view>

#include "stc/path.hpp"
#include "stc/time_point.hpp"

namespace stc {

struct VersionKey {
  Path path;
  TimePoint time;

  friend bool operator==(const VersionKey&, const VersionKey&) = default;
};

// Encoded layout: <canonical path> 0x00 <u64 BE timestamp> <u32 BE sequence>.
// Byte order of encoded keys equals (canonical path string, TimePoint) order.
inline constexpr std::size_t kTimePointBytes = 12;

std::string encode_timepoint(const TimePoint& t);
TimePoint decode_timepoint(std::string_view bytes);

/// The key-range prefix shared by every version of `p`.
std::string encode_path_prefix(const Path& p);

std::string encode_version_key(const Path& p, const TimePoint& t);
inline std::string encode_version_key(const VersionKey& k) {
  return encode_version_key(k.path, k.time);
}

/// Throws Error(kMalformedPath) on bad input.
VersionKey decode_version_key(std::string_view bytes);

}  // namespace stc
