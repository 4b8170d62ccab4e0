#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

namespace stc {

/// Position of one element version on the time axis. The sequence number
/// separates several versions written within the same timestamp.
struct TimePoint {
  std::uint64_t timestamp = 0;  // milliseconds since an arbitrary epoch
  std::uint32_t sequence = 0;

  static constexpr std::uint32_t kMaxSequence =
      std::numeric_limits<std::uint32_t>::max();

  friend constexpr auto operator<=>(const TimePoint&, const TimePoint&) = default;

  /// Immediately preceding point in the total order, if any.
  constexpr std::optional<TimePoint> predecessor() const noexcept {
    if (sequence > 0) return TimePoint{timestamp, sequence - 1};
    if (timestamp > 0) return TimePoint{timestamp - 1, kMaxSequence};
    return std::nullopt;
  }

  constexpr std::optional<TimePoint> successor() const noexcept {
    if (sequence < kMaxSequence) return TimePoint{timestamp, sequence + 1};
    if (timestamp < std::numeric_limits<std::uint64_t>::max()) {
      return TimePoint{timestamp + 1, 0};
    }
    return std::nullopt;
  }
};

constexpr std::strong_ordering compare_timepoints(const TimePoint& a,
                                                  const TimePoint& b) noexcept {
  return a <=> b;
}

/// "<timestamp>:<sequence>"
std::string to_string(const TimePoint& t);

/// Parses "<timestamp>" or "<timestamp>:<sequence>". A bare timestamp takes
/// `default_sequence`. Throws Error(kInvalidArgument) on bad input.
TimePoint parse_timepoint(const std::string& text,
                          std::uint32_t default_sequence = TimePoint::kMaxSequence);

}  // namespace stc
