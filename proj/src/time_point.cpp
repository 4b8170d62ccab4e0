#include "stc/time_point.hpp"

#include <charconv>

#include "stc/error.hpp"

namespace stc {

namespace {

template <typename Int>
Int parse_int(std::string_view text, const std::string& whole) {
  Int value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw Error(ErrorCode::kInvalidArgument, "bad time point '" + whole + "'");
  }
  return value;
}

}  // namespace

std::string to_string(const TimePoint& t) {
  return std::to_string(t.timestamp) + ":" + std::to_string(t.sequence);
}

TimePoint parse_timepoint(const std::string& text, std::uint32_t default_sequence) {
  std::string_view view(text);
  auto colon = view.find(':');
  if (colon == std::string_view::npos) {
    return {parse_int<std::uint64_t>(view, text), default_sequence};
  }
  return {parse_int<std::uint64_t>(view.substr(0, colon), text),
          parse_int<std::uint32_t>(view.substr(colon + 1), text)};
}

}  // namespace stc
