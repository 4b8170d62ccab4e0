#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace stc {

struct PathSegment {
  std::string relationship;
  std::string key;

  friend auto operator<=>(const PathSegment&, const PathSegment&) = default;
};

/// Containment-derived element identifier. The empty path is the model root.
///
/// Canonical string form: "/" for the root, otherwise "/rel[key]/rel[key]...".
/// The characters '/', '[', ']' and '\' inside names and keys are escaped with
/// a leading backslash. Names and keys must be non-empty and may not contain
/// NUL, which is reserved as the path terminator in encoded store keys.
class Path {
 public:
  Path() = default;
  explicit Path(std::vector<PathSegment> segments);

  static Path root() { return Path{}; }

  const std::vector<PathSegment>& segments() const noexcept { return segments_; }
  bool is_root() const noexcept { return segments_.empty(); }
  std::size_t depth() const noexcept { return segments_.size(); }

  /// This path extended by one containment segment.
  Path child(std::string relationship, std::string key) const;

  /// Path with the last segment removed; the root is its own parent.
  Path parent() const;

  /// True when `other` is exactly this path plus one segment.
  bool is_parent_of(const Path& other) const;

  /// Relationship name of the last segment; empty for the root.
  const std::string& last_relationship() const;

  friend bool operator==(const Path&, const Path&) = default;
  /// Segment-wise order. Store key order uses the canonical string instead.
  friend auto operator<=>(const Path&, const Path&) = default;

 private:
  std::vector<PathSegment> segments_;
};

std::string path_to_string(const Path& p);
// Appends the canonical form of `p` to `out`.
void append_path(std::string& out, const Path& p);

/// Throws Error(kMalformedPath).
Path string_to_path(std::string_view s);

}  // namespace stc
