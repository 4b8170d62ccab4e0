#include "stc/path.hpp"

#include "stc/error.hpp"

namespace stc {

namespace {

constexpr bool is_reserved(char c) {
  return c == '/' || c == '[' || c == ']' || c == '\\';
}

void check_name(const std::string& name, const char* what) {
  if (name.empty()) {
    throw Error(ErrorCode::kMalformedPath, std::string("empty ") + what);
  }
  if (name.find('\0') != std::string::npos) {
    throw Error(ErrorCode::kMalformedPath, std::string(what) + " contains NUL");
  }
}

void append_escaped(std::string& out, std::string_view name) {
  std::size_t start = 0;
  for (std::size_t at = 0; at < name.size(); ++at) {
    if (!is_reserved(name[at])) continue;
    out.append(name, start, at - start);
    out.push_back('\\');
    out.push_back(name[at]);
    start = at + 1;
  }
  out.append(name, start);
}

// Reads an escaped name up to (not including) the unescaped `stop`.
std::string read_name(std::string_view s, std::size_t& pos, char stop) {
  std::string name;
  while (pos < s.size()) {
    char c = s[pos];
    if (c == '\\') {
      if (pos + 1 >= s.size() || !is_reserved(s[pos + 1])) {
        throw Error(ErrorCode::kMalformedPath,
                    "bad escape at offset " + std::to_string(pos) + " in '" +
                        std::string(s) + "'");
      }
      name.push_back(s[pos + 1]);
      pos += 2;
      continue;
    }
    if (c == stop) return name;
    if (is_reserved(c)) {
      throw Error(ErrorCode::kMalformedPath,
                  "unexpected '" + std::string(1, c) + "' at offset " +
                      std::to_string(pos) + " in '" + std::string(s) + "'");
    }
    name.push_back(c);
    ++pos;
  }
  throw Error(ErrorCode::kMalformedPath,
              "missing '" + std::string(1, stop) + "' in '" + std::string(s) + "'");
}

}  // namespace

Path::Path(std::vector<PathSegment> segments) : segments_(std::move(segments)) {
  for (const auto& seg : segments_) {
    check_name(seg.relationship, "relationship name");
    check_name(seg.key, "key");
  }
}

Path Path::child(std::string relationship, std::string key) const {
  check_name(relationship, "relationship name");
  check_name(key, "key");
  Path out = *this;
  out.segments_.push_back({std::move(relationship), std::move(key)});
  return out;
}

Path Path::parent() const {
  Path out = *this;
  if (!out.segments_.empty()) out.segments_.pop_back();
  return out;
}

bool Path::is_parent_of(const Path& other) const {
  if (other.segments_.size() != segments_.size() + 1) return false;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (segments_[i] != other.segments_[i]) return false;
  }
  return true;
}

const std::string& Path::last_relationship() const {
  static const std::string kEmpty;
  return segments_.empty() ? kEmpty : segments_.back().relationship;
}

std::string path_to_string(const Path& p) {
  std::string out;
  append_path(out, p);
  return out;
}

void append_path(std::string& out, const Path& p) {
  if (p.is_root()) {
    out.push_back('/');
    return;
  }
  for (const auto& seg : p.segments()) {
    out.push_back('/');
    append_escaped(out, seg.relationship);
    out.push_back('[');
    append_escaped(out, seg.key);
    out.push_back(']');
  }
}

Path string_to_path(std::string_view s) {
  if (s.empty() || s.front() != '/') {
    throw Error(ErrorCode::kMalformedPath,
                "path must start with '/': '" + std::string(s) + "'");
  }
  if (s == "/") return Path::root();

  std::vector<PathSegment> segments;
  std::size_t pos = 0;
  while (pos < s.size()) {
    if (s[pos] != '/') {
      throw Error(ErrorCode::kMalformedPath,
                  "expected '/' at offset " + std::to_string(pos) + " in '" +
                      std::string(s) + "'");
    }
    ++pos;
    PathSegment seg;
    seg.relationship = read_name(s, pos, '[');
    ++pos;  // '['
    seg.key = read_name(s, pos, ']');
    ++pos;  // ']'
    if (seg.relationship.empty() || seg.key.empty()) {
      throw Error(ErrorCode::kMalformedPath, "empty segment in '" + std::string(s) + "'");
    }
    segments.push_back(std::move(seg));
  }
  return Path(std::move(segments));
}

}  // namespace stc
