#include "stc/trace.hpp"

#include <charconv>
#include <cmath>
#include <algorithm>

#include "stc/error.hpp"

namespace stc {

std::vector<Path> Trace::children_in(std::string_view name) const {
  std::vector<Path> out;
  for (const auto& c : children) {
    if (c.last_relationship() == name) out.push_back(c);
  }
  return out;
}

bool Trace::has_containment(std::string_view name) const {
  for (const auto& c : children) {
    if (c.last_relationship() == name) return true;
  }
  return false;
}

void Trace::validate() const {
  auto fail = [this](const std::string& why) {
    throw Error(ErrorCode::kInvalidTrace, path_to_string(path) + ": " + why);
  };
  if (type_name.empty()) fail("empty type name");
  for (const auto& [name, value] : attributes) {
    if (name.empty()) fail("empty attribute name");
    if (const double* d = std::get_if<double>(&value); d && !std::isfinite(*d)) {
      fail("non-finite decimal attribute '" + name + "'");
    }
  }
  // Children share every segment but the last, so duplicates show up as
  // equal last segments.
  std::vector<const PathSegment*> last;
  last.reserve(children.size());
  for (const auto& c : children) {
    if (!path.is_parent_of(c)) fail("child " + path_to_string(c) + " is not contained here");
    last.push_back(&c.segments().back());
  }
  std::sort(last.begin(), last.end(), [](auto* a, auto* b) { return *a < *b; });
  auto dup = std::adjacent_find(last.begin(), last.end(), [](auto* a, auto* b) { return *a == *b; });
  if (dup != last.end()) fail("duplicate child " + (*dup)->relationship + "[" + (*dup)->key + "]");
  for (const auto& [name, targets] : relationships) {
    if (name.empty()) fail("empty relationship name");
    if (has_containment(name)) fail("'" + name + "' is both a reference and a containment");
  }
}

namespace {

void append_escaped(std::string& out, std::string_view text) {
  std::size_t start = 0;
  for (std::size_t at = 0; at < text.size(); ++at) {
    const char c = text[at];
    if (c != '\\' && c != '\n' && c != '\r' && c != '=' && c != ',' && c != '>') continue;
    out.append(text, start, at - start);
    start = at + 1;
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '=': out += "\\="; break;
      case ',': out += "\\,"; break;
      case '>': out += "\\>"; break;
    }
  }
  out.append(text, start);
}

// Paths are escaped again for the line format; `scratch` avoids a fresh
// allocation per path.
void append_path_escaped(std::string& out, std::string& scratch, const Path& p) {
  scratch.clear();
  append_path(scratch, p);
  append_escaped(out, scratch);
}

void append_value(std::string& out, const AttributeValue& value) {
  std::visit(
      [&out](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::string>) {
          out += "s:";
          append_escaped(out, v);
        } else if constexpr (std::is_same_v<V, bool>) {
          out += v ? "b:true" : "b:false";
        } else {
          char buf[64];
          auto res = std::to_chars(buf, buf + sizeof buf, v);
          out += std::is_same_v<V, double> ? "d:" : "i:";
          out.append(buf, res.ptr);
        }
      },
      value);
}

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorCode::kMalformedTrace, why);
}

// Splits `line` at the first unescaped occurrence of `sep` and unescapes the
// left part. Returns the offset just past the separator.
std::size_t read_field(std::string_view line, std::string_view sep, std::string& out) {
  out.clear();
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == '\\') {
      if (i + 1 >= line.size()) malformed("dangling escape");
      switch (line[i + 1]) {
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 'r': out.push_back('\r'); break;
        case '=': out.push_back('='); break;
        case ',': out.push_back(','); break;
        case '>': out.push_back('>'); break;
        default: malformed("bad escape '\\" + std::string(1, line[i + 1]) + "'");
      }
      i += 2;
      continue;
    }
    if (!sep.empty() && line.substr(i, sep.size()) == sep) return i + sep.size();
    if (c == '=' || c == ',' || c == '>') {
      malformed("unescaped '" + std::string(1, c) + "'");
    }
    out.push_back(c);
    ++i;
  }
  if (!sep.empty()) malformed("missing '" + std::string(sep) + "'");
  return line.size();
}

// Splits at every unescaped `sep`; escapes are kept for read_field.
std::vector<std::string_view> split_unescaped(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\') {
      ++i;
    } else if (text[i] == sep) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(text.substr(start));
  return parts;
}

std::string read_all(std::string_view text) {
  std::string out;
  read_field(text, "", out);
  return out;
}

Path read_path(std::string_view text) {
  try {
    return string_to_path(read_all(text));
  } catch (const Error& e) {
    malformed(e.what());
  }
}

template <typename Int>
Int read_number(std::string_view text) {
  Int v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    malformed("bad number '" + std::string(text) + "'");
  }
  return v;
}

AttributeValue read_value(std::string_view text) {
  if (text.size() < 2 || text[1] != ':') malformed("missing value tag");
  std::string_view body = text.substr(2);
  switch (text[0]) {
    case 's': return read_all(body);
    case 'i': return read_number<std::int64_t>(body);
    case 'd': {
      double d = read_number<double>(body);
      // Only the shortest form is canonical.
      AttributeValue v = d;
      std::string again;
      append_value(again, v);
      if (std::string_view(again).substr(2) != body) malformed("non-canonical decimal");
      return v;
    }
    case 'b':
      if (body == "true") return true;
      if (body == "false") return false;
      malformed("bad boolean '" + std::string(body) + "'");
    default:
      malformed("unknown value tag '" + std::string(1, text[0]) + "'");
  }
}

class LineReader {
 public:
  explicit LineReader(std::string_view bytes) : bytes_(bytes) {}

  bool at_end() const { return pos_ >= bytes_.size(); }

  std::string_view peek_tag() const {
    if (at_end()) malformed("truncated trace");
    return bytes_.substr(pos_, 1);
  }

  // Consumes the next line, which must carry `tag`, and returns its body.
  std::string_view take(char tag) {
    auto nl = bytes_.find('\n', pos_);
    if (nl == std::string_view::npos) malformed("truncated trace");
    std::string_view line = bytes_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    if (tag == 'E') {
      if (line != "E") malformed("bad terminator");
      return {};
    }
    if (line.size() < 2 || line[0] != tag || line[1] != ' ') {
      malformed("expected '" + std::string(1, tag) + "' line");
    }
    return line.substr(2);
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_trace(const Trace& t) {
  std::string out;
  out.reserve(64 + 24 * t.children.size());
  out += "T ";
  append_escaped(out, t.type_name);
  std::string scratch;
  out += "\nP ";
  append_path_escaped(out, scratch, t.path);
  out.push_back('\n');
  for (const auto& [name, value] : t.attributes) {
    out += "A ";
    append_escaped(out, name);
    out.push_back('=');
    append_value(out, value);
    out.push_back('\n');
  }
  for (const auto& [name, targets] : t.relationships) {
    out += "R ";
    append_escaped(out, name);
    out += "->";
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (i > 0) out.push_back(',');
      append_path_escaped(out, scratch, targets[i]);
    }
    out.push_back('\n');
  }
  for (const auto& c : t.children) {
    out += "C ";
    append_path_escaped(out, scratch, c);
    out.push_back('\n');
  }
  out += "E\n";
  return out;
}

Trace decode_trace(std::string_view bytes) {
  LineReader in(bytes);
  Trace t;
  t.type_name = read_all(in.take('T'));
  t.path = read_path(in.take('P'));

  std::string name;
  while (in.peek_tag() == "A") {
    std::string_view line = in.take('A');
    std::size_t at = read_field(line, "=", name);
    if (!t.attributes.empty() && t.attributes.rbegin()->first >= name) {
      malformed("attributes out of order");
    }
    t.attributes.emplace(name, read_value(line.substr(at)));
  }
  while (in.peek_tag() == "R") {
    std::string_view line = in.take('R');
    std::size_t at = read_field(line, "->", name);
    if (!t.relationships.empty() && t.relationships.rbegin()->first >= name) {
      malformed("relationships out of order");
    }
    std::vector<Path> targets;
    std::string_view rest = line.substr(at);
    if (!rest.empty()) {
      for (std::string_view item : split_unescaped(rest, ',')) {
        targets.push_back(read_path(item));
      }
    }
    t.relationships.emplace(name, std::move(targets));
  }
  while (in.peek_tag() == "C") t.children.push_back(read_path(in.take('C')));
  in.take('E');
  if (!in.at_end()) malformed("trailing bytes after terminator");

  try {
    t.validate();
  } catch (const Error& e) {
    malformed(e.what());
  }
  return t;
}

}  // namespace stc
