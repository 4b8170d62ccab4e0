#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stc/path.hpp"

namespace stc {

using AttributeValue = std::variant<std::string, std::int64_t, double, bool>;

/// Serialized state of one element version: its identity, scalar attributes,
/// non-containment references and containment children.
struct Trace {
  Path path;
  std::string type_name;
  std::map<std::string, AttributeValue> attributes;
  std::map<std::string, std::vector<Path>> relationships;
  std::vector<Path> children;

  friend bool operator==(const Trace&, const Trace&) = default;

  /// Children reached through the containment relationship `name`.
  std::vector<Path> children_in(std::string_view name) const;
  bool has_containment(std::string_view name) const;

  /// Throws Error(kInvalidTrace) when an invariant is broken: empty type or
  /// attribute/relationship name, a child that is not `path` plus one
  /// segment, duplicate children, a non-finite decimal, or a reference name
  /// that is also used as a containment name.
  void validate() const;
};

/// Canonical text encoding. Line layout (every line ends with '\n'):
///
///   T <type_name>
///   P <path>
///   A <name>=<tag>:<value>      one per attribute, sorted by name;
///                               tag is s(tring), i(nteger), d(ecimal), b(ool)
///   R <name>-><path>,<path>...  one per relationship, sorted by name
///   C <path>                    one per child, in containment order
///   E
///
/// Free text is escaped with '\': "\\", "\n", "\r", "\=", "\,", "\>".
/// Decimals use the shortest round-trip form.
std::string encode_trace(const Trace& t);

/// Throws Error(kMalformedTrace) for anything encode_trace cannot produce.
Trace decode_trace(std::string_view bytes);

}  // namespace stc
