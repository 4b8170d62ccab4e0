#pragma once

#include <string_view>
#include <vector>

#include "stc/path.hpp"
#include "stc/time_point.hpp"
#include "stc/trace.hpp"
#include "stc/version_store.hpp"

namespace stc {

/// An element resolved at a query time. `now` is the time the handle lives
/// in; `resolved_at` is the time of the stored version actually loaded, which
/// is never later than `now`.
struct ElementHandle {
  Path path;
  TimePoint now;
  TimePoint resolved_at;
  Trace trace;

  friend bool operator==(const ElementHandle&, const ElementHandle&) = default;
};

inline TimePoint now_of(const ElementHandle& e) noexcept { return e.now; }

/// Result of deep_shift: a handle and its shifted containment subtree.
struct HandleTree {
  ElementHandle handle;
  std::vector<HandleTree> children;

  std::size_t size() const;
  /// Pre-order.
  std::vector<ElementHandle> flatten() const;

  friend bool operator==(const HandleTree&, const HandleTree&) = default;
};

/// Time-relative navigation over a version store. Holds a reference only;
/// the store must outlive the context.
class NavigationContext {
 public:
  explicit NavigationContext(const VersionStore& store) : store_(&store) {}

  const VersionStore& store() const noexcept { return *store_; }

  /// Floor resolution. Throws kNotYetExisting when `path` has no version at
  /// or before `time`.
  ElementHandle resolve(const Path& path, TimePoint time) const;

  /// Resolves every target of `relationship` at e.now. The name is looked up
  /// among e's references first, then among its containment children
  /// (grouped by the relationship of their last path segment). Targets with
  /// no version at or before e.now are left out. Throws kUnknownRelationship.
  std::vector<ElementHandle> navigate(const ElementHandle& e,
                                      std::string_view relationship) const;

  ElementHandle shift(const ElementHandle& e, TimePoint time) const;

  /// shift() of e and, in pre-order, of its whole containment subtree as
  /// listed by the shifted traces. Children that do not exist yet at `time`
  /// are left out; only the root may throw kNotYetExisting.
  HandleTree deep_shift(const ElementHandle& e, TimePoint time) const;

  /// Version stored directly before e.resolved_at. Throws kNoPredecessor.
  ElementHandle previous(const ElementHandle& e) const;

  /// Version stored directly after e.resolved_at. Throws kNoSuccessor.
  ElementHandle next(const ElementHandle& e) const;

 private:
  HandleTree deep_shift_from(ElementHandle handle) const;

  const VersionStore* store_;
};

}  // namespace stc
