#include "stc/resolution.hpp"

#include "stc/error.hpp"

namespace stc {

std::size_t HandleTree::size() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

std::vector<ElementHandle> HandleTree::flatten() const {
  std::vector<ElementHandle> out;
  std::vector<const HandleTree*> stack{this};
  while (!stack.empty()) {
    const HandleTree* node = stack.back();
    stack.pop_back();
    out.push_back(node->handle);
    for (auto it = node->children.rbegin(); it != node->children.rend(); ++it) {
      stack.push_back(&*it);
    }
  }
  return out;
}

ElementHandle NavigationContext::resolve(const Path& path, TimePoint time) const {
  auto v = store_->floor_version(path, time);
  if (!v) {
    throw Error(ErrorCode::kNotYetExisting,
                path_to_string(path) + " has no version at or before " + to_string(time));
  }
  return {path, time, v->time, std::move(v->trace)};
}

std::vector<ElementHandle> NavigationContext::navigate(const ElementHandle& e,
                                                       std::string_view relationship) const {
  std::vector<Path> targets;
  if (auto it = e.trace.relationships.find(std::string(relationship));
      it != e.trace.relationships.end()) {
    targets = it->second;
  } else if (e.trace.has_containment(relationship)) {
    targets = e.trace.children_in(relationship);
  } else {
    throw Error(ErrorCode::kUnknownRelationship,
                "'" + std::string(relationship) + "' on " + path_to_string(e.path) + " at " +
                    to_string(e.resolved_at));
  }

  std::vector<ElementHandle> out;
  out.reserve(targets.size());
  for (const auto& target : targets) {
    auto v = store_->floor_version(target, e.now);
    if (!v) continue;
    out.push_back({target, e.now, v->time, std::move(v->trace)});
  }
  return out;
}

ElementHandle NavigationContext::shift(const ElementHandle& e, TimePoint time) const {
  return resolve(e.path, time);
}

HandleTree NavigationContext::deep_shift_from(ElementHandle handle) const {
  HandleTree node{std::move(handle), {}};
  const TimePoint time = node.handle.now;
  for (const auto& child : node.handle.trace.children) {
    auto v = store_->floor_version(child, time);
    if (!v) continue;
    node.children.push_back(deep_shift_from({child, time, v->time, std::move(v->trace)}));
  }
  return node;
}

HandleTree NavigationContext::deep_shift(const ElementHandle& e, TimePoint time) const {
  return deep_shift_from(shift(e, time));
}

ElementHandle NavigationContext::previous(const ElementHandle& e) const {
  auto before = e.resolved_at.predecessor();
  auto v = before ? store_->floor_version(e.path, *before) : std::nullopt;
  if (!v) {
    throw Error(ErrorCode::kNoPredecessor,
                path_to_string(e.path) + " has no version before " + to_string(e.resolved_at));
  }
  return {e.path, v->time, v->time, std::move(v->trace)};
}

ElementHandle NavigationContext::next(const ElementHandle& e) const {
  auto after = e.resolved_at.successor();
  auto v = after ? store_->ceiling_version(e.path, *after) : std::nullopt;
  if (!v) {
    throw Error(ErrorCode::kNoSuccessor,
                path_to_string(e.path) + " has no version after " + to_string(e.resolved_at));
  }
  return {e.path, v->time, v->time, std::move(v->trace)};
}

}  // namespace stc
