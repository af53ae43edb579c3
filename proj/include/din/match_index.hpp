#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "din/component.hpp"

namespace din {

/// Incrementally maintained embedding sets for a collection of distinct
/// components. After a rewrite only matches that contain a touched agent, or
/// that can be reached from one by walking the pattern's bonds, are revisited,
/// so the per-update cost does not depend on the mixture size.
class MatchIndex {
 public:
  /// Registers a component and returns its id; structurally identical
  /// components share one id.
  int add(const Component& component);

  int size() const { return static_cast<int>(components_.size()); }
  const Component& component(int id) const { return components_[id]; }

  /// Recomputes every match set from scratch.
  void rebuild(const Mixture& mixture);

  std::uint64_t count(int id) const { return sets_[id].matches.size(); }
  /// Image of the k-th current match of component `id`.
  const std::vector<AgentIndex>& match(int id, std::size_t k) const { return sets_[id].matches[k].image; }

  /// Brings match sets up to date after the agents in `touched` changed (state,
  /// bonds, creation or deletion). Returns the ids whose count changed, sorted.
  std::vector<int> update(const Mixture& mixture, std::span<const AgentIndex> touched);

 private:
  struct Match {
    AgentIndex anchor;
    std::vector<AgentIndex> image;
  };
  static constexpr std::uint32_t kNoSlot = UINT32_MAX;
  struct MatchSet {
    std::vector<Match> matches;
    std::vector<std::uint32_t> slot_of_anchor;  // by agent index, kNoSlot if absent

    bool has(AgentIndex anchor) const { return anchor < slot_of_anchor.size() && slot_of_anchor[anchor] != kNoSlot; }
  };
  struct Entry {
    int component;
    AgentIndex anchor;
  };

  void insert(int id, AgentIndex anchor, std::vector<AgentIndex> image);
  void erase(int id, AgentIndex anchor);
  void ensure_capacity(const Mixture& mixture);

  std::vector<Component> components_;
  std::unordered_map<std::string, int> id_of_key_;
  std::vector<MatchSet> sets_;
  std::vector<std::vector<std::pair<int, int>>> positions_by_type_;  // (component, position)
  std::vector<std::vector<Entry>> by_agent_;
  std::vector<int> net_change_;
  std::vector<Entry> stale_;
};

}  // namespace din
