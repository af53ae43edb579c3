#include "din/match_index.hpp"

#include <algorithm>

namespace din {

int MatchIndex::add(const Component& component) {
  auto [it, inserted] = id_of_key_.try_emplace(component.key(), size());
  if (!inserted) return it->second;
  const int id = it->second;
  components_.push_back(component);
  sets_.push_back(MatchSet{{}, std::vector<std::uint32_t>(by_agent_.size(), kNoSlot)});
  net_change_.push_back(0);
  for (int p = 0; p < component.size(); ++p) {
    const auto type = static_cast<std::size_t>(component.agent(p).type);
    if (positions_by_type_.size() <= type) positions_by_type_.resize(type + 1);
    positions_by_type_[type].emplace_back(id, p);
  }
  return id;
}

void MatchIndex::ensure_capacity(const Mixture& mixture) {
  if (by_agent_.size() >= mixture.capacity()) return;
  // Grow geometrically so that creation-heavy runs resize rarely.
  const std::size_t n = std::max(mixture.capacity(), 2 * by_agent_.size());
  by_agent_.resize(n);
  for (auto& set : sets_) set.slot_of_anchor.resize(n, kNoSlot);
}

void MatchIndex::rebuild(const Mixture& mixture) {
  by_agent_.assign(mixture.capacity(), {});
  for (auto& set : sets_) set = MatchSet{{}, std::vector<std::uint32_t>(by_agent_.size(), kNoSlot)};
  std::vector<AgentIndex> image;
  for (int id = 0; id < size(); ++id) {
    const Component& c = components_[id];
    if (c.anchor_type() >= mixture.type_count()) continue;
    std::vector<AgentIndex> anchors(mixture.agents_of_type(c.anchor_type()).begin(),
                                    mixture.agents_of_type(c.anchor_type()).end());
    std::sort(anchors.begin(), anchors.end());
    for (AgentIndex a : anchors) {
      if (c.match_from(mixture, a, image)) insert(id, a, image);
    }
  }
}

void MatchIndex::insert(int id, AgentIndex anchor, std::vector<AgentIndex> image) {
  MatchSet& set = sets_[id];
  set.slot_of_anchor[anchor] = static_cast<std::uint32_t>(set.matches.size());
  for (AgentIndex a : image) by_agent_[a].push_back({id, anchor});
  set.matches.push_back({anchor, std::move(image)});
}

void MatchIndex::erase(int id, AgentIndex anchor) {
  MatchSet& set = sets_[id];
  const std::uint32_t slot = set.slot_of_anchor[anchor];
  set.slot_of_anchor[anchor] = kNoSlot;
  for (AgentIndex a : set.matches[slot].image) {
    auto& entries = by_agent_[a];
    auto e = std::find_if(entries.begin(), entries.end(),
                          [&](const Entry& x) { return x.component == id && x.anchor == anchor; });
    *e = entries.back();
    entries.pop_back();
  }
  if (slot + 1 != set.matches.size()) {
    set.matches[slot] = std::move(set.matches.back());
    set.slot_of_anchor[set.matches[slot].anchor] = slot;
  }
  set.matches.pop_back();
}

std::vector<int> MatchIndex::update(const Mixture& mixture, std::span<const AgentIndex> touched) {
  ensure_capacity(mixture);
  std::vector<std::pair<int, AgentIndex>> candidates;
  std::vector<int> affected;

  for (AgentIndex t : touched) {
    stale_.assign(by_agent_[t].begin(), by_agent_[t].end());
    for (const Entry& e : stale_) {
      if (!sets_[e.component].has(e.anchor)) continue;
      erase(e.component, e.anchor);
      if (net_change_[e.component]-- == 0) affected.push_back(e.component);
      candidates.emplace_back(e.component, e.anchor);
    }
    if (!mixture.alive(t)) continue;
    const auto type = static_cast<std::size_t>(mixture.type(t));
    if (type >= positions_by_type_.size()) continue;
    for (auto [id, position] : positions_by_type_[type]) {
      AgentIndex anchor = components_[id].anchor_for(mixture, t, position);
      if (anchor != kNoAgent) candidates.emplace_back(id, anchor);
    }
  }

  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::vector<AgentIndex> image;
  for (auto [id, anchor] : candidates) {
    if (!mixture.alive(anchor) || sets_[id].has(anchor)) continue;
    if (!components_[id].match_from(mixture, anchor, image)) continue;
    insert(id, anchor, image);
    if (net_change_[id]++ == 0) affected.push_back(id);
  }

  std::vector<int> changed;
  for (int id : affected) {
    if (net_change_[id] != 0) changed.push_back(id);
    net_change_[id] = 0;
  }
  std::sort(changed.begin(), changed.end());
  changed.erase(std::unique(changed.begin(), changed.end()), changed.end());
  return changed;
}

}  // namespace din
