#include "din/mixture.hpp"

#include <stdexcept>
#include <string>

namespace din {

Mixture::Mixture(const std::vector<AgentSignature>& signatures) {
  for (const auto& sig : signatures) {
    std::vector<int> counts;
    for (const auto& s : sig.sites) counts.push_back(static_cast<int>(s.states.size()));
    state_counts_.push_back(std::move(counts));
  }
  by_type_.resize(signatures.size());
}

AgentIndex Mixture::add_agent(int type) {
  AgentIndex a;
  if (!free_list_.empty()) {
    a = free_list_.back();
    free_list_.pop_back();
  } else {
    a = static_cast<AgentIndex>(agents_.size());
    agents_.emplace_back();
  }
  Agent& agent = agents_[a];
  agent.type = type;
  agent.alive = true;
  agent.sites.assign(state_counts_[type].size(), Site{});
  for (std::size_t s = 0; s < agent.sites.size(); ++s) {
    agent.sites[s].state = state_counts_[type][s] > 0 ? 0 : kAnyState;
  }
  agent.type_slot = static_cast<std::uint32_t>(by_type_[type].size());
  by_type_[type].push_back(a);
  ++live_;
  return a;
}

std::vector<AgentIndex> Mixture::remove_agent(AgentIndex a) {
  if (!alive(a)) throw std::logic_error("remove_agent on a dead agent");
  std::vector<AgentIndex> partners;
  Agent& agent = agents_[a];
  for (int s = 0; s < static_cast<int>(agent.sites.size()); ++s) {
    if (auto p = unbind(a, s)) partners.push_back(p->agent);
  }
  auto& list = by_type_[agent.type];
  const AgentIndex moved = list.back();
  list[agent.type_slot] = moved;
  agents_[moved].type_slot = agent.type_slot;
  list.pop_back();
  agent.alive = false;
  ++agent.generation;
  agent.sites.clear();
  free_list_.push_back(a);
  --live_;
  return partners;
}

void Mixture::set_state(AgentIndex a, int site, int state) { agents_[a].sites[site].state = state; }

void Mixture::bind(AgentIndex a, int site, AgentIndex b, int other_site) {
  Site& x = agents_[a].sites[site];
  Site& y = agents_[b].sites[other_site];
  if (x.partner != kNoAgent || y.partner != kNoAgent || (a == b && site == other_site)) {
    throw std::logic_error("bind on an occupied site");
  }
  x.partner = b;
  x.partner_site = other_site;
  y.partner = a;
  y.partner_site = site;
}

std::optional<SiteRef> Mixture::unbind(AgentIndex a, int site) {
  Site& x = agents_[a].sites[site];
  if (x.partner == kNoAgent) return std::nullopt;
  SiteRef other{x.partner, x.partner_site};
  Site& y = agents_[other.agent].sites[other.site];
  y.partner = kNoAgent;
  y.partner_site = -1;
  x.partner = kNoAgent;
  x.partner_site = -1;
  return other;
}

std::uint64_t Mixture::digest() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  for (std::size_t a = 0; a < agents_.size(); ++a) {
    const Agent& agent = agents_[a];
    mix(agent.alive ? static_cast<std::uint64_t>(agent.type) + 1 : 0);
    if (!agent.alive) continue;
    for (const Site& s : agent.sites) {
      mix(static_cast<std::uint64_t>(s.state));
      mix(s.partner);
      mix(static_cast<std::uint64_t>(s.partner_site));
    }
  }
  return h;
}

void Mixture::check_invariants() const {
  std::size_t live = 0;
  for (AgentIndex a = 0; a < agents_.size(); ++a) {
    const Agent& agent = agents_[a];
    if (!agent.alive) continue;
    ++live;
    const auto& counts = state_counts_[agent.type];
    if (agent.sites.size() != counts.size()) throw std::logic_error("site count mismatch");
    for (int s = 0; s < static_cast<int>(agent.sites.size()); ++s) {
      const Site& site = agent.sites[s];
      const bool legal = counts[s] == 0 ? site.state == kAnyState : (site.state >= 0 && site.state < counts[s]);
      if (!legal) throw std::logic_error("illegal internal state on agent " + std::to_string(a));
      if (site.partner == kNoAgent) continue;
      if (site.partner == a && site.partner_site == s) throw std::logic_error("site bonded to itself");
      if (!alive(site.partner)) throw std::logic_error("bond to a deleted agent");
      const Site& back = agents_[site.partner].sites[site.partner_site];
      if (back.partner != a || back.partner_site != s) throw std::logic_error("asymmetric bond");
    }
    if (by_type_[agent.type][agent.type_slot] != a) throw std::logic_error("type index out of sync");
  }
  if (live != live_) throw std::logic_error("live count out of sync");
}

Mixture init_mixture(const Model& model) {
  Mixture mixture(model.signatures);
  for (const auto& entry : model.init) {
    const auto& slots = entry.pattern.agents;
    std::vector<AgentIndex> created(slots.size());
    for (std::int64_t copy = 0; copy < entry.count; ++copy) {
      for (std::size_t i = 0; i < slots.size(); ++i) {
        created[i] = mixture.add_agent(slots[i].type);
        for (const auto& s : slots[i].sites) {
          if (s.state != kAnyState) mixture.set_state(created[i], s.site, s.state);
        }
      }
      for (std::size_t i = 0; i < slots.size(); ++i) {
        for (const auto& s : slots[i].sites) {
          if (s.link.kind != LinkKind::Bound) continue;
          const auto j = static_cast<std::size_t>(s.link.agent);
          if (std::pair{i, s.site} < std::pair{j, s.link.site}) {
            mixture.bind(created[i], s.site, created[j], s.link.site);
          }
        }
      }
    }
  }
  return mixture;
}

}  // namespace din
