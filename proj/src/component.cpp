#include "din/component.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace din {

Component::Component(const Pattern& pattern, const std::vector<int>& slots) : slots_(slots) {
  std::vector<int> position_of(pattern.agents.size(), -1);
  for (std::size_t p = 0; p < slots.size(); ++p) position_of[slots[p]] = static_cast<int>(p);
  for (int slot : slots) {
    AgentPattern a = pattern.agents[slot];
    for (auto& s : a.sites) {
      if (s.link.kind == LinkKind::Bound) s.link.agent = position_of[s.link.agent];
    }
    agents_.push_back(std::move(a));
  }

  // Breadth-first spanning tree from the anchor.
  const int n = size();
  std::vector<int> parent(n, -1);
  std::vector<Hop> up(n);
  std::vector<bool> placed(n, false);
  std::deque<int> queue{0};
  placed[0] = true;
  while (!queue.empty()) {
    int p = queue.front();
    queue.pop_front();
    for (const auto& s : agents_[p].sites) {
      if (s.link.kind != LinkKind::Bound || placed[s.link.agent]) continue;
      const int q = s.link.agent;
      placed[q] = true;
      parent[q] = p;
      plan_.push_back({q, p, s.site, s.link.site});
      up[q] = {s.link.site, s.site, agents_[p].type};
      queue.push_back(q);
    }
  }
  to_anchor_.resize(n);
  for (int p = 0; p < n; ++p) {
    for (int q = p; parent[q] >= 0; q = parent[q]) to_anchor_[p].push_back(up[q]);
  }

  std::ostringstream os;
  for (const auto& a : agents_) {
    os << a.type << '(';
    for (const auto& s : a.sites) {
      os << s.site << ':' << s.state << ':' << static_cast<int>(s.link.kind) << ':' << s.link.agent << ':'
         << s.link.site << ';';
    }
    os << ')';
  }
  key_ = os.str();
}

bool Component::match_from(const Mixture& mixture, AgentIndex anchor, std::vector<AgentIndex>& image) const {
  const int n = size();
  image.assign(n, kNoAgent);
  if (!mixture.alive(anchor) || mixture.type(anchor) != agents_[0].type) return false;
  image[0] = anchor;
  for (const Step& step : plan_) {
    auto partner = mixture.partner(image[step.from], step.from_site);
    if (!partner || partner->site != step.site) return false;
    if (mixture.type(partner->agent) != agents_[step.position].type) return false;
    image[step.position] = partner->agent;
  }
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < p; ++q) {
      if (image[p] == image[q]) return false;
    }
  }
  for (int p = 0; p < n; ++p) {
    const AgentIndex a = image[p];
    for (const auto& s : agents_[p].sites) {
      if (s.state != kAnyState && mixture.state(a, s.site) != s.state) return false;
      switch (s.link.kind) {
        case LinkKind::Any: break;
        case LinkKind::Free:
          if (!mixture.is_free(a, s.site)) return false;
          break;
        case LinkKind::BoundAny:
          if (mixture.is_free(a, s.site)) return false;
          break;
        case LinkKind::Bound: {
          auto partner = mixture.partner(a, s.site);
          if (!partner || partner->agent != image[s.link.agent] || partner->site != s.link.site) return false;
          break;
        }
      }
    }
  }
  return true;
}

AgentIndex Component::anchor_for(const Mixture& mixture, AgentIndex agent, int position) const {
  for (const Hop& hop : to_anchor_[position]) {
    auto partner = mixture.partner(agent, hop.site);
    if (!partner || partner->site != hop.partner_site || mixture.type(partner->agent) != hop.partner_type) {
      return kNoAgent;
    }
    agent = partner->agent;
  }
  return agent;
}

std::uint64_t count_embeddings(const Component& component, const Mixture& mixture) {
  std::uint64_t count = 0;
  std::vector<AgentIndex> image;
  for (AgentIndex a : mixture.agents_of_type(component.anchor_type())) {
    if (component.match_from(mixture, a, image)) ++count;
  }
  return count;
}

std::vector<std::vector<AgentIndex>> enumerate_embeddings(const Component& component, const Mixture& mixture) {
  std::vector<AgentIndex> anchors(mixture.agents_of_type(component.anchor_type()).begin(),
                                  mixture.agents_of_type(component.anchor_type()).end());
  std::sort(anchors.begin(), anchors.end());
  std::vector<std::vector<AgentIndex>> out;
  std::vector<AgentIndex> image;
  for (AgentIndex a : anchors) {
    if (component.match_from(mixture, a, image)) out.push_back(image);
  }
  return out;
}

std::vector<Component> compile_components(const Pattern& pattern) {
  std::vector<Component> out;
  for (const auto& slots : pattern.components()) out.emplace_back(pattern, slots);
  return out;
}

}  // namespace din
