#include "din/model.hpp"

#include <algorithm>
#include <numeric>

namespace din {

std::optional<int> AgentSignature::find_site(std::string_view site) const {
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i].name == site) return static_cast<int>(i);
  }
  return std::nullopt;
}

const SitePattern* AgentPattern::find(int site) const {
  auto it = std::lower_bound(sites.begin(), sites.end(), site,
                             [](const SitePattern& s, int v) { return s.site < v; });
  if (it != sites.end() && it->site == site) return &*it;
  return nullptr;
}

std::vector<std::vector<int>> Pattern::components() const {
  const int n = static_cast<int>(agents.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i) {
    for (const auto& s : agents[i].sites) {
      if (s.link.kind == LinkKind::Bound) {
        int a = find(i), b = find(s.link.agent);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<std::vector<int>> out;
  std::vector<int> slot_of_root(n, -1);
  for (int i = 0; i < n; ++i) {
    if (agents[i].empty()) continue;
    int r = find(i);
    if (slot_of_root[r] < 0) {
      slot_of_root[r] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[slot_of_root[r]].push_back(i);
  }
  return out;
}

std::size_t Pattern::live_agent_count() const {
  return static_cast<std::size_t>(
      std::count_if(agents.begin(), agents.end(), [](const AgentPattern& a) { return !a.empty(); }));
}

std::optional<int> Model::find_agent(std::string_view name) const {
  for (std::size_t i = 0; i < signatures.size(); ++i) {
    if (signatures[i].name == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::optional<RuleIndex> Model::find_rule(std::string_view name) const {
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (rules[i].name == name) return static_cast<RuleIndex>(i);
  }
  return std::nullopt;
}

}  // namespace din
