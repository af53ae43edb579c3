#include "din/symmetry.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace din {

Pattern permute(const Pattern& pattern, const std::vector<int>& perm) {
  Pattern out;
  out.agents.resize(pattern.agents.size());
  for (std::size_t i = 0; i < pattern.agents.size(); ++i) {
    AgentPattern a = pattern.agents[i];
    for (auto& s : a.sites) {
      if (s.link.kind == LinkKind::Bound) s.link.agent = perm[s.link.agent];
    }
    out.agents[perm[i]] = std::move(a);
  }
  return out;
}

namespace {

// Enumerates the product of per-group permutations, calling visit(perm) for each.
template <typename Visit>
void for_each_permutation(std::vector<std::vector<int>>& groups, std::size_t g, std::vector<int>& perm,
                          Visit&& visit) {
  if (g == groups.size()) {
    visit(perm);
    return;
  }
  std::vector<int> image = groups[g];
  std::sort(image.begin(), image.end());
  do {
    for (std::size_t k = 0; k < groups[g].size(); ++k) perm[groups[g][k]] = image[k];
    for_each_permutation(groups, g + 1, perm, visit);
  } while (std::next_permutation(image.begin(), image.end()));
  for (int slot : groups[g]) perm[slot] = slot;
}

}  // namespace

int rule_symmetry(const Rule& rule) {
  const std::size_t n = rule.lhs.agents.size();
  std::map<int, std::vector<int>> by_type;
  for (std::size_t i = 0; i < n; ++i) {
    if (!rule.lhs.agents[i].empty()) by_type[rule.lhs.agents[i].type].push_back(static_cast<int>(i));
  }
  std::vector<std::vector<int>> groups;
  for (auto& [type, slots] : by_type) {
    if (slots.size() > 1) groups.push_back(slots);
  }
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  int count = 0;
  for_each_permutation(groups, 0, perm, [&](const std::vector<int>& p) {
    if (permute(rule.lhs, p) == rule.lhs && permute(rule.rhs, p) == rule.rhs) ++count;
  });
  return count;
}

}  // namespace din
