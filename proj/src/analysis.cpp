#include "din/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace din {

void parse_cluster_mode(std::string_view text, ClusterConfig& config) {
  if (text == "step") {
    config.mode = ClusterMode::Step;
    config.half_width = 0;
    return;
  }
  if (text == "global") {
    config.mode = ClusterMode::Global;
    config.half_width = 0;
    return;
  }
  constexpr std::string_view prefix = "window:";
  if (text.starts_with(prefix)) {
    const std::string_view digits = text.substr(prefix.size());
    std::size_t w = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), w);
    if (!digits.empty() && ec == std::errc{} && ptr == digits.data() + digits.size()) {
      config.mode = ClusterMode::Window;
      config.half_width = w;
      return;
    }
  }
  throw std::invalid_argument("invalid cluster mode '" + std::string(text) + "' (expected step, window:N or global)");
}

std::string format_cluster_mode(const ClusterConfig& config) {
  switch (config.mode) {
    case ClusterMode::Step: return "step";
    case ClusterMode::Global: return "global";
    case ClusterMode::Window: return "window:" + std::to_string(config.half_width);
  }
  return "step";
}

std::vector<InfluenceLink> effective_links(std::span<const DinWindow> windows, std::size_t k,
                                           const ClusterConfig& config) {
  if (k >= windows.size()) throw std::out_of_range("window index out of range");
  if (config.mode == ClusterMode::Step) return windows[k].links;

  std::size_t first = 0, last = windows.size() - 1;
  if (config.mode == ClusterMode::Window) {
    first = k >= config.half_width ? k - config.half_width : 0;
    last = std::min(windows.size() - 1, k + config.half_width);
  }
  std::map<std::pair<RuleIndex, RuleIndex>, double> sums;
  for (std::size_t i = first; i <= last; ++i) {
    for (const auto& l : windows[i].links) sums[{l.source, l.target}] += l.value;
  }
  const auto span = static_cast<double>(last - first + 1);
  std::vector<InfluenceLink> out;
  out.reserve(sums.size());
  for (const auto& [key, sum] : sums) {
    if (sum != 0.0) out.push_back({key.first, key.second, sum / span});
  }
  return out;
}

Clustering cluster_links(std::span<const InfluenceLink> links, RuleIndex rule_count, double threshold,
                         const std::set<RuleIndex>& pinned) {
  std::vector<RuleIndex> parent(rule_count);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<bool> member(rule_count, false);
  auto find = [&parent](RuleIndex x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  for (const auto& l : links) {
    if (l.source < 0 || l.source >= rule_count || l.target < 0 || l.target >= rule_count) {
      throw std::out_of_range("link references an unknown rule");
    }
    if (l.value == 0.0 || std::abs(l.value) < threshold) continue;
    if (pinned.contains(l.source) || pinned.contains(l.target)) continue;
    // New cluster, join either side, or merge two clusters: all one union.
    member[l.source] = member[l.target] = true;
    const RuleIndex a = find(l.source), b = find(l.target);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }

  Clustering out;
  out.assignment.assign(rule_count, std::nullopt);
  std::map<RuleIndex, std::vector<RuleIndex>> groups;
  for (RuleIndex r = 0; r < rule_count; ++r) {
    if (member[r]) groups[find(r)].push_back(r);
  }
  for (auto& [root, members] : groups) {
    const RuleIndex id = members.front();
    for (RuleIndex r : members) out.assignment[r] = id;
    out.clusters.push_back(std::move(members));
  }
  return out;
}

Clustering cluster(std::span<const DinWindow> windows, std::size_t k, const ClusterConfig& config) {
  if (config.threshold < 0.0 || std::isnan(config.threshold)) throw std::invalid_argument("threshold must be >= 0");
  const auto links = effective_links(windows, k, config);
  Clustering c = cluster_links(links, static_cast<RuleIndex>(windows[k].hits.size()), config.threshold, config.pinned);
  c.window = k;
  return c;
}

DinWindow filter_links(const DinWindow& window, double visibility) {
  DinWindow out = window;
  std::erase_if(out.links, [visibility](const InfluenceLink& l) { return std::abs(l.value) < visibility; });
  return out;
}

RuleSeries rule_series(std::span<const DinWindow> windows, RuleIndex rule) {
  if (rule < 0 || (!windows.empty() && static_cast<std::size_t>(rule) >= windows.front().hits.size())) {
    throw std::out_of_range("rule index out of range");
  }
  RuleSeries s;
  s.rule = rule;
  const std::size_t n = windows.size();
  s.self.assign(n, std::nullopt);
  for (std::size_t k = 0; k < n; ++k) {
    s.times.push_back(windows[k].t_start);
    for (const auto& l : windows[k].links) {
      if (l.source == rule && l.target == rule) {
        s.self[k] = l.value;
      } else if (l.target == rule) {
        auto& series = s.incoming[l.source];
        if (series.empty()) series.assign(n, std::nullopt);
        series[k] = l.value;
      } else if (l.source == rule) {
        auto& series = s.outgoing[l.target];
        if (series.empty()) series.assign(n, std::nullopt);
        series[k] = l.value;
      }
    }
  }
  return s;
}

}  // namespace din
