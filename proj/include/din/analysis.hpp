#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "din/influence.hpp"

namespace din {

enum class ClusterMode { Step, Window, Global };

struct ClusterConfig {
  double threshold = 0.0;
  ClusterMode mode = ClusterMode::Step;
  std::size_t half_width = 0;  // window mode averages over [k - w, k + w]
  std::set<RuleIndex> pinned;
};

/// Parses "step", "global" or "window:N" into `config`; throws
/// std::invalid_argument otherwise.
void parse_cluster_mode(std::string_view text, ClusterConfig& config);
std::string format_cluster_mode(const ClusterConfig& config);

struct Clustering {
  std::size_t window = 0;
  std::vector<std::optional<RuleIndex>> assignment;  // per rule; id = smallest member
  std::vector<std::vector<RuleIndex>> clusters;       // sorted by id, members ascending

  friend bool operator==(const Clustering&, const Clustering&) = default;
};

/// Links used for clustering window k: the window itself, or the per-pair
/// arithmetic mean over the (boundary-truncated) neighbourhood or over all
/// windows, with absent entries counting as zero.
std::vector<InfluenceLink> effective_links(std::span<const DinWindow> windows, std::size_t k,
                                           const ClusterConfig& config);

/// Union of source and target for every nonzero link with |value| >= threshold.
/// Links touching a pinned rule are ignored.
Clustering cluster_links(std::span<const InfluenceLink> links, RuleIndex rule_count, double threshold,
                         const std::set<RuleIndex>& pinned = {});

/// Throws std::out_of_range for an invalid window index.
Clustering cluster(std::span<const DinWindow> windows, std::size_t k, const ClusterConfig& config);

/// Keeps links with |value| >= visibility; hits untouched.
DinWindow filter_links(const DinWindow& window, double visibility);

/// Influence time series of one rule across windows; std::nullopt marks a gap.
struct RuleSeries {
  RuleIndex rule = 0;
  std::vector<double> times;  // window starts
  std::map<RuleIndex, std::vector<std::optional<double>>> incoming;  // by source, self excluded
  std::map<RuleIndex, std::vector<std::optional<double>>> outgoing;  // by target, self excluded
  std::vector<std::optional<double>> self;
};

RuleSeries rule_series(std::span<const DinWindow> windows, RuleIndex rule);

}  // namespace din
