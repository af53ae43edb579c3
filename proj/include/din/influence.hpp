#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "din/model.hpp"

namespace din {

enum class DinKind { Activity, Probability };

std::string_view to_string(DinKind kind);
/// Accepts "activity" / "probability"; throws std::invalid_argument.
DinKind parse_din_kind(std::string_view text);

/// Sparse influence of one event of `source` on every target rule. Exact
/// zeros are never stored; entries are sorted by target.
struct EventDelta {
  RuleIndex source = -1;
  std::vector<std::pair<RuleIndex, double>> entries;

  double sum() const;
  friend bool operator==(const EventDelta&, const EventDelta&) = default;
};

/// Relative activity change of each target. Targets whose activity was zero
/// before the event receive no influence.
EventDelta event_delta_activity(RuleIndex source, std::span<const double> alpha_before,
                                std::span<const double> alpha_after);

/// Same, restricted to `candidates` (the rules whose activity may have
/// changed); every other target is known to be unchanged.
EventDelta event_delta_activity(RuleIndex source, std::span<const double> alpha_before,
                                std::span<const double> alpha_after, std::span<const RuleIndex> candidates);

/// Change in firing probability alpha_s / lambda of every target. When the
/// system activity after the event is zero, every probability after is taken
/// as zero.
EventDelta event_delta_probability(RuleIndex source, std::span<const double> alpha_before,
                                   std::span<const double> alpha_after);

struct InfluenceLink {
  RuleIndex source;
  RuleIndex target;
  double value;

  friend bool operator==(const InfluenceLink&, const InfluenceLink&) = default;
};

/// One time window of the dynamic influence network: per-rule hit counts and
/// the mean per-event influence of every rule that fired. Links are sorted by
/// (source, target) and carry no zero values.
struct DinWindow {
  double t_start = 0.0;
  double t_end = 0.0;
  bool partial = false;
  DinKind kind = DinKind::Activity;
  std::vector<std::uint64_t> hits;
  std::vector<InfluenceLink> links;

  std::optional<double> value(RuleIndex source, RuleIndex target) const;
  friend bool operator==(const DinWindow&, const DinWindow&) = default;
};

/// Tiling of [0, t_end] into consecutive windows of length tau; the last one
/// may be shorter.
class WindowGrid {
 public:
  WindowGrid(double tau, double t_end);

  std::size_t size() const { return count_; }
  double tau() const { return tau_; }
  double start(std::size_t k) const { return static_cast<double>(k) * tau_; }
  double end(std::size_t k) const;
  bool partial(std::size_t k) const;
  /// Window holding time t; times at a boundary belong to the later window.
  std::size_t window_of(double t) const;

 private:
  double tau_;
  double t_end_;
  std::size_t count_;
};

/// Running sums for the window currently being filled.
class WindowAccumulator {
 public:
  WindowAccumulator(RuleIndex rule_count, DinKind kind);

  /// Records one non-null event: adds its entries and counts a hit.
  void accumulate(const EventDelta& delta);

  /// Divides each row by its hit count and resets for the next window.
  DinWindow finalize(double t_start, double t_end, bool partial);

  std::uint64_t hits(RuleIndex rule) const { return hits_[rule]; }

 private:
  DinKind kind_;
  std::vector<std::uint64_t> hits_;
  std::map<std::pair<RuleIndex, RuleIndex>, double> sums_;
};

/// Cuts a stream of timed event deltas into windows on a grid.
class WindowSeries {
 public:
  WindowSeries(const WindowGrid& grid, RuleIndex rule_count, DinKind kind);

  /// Closes every window that ends at or before `time`, then accumulates.
  void record(double time, const EventDelta& delta);

  /// Closes the window holding `halt_time`, flagging it partial when the run
  /// stopped early. Later windows are emitted empty unless `truncate` is set.
  std::vector<DinWindow> finish(double halt_time, bool stopped_early, bool truncate);

 private:
  void advance_to(std::size_t k);

  WindowGrid grid_;
  WindowAccumulator accumulator_;
  std::size_t current_ = 0;
  std::vector<DinWindow> done_;
};

}  // namespace din
