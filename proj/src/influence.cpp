#include "din/influence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace din {

std::string_view to_string(DinKind kind) { return kind == DinKind::Activity ? "activity" : "probability"; }

DinKind parse_din_kind(std::string_view text) {
  if (text == "activity") return DinKind::Activity;
  if (text == "probability") return DinKind::Probability;
  throw std::invalid_argument("unknown DIN kind '" + std::string(text) + "' (expected activity or probability)");
}

double EventDelta::sum() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.second;
  return s;
}

EventDelta event_delta_activity(RuleIndex source, std::span<const double> alpha_before,
                                std::span<const double> alpha_after, std::span<const RuleIndex> candidates) {
  EventDelta delta{source, {}};
  for (RuleIndex s : candidates) {
    const double before = alpha_before[s];
    if (before == 0.0) continue;
    const double change = (alpha_after[s] - before) / before;
    if (change != 0.0) delta.entries.emplace_back(s, change);
  }
  std::sort(delta.entries.begin(), delta.entries.end());
  return delta;
}

EventDelta event_delta_activity(RuleIndex source, std::span<const double> alpha_before,
                                std::span<const double> alpha_after) {
  std::vector<RuleIndex> all(alpha_before.size());
  for (std::size_t s = 0; s < all.size(); ++s) all[s] = static_cast<RuleIndex>(s);
  return event_delta_activity(source, alpha_before, alpha_after, all);
}

EventDelta event_delta_probability(RuleIndex source, std::span<const double> alpha_before,
                                   std::span<const double> alpha_after) {
  double lambda_before = 0.0, lambda_after = 0.0;
  for (double a : alpha_before) lambda_before += a;
  for (double a : alpha_after) lambda_after += a;
  EventDelta delta{source, {}};
  for (std::size_t s = 0; s < alpha_before.size(); ++s) {
    const double p_before = alpha_before[s] / lambda_before;
    const double p_after = lambda_after > 0.0 ? alpha_after[s] / lambda_after : 0.0;
    const double change = p_after - p_before;
    if (change != 0.0) delta.entries.emplace_back(static_cast<RuleIndex>(s), change);
  }
  return delta;
}

std::optional<double> DinWindow::value(RuleIndex source, RuleIndex target) const {
  auto it = std::lower_bound(links.begin(), links.end(), std::pair{source, target},
                             [](const InfluenceLink& l, const std::pair<RuleIndex, RuleIndex>& key) {
                               return std::pair{l.source, l.target} < key;
                             });
  if (it != links.end() && it->source == source && it->target == target) return it->value;
  return std::nullopt;
}

WindowGrid::WindowGrid(double tau, double t_end) : tau_(tau), t_end_(t_end) {
  if (!(tau > 0.0) || !(t_end > 0.0)) throw std::invalid_argument("window grid needs tau > 0 and t_end > 0");
  count_ = static_cast<std::size_t>(std::max(1.0, std::ceil(t_end / tau - 1e-9)));
}

double WindowGrid::end(std::size_t k) const { return std::min(static_cast<double>(k + 1) * tau_, t_end_); }

bool WindowGrid::partial(std::size_t k) const { return end(k) - start(k) < tau_ * (1.0 - 1e-9); }

std::size_t WindowGrid::window_of(double t) const {
  if (t <= 0.0) return 0;
  auto k = std::min(static_cast<std::size_t>(std::floor(t / tau_)), count_ - 1);
  // Settle against the same products start() uses, so rounding never disagrees.
  while (k + 1 < count_ && t >= start(k + 1)) ++k;
  while (k > 0 && t < start(k)) --k;
  return k;
}

WindowAccumulator::WindowAccumulator(RuleIndex rule_count, DinKind kind)
    : kind_(kind), hits_(static_cast<std::size_t>(rule_count), 0) {}

void WindowAccumulator::accumulate(const EventDelta& delta) {
  ++hits_[delta.source];
  for (const auto& [target, value] : delta.entries) sums_[{delta.source, target}] += value;
}

DinWindow WindowAccumulator::finalize(double t_start, double t_end, bool partial) {
  DinWindow w;
  w.t_start = t_start;
  w.t_end = t_end;
  w.partial = partial;
  w.kind = kind_;
  w.hits = hits_;
  for (const auto& [key, sum] : sums_) {
    const double mean = sum / static_cast<double>(hits_[key.first]);
    if (mean != 0.0) w.links.push_back({key.first, key.second, mean});
  }
  std::fill(hits_.begin(), hits_.end(), 0);
  sums_.clear();
  return w;
}

WindowSeries::WindowSeries(const WindowGrid& grid, RuleIndex rule_count, DinKind kind)
    : grid_(grid), accumulator_(rule_count, kind) {}

void WindowSeries::advance_to(std::size_t k) {
  while (current_ < k) {
    done_.push_back(accumulator_.finalize(grid_.start(current_), grid_.end(current_), grid_.partial(current_)));
    ++current_;
  }
}

void WindowSeries::record(double time, const EventDelta& delta) {
  advance_to(grid_.window_of(time));
  accumulator_.accumulate(delta);
}

std::vector<DinWindow> WindowSeries::finish(double halt_time, bool stopped_early, bool truncate) {
  advance_to(grid_.window_of(halt_time));
  done_.push_back(accumulator_.finalize(grid_.start(current_), grid_.end(current_),
                                        grid_.partial(current_) || stopped_early));
  ++current_;
  if (!truncate) advance_to(grid_.size());
  return std::move(done_);
}

}  // namespace din
