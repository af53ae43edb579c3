#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "din/engine.hpp"
#include "din/influence.hpp"
#include "din/model.hpp"
#include "din/rng.hpp"

namespace din {

struct SimConfig {
  double t_end = 0.0;
  double tau = 0.0;
  DinKind din_kind = DinKind::Activity;
  std::uint64_t seed = 0;
  std::optional<double> obs_sample;        // defaults to tau
  std::optional<std::uint64_t> max_events;  // counts every clock tick, null events included
  std::optional<std::filesystem::path> trace_path;
  MatchMode match_mode = MatchMode::Incremental;
  bool verify_activities = false;  // recount from scratch after every event

  double observable_period() const { return obs_sample.value_or(tau); }
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws ConfigError unless t_end > 0, 0 < tau <= t_end and the observable
/// period is positive.
void validate(const SimConfig& config);

class DeadlockReached : public std::runtime_error {
 public:
  DeadlockReached() : std::runtime_error("system activity is zero; no rule can fire") {}
};

/// `index` counts state-changing events only; a null event carries the index
/// the next real event will get, and names the rule whose embeddings clashed.
struct EventRecord {
  std::uint64_t index = 0;
  double time = 0.0;
  RuleIndex rule = -1;
  bool is_null = false;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct StepResult {
  EventRecord record;
  Embedding embedding;  // empty for null events
  RewriteEffect effect;
  EventDelta activity_delta;
  EventDelta probability_delta;
};

struct ObservableSeries {
  std::vector<std::string> names;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // [row][observable]

  friend bool operator==(const ObservableSeries&, const ObservableSeries&) = default;
};

enum class RunStatus { Completed, Deadlock, MaxEvents };

std::string_view to_string(RunStatus status);

struct EventStats {
  std::uint64_t events = 0;       // non-null
  std::uint64_t null_events = 0;
  std::vector<std::uint64_t> fired;  // per rule
  RunStatus status = RunStatus::Completed;
  double final_time = 0.0;

  friend bool operator==(const EventStats&, const EventStats&) = default;
};

struct SimResult {
  std::vector<DinWindow> activity_windows;
  std::vector<DinWindow> probability_windows;
  ObservableSeries observables;
  EventStats stats;

  const std::vector<DinWindow>& windows(DinKind kind) const {
    return kind == DinKind::Activity ? activity_windows : probability_windows;
  }
};

/// Gillespie direct method over the rule set. Per tick the stream is consumed
/// as: waiting time, rule choice, then one index per lhs component.
class Simulator {
 public:
  Simulator(Model model, const SimConfig& config);

  double time() const { return time_; }
  const Engine& engine() const { return engine_; }
  std::uint64_t event_count() const { return events_; }
  std::uint64_t null_count() const { return null_events_; }

  /// Advances the clock by one exponential waiting time and fires.
  /// Throws DeadlockReached when the system activity is zero.
  StepResult step();

  /// The two halves of step(), for callers that must look at the next event
  /// time before committing to it.
  double draw_waiting_time();
  StepResult fire_at(double time);

 private:
  RuleIndex choose_rule();

  Engine engine_;
  Rng rng_;
  bool verify_;
  double time_ = 0.0;
  std::uint64_t events_ = 0;
  std::uint64_t null_events_ = 0;
};

using EventObserver = std::function<void(const StepResult&, const Engine&)>;

/// Simulates to config.t_end (or max_events), filling one window of each DIN
/// kind per tau-interval and sampling observables every obs_sample. A given
/// (model, config) always produces the same result.
SimResult run(const Model& model, const SimConfig& config, const EventObserver& observer = {});

}  // namespace din
