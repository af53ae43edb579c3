#include "din/simulator.hpp"

#include <cmath>
#include <optional>

#include "din/trace.hpp"

namespace din {

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Deadlock: return "deadlock";
    case RunStatus::MaxEvents: return "max-events";
  }
  return "completed";
}

void validate(const SimConfig& config) {
  if (!(config.t_end > 0.0) || !std::isfinite(config.t_end)) throw ConfigError("t_end must be a positive number");
  if (!(config.tau > 0.0) || !std::isfinite(config.tau)) throw ConfigError("tau must be a positive number");
  if (config.tau > config.t_end) throw ConfigError("tau must not exceed t_end");
  if (!(config.observable_period() > 0.0)) throw ConfigError("observable sampling period must be positive");
}

Simulator::Simulator(Model model, const SimConfig& config)
    : engine_(std::move(model), config.match_mode), rng_(config.seed), verify_(config.verify_activities) {}

double Simulator::draw_waiting_time() {
  const double lambda = engine_.activities().lambda;
  if (!(lambda > 0.0)) throw DeadlockReached();
  return rng_.exponential(lambda);
}

RuleIndex Simulator::choose_rule() {
  const auto& alpha = engine_.activities().alpha;
  const double target = rng_.uniform() * engine_.activities().lambda;
  double cumulative = 0.0;
  RuleIndex last_positive = -1;
  for (std::size_t s = 0; s < alpha.size(); ++s) {
    if (alpha[s] <= 0.0) continue;
    last_positive = static_cast<RuleIndex>(s);
    cumulative += alpha[s];
    if (target < cumulative) return last_positive;
  }
  return last_positive;
}

StepResult Simulator::fire_at(double time) {
  if (!(engine_.activities().lambda > 0.0)) throw DeadlockReached();
  time_ = time;
  StepResult result;
  const RuleIndex rule = choose_rule();
  result.record = {events_, time, rule, false};

  Selection selection = engine_.sample(rule, rng_);
  if (std::holds_alternative<Clash>(selection)) {
    result.record.is_null = true;
    ++null_events_;
    return result;
  }
  result.embedding = std::move(std::get<Embedding>(selection));

  const std::vector<double> before = engine_.activities().alpha;
  result.effect = engine_.apply(rule, result.embedding);
  const std::vector<double>& after = engine_.activities().alpha;
  result.activity_delta = event_delta_activity(rule, before, after, result.effect.affected_rules);
  result.probability_delta = event_delta_probability(rule, before, after);
  ++events_;

  if (verify_) {
    const ActivityVector fresh = engine_.recompute_activities();
    for (std::size_t s = 0; s < after.size(); ++s) {
      const double scale = std::max(1.0, std::abs(fresh.alpha[s]));
      if (std::abs(fresh.alpha[s] - after[s]) > 1e-9 * scale) {
        throw std::logic_error("incremental activity of rule '" + engine_.model().rules[s].name +
                               "' diverged from a full recount");
      }
    }
  }
  return result;
}

StepResult Simulator::step() {
  const double t = time_ + draw_waiting_time();
  return fire_at(t);
}

SimResult run(const Model& model, const SimConfig& config, const EventObserver& observer) {
  validate(config);
  Simulator sim(model, config);
  const WindowGrid grid(config.tau, config.t_end);
  const RuleIndex rules = model.rule_count();
  WindowSeries activity(grid, rules, DinKind::Activity);
  WindowSeries probability(grid, rules, DinKind::Probability);

  SimResult result;
  result.stats.fired.assign(rules, 0);
  for (const auto& o : model.observables) result.observables.names.push_back(o.name);

  std::optional<TraceWriter> trace;
  if (config.trace_path) trace.emplace(*config.trace_path, TraceHeader{config.din_kind, config.tau, config.t_end, rules});

  const double period = config.observable_period();
  std::uint64_t next_sample = 0;
  auto sample_through = [&](double t, bool inclusive) {
    while (true) {
      const double s = static_cast<double>(next_sample) * period;
      if (s > config.t_end * (1.0 + 1e-12) || (inclusive ? s > t : s >= t)) break;
      std::vector<double> row;
      row.reserve(model.observables.size());
      for (std::size_t k = 0; k < model.observables.size(); ++k) row.push_back(sim.engine().observable(k));
      result.observables.times.push_back(s);
      result.observables.values.push_back(std::move(row));
      ++next_sample;
    }
  };

  RunStatus status = RunStatus::Completed;
  while (true) {
    if (config.max_events && sim.event_count() + sim.null_count() >= *config.max_events) {
      status = RunStatus::MaxEvents;
      break;
    }
    if (!(sim.engine().activities().lambda > 0.0)) {
      status = RunStatus::Deadlock;
      break;
    }
    const double t = sim.time() + sim.draw_waiting_time();
    if (t > config.t_end) break;
    sample_through(t, false);
    StepResult step = sim.fire_at(t);
    if (!step.record.is_null) {
      activity.record(t, step.activity_delta);
      probability.record(t, step.probability_delta);
      ++result.stats.fired[step.record.rule];
    }
    if (trace) {
      trace->write(step.record, config.din_kind == DinKind::Activity ? step.activity_delta : step.probability_delta);
    }
    if (observer) observer(step, sim.engine());
  }

  const double halt = status == RunStatus::Completed ? config.t_end : sim.time();
  sample_through(status == RunStatus::MaxEvents ? halt : config.t_end, true);
  const bool early = status != RunStatus::Completed;
  const bool truncate = status == RunStatus::MaxEvents;
  result.activity_windows = activity.finish(halt, early, truncate);
  result.probability_windows = probability.finish(halt, early, truncate);
  result.stats.events = sim.event_count();
  result.stats.null_events = sim.null_count();
  result.stats.status = status;
  result.stats.final_time = halt;
  if (trace) trace->close(status, halt);
  return result;
}

}  // namespace din
