#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <vector>

#include "din/influence.hpp"
#include "din/io_error.hpp"
#include "din/simulator.hpp"

namespace din {

/// Line-delimited event trace. The first line is a header
/// `{"din_trace":1,"kind":…,"tau":…,"t_end":…,"rules":N}`, then one record
/// per clock tick
/// `{"i":…,"t":…,"rule":…,"null":…,"deltas":[[s,Δ],…]}` (no deltas on null
/// events), and a closing `{"end":"completed|deadlock|max-events","t":…}`.
struct TraceHeader {
  DinKind kind = DinKind::Activity;
  double tau = 0.0;
  double t_end = 0.0;
  RuleIndex rules = 0;
};

struct TraceEvent {
  EventRecord record;
  EventDelta delta;
};

struct Trace {
  TraceHeader header;
  std::vector<TraceEvent> events;
  RunStatus status = RunStatus::Completed;
  double final_time = 0.0;
};

class TraceWriter {
 public:
  TraceWriter(const std::filesystem::path& path, const TraceHeader& header);

  void write(const EventRecord& record, const EventDelta& delta);
  void close(RunStatus status, double final_time);

 private:
  std::ofstream out_;
};

/// Throws std::runtime_error on malformed input.
Trace read_trace(std::istream& in);
Trace read_trace(const std::filesystem::path& path);

/// Rebuilds the windows of the traced kind from the recorded deltas alone.
std::vector<DinWindow> recompute_windows(const Trace& trace);

}  // namespace din
