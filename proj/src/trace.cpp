#include "din/trace.hpp"

#include <stdexcept>
#include <string>

#include "json.hpp"

namespace din {

using json = nlohmann::ordered_json;

namespace {

RunStatus parse_status(const std::string& s) {
  if (s == "completed") return RunStatus::Completed;
  if (s == "deadlock") return RunStatus::Deadlock;
  if (s == "max-events") return RunStatus::MaxEvents;
  throw std::runtime_error("trace: unknown end status '" + s + "'");
}

}  // namespace

TraceWriter::TraceWriter(const std::filesystem::path& path, const TraceHeader& header) : out_(path) {
  if (!out_) throw IoError("cannot open trace file " + path.string());
  json h;
  h["din_trace"] = 1;
  h["kind"] = std::string(to_string(header.kind));
  h["tau"] = header.tau;
  h["t_end"] = header.t_end;
  h["rules"] = header.rules;
  out_ << h.dump() << '\n';
}

void TraceWriter::write(const EventRecord& record, const EventDelta& delta) {
  json line;
  line["i"] = record.index;
  line["t"] = record.time;
  line["rule"] = record.rule;
  line["null"] = record.is_null;
  if (!record.is_null) {
    json deltas = json::array();
    for (const auto& [target, value] : delta.entries) deltas.push_back(json::array({target, value}));
    line["deltas"] = std::move(deltas);
  }
  out_ << line.dump() << '\n';
}

void TraceWriter::close(RunStatus status, double final_time) {
  json end;
  end["end"] = std::string(to_string(status));
  end["t"] = final_time;
  out_ << end.dump() << '\n';
  out_.flush();
  if (!out_) throw IoError("failed writing trace file");
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  bool have_header = false, have_end = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_header) {
      if (!j.contains("din_trace")) throw std::runtime_error("trace: missing header line");
      trace.header.kind = parse_din_kind(j.at("kind").get<std::string>());
      trace.header.tau = j.at("tau").get<double>();
      trace.header.t_end = j.at("t_end").get<double>();
      trace.header.rules = j.at("rules").get<RuleIndex>();
      have_header = true;
      continue;
    }
    if (j.contains("end")) {
      trace.status = parse_status(j.at("end").get<std::string>());
      trace.final_time = j.at("t").get<double>();
      have_end = true;
      continue;
    }
    TraceEvent ev;
    ev.record.index = j.at("i").get<std::uint64_t>();
    ev.record.time = j.at("t").get<double>();
    ev.record.rule = j.at("rule").get<RuleIndex>();
    ev.record.is_null = j.at("null").get<bool>();
    ev.delta.source = ev.record.rule;
    if (!ev.record.is_null) {
      for (const auto& d : j.at("deltas")) ev.delta.entries.emplace_back(d.at(0).get<RuleIndex>(), d.at(1).get<double>());
    }
    trace.events.push_back(std::move(ev));
  }
  if (!have_header) throw std::runtime_error("trace: empty input");
  if (!have_end) throw std::runtime_error("trace: missing end record");
  return trace;
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file " + path.string());
  return read_trace(in);
}

std::vector<DinWindow> recompute_windows(const Trace& trace) {
  const WindowGrid grid(trace.header.tau, trace.header.t_end);
  WindowSeries series(grid, trace.header.rules, trace.header.kind);
  for (const auto& ev : trace.events) {
    if (!ev.record.is_null) series.record(ev.record.time, ev.delta);
  }
  return series.finish(trace.final_time, trace.status != RunStatus::Completed, trace.status == RunStatus::MaxEvents);
}

}  // namespace din
