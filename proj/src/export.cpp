#include "din/export.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace din {

using json = nlohmann::ordered_json;

namespace {

RunStatus parse_status(const std::string& s) {
  if (s == "completed") return RunStatus::Completed;
  if (s == "deadlock") return RunStatus::Deadlock;
  if (s == "max-events") return RunStatus::MaxEvents;
  throw ExportFormatError("unknown run status '" + s + "'");
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ExportFormatError(what);
}

}  // namespace

ExportDocument make_export(const Model& model, std::string model_name, const SimConfig& config,
                           const SimResult& result) {
  ExportDocument doc;
  doc.meta.model = std::move(model_name);
  for (RuleIndex r = 0; r < model.rule_count(); ++r) doc.meta.rules.push_back({r, model.rules[r].name});
  doc.meta.tau = config.tau;
  doc.meta.t_end = config.t_end;
  doc.meta.kind = config.din_kind;
  doc.meta.seed = config.seed;
  doc.meta.status = std::string(to_string(result.stats.status));
  doc.meta.events = result.stats.events;
  doc.meta.null_events = result.stats.null_events;
  doc.observables = result.observables;
  doc.windows = result.windows(config.din_kind);
  return doc;
}

json meta_to_json(const ExportMeta& meta, std::size_t window_count) {
  json j;
  j["model"] = meta.model;
  json rules = json::array();
  for (const auto& r : meta.rules) rules.push_back(json{{"id", r.id}, {"name", r.name}});
  j["rules"] = std::move(rules);
  j["tau"] = meta.tau;
  j["t_end"] = meta.t_end;
  j["din"] = std::string(to_string(meta.kind));
  j["seed"] = meta.seed;
  j["version"] = meta.version;
  j["status"] = meta.status;
  j["events"] = meta.events;
  j["null_events"] = meta.null_events;
  j["window_count"] = window_count;
  return j;
}

json observables_to_json(const ObservableSeries& series) {
  json j;
  j["names"] = series.names;
  j["times"] = series.times;
  j["values"] = series.values;
  return j;
}

json window_to_json(const DinWindow& window) {
  json j;
  j["t_start"] = window.t_start;
  j["t_end"] = window.t_end;
  j["partial"] = window.partial;
  json nodes = json::array();
  for (std::size_t r = 0; r < window.hits.size(); ++r) nodes.push_back(json{{"rule", r}, {"hits", window.hits[r]}});
  j["nodes"] = std::move(nodes);
  json links = json::array();
  for (const auto& l : window.links) links.push_back(json{{"src", l.source}, {"dst", l.target}, {"value", l.value}});
  j["links"] = std::move(links);
  return j;
}

json to_json(const ExportDocument& doc) {
  json j;
  j["format"] = "din-export";
  j["format_version"] = 1;
  j["meta"] = meta_to_json(doc.meta, doc.windows.size());
  j["observables"] = observables_to_json(doc.observables);
  json windows = json::array();
  for (const auto& w : doc.windows) windows.push_back(window_to_json(w));
  j["windows"] = std::move(windows);
  return j;
}

// One window and one observable row per line: still plain JSON, but diffs of
// golden files stay readable.
std::string dump_export(const ExportDocument& doc) {
  std::string s = "{\n";
  s += "\"format\": \"din-export\",\n\"format_version\": 1,\n";
  s += "\"meta\": " + meta_to_json(doc.meta, doc.windows.size()).dump() + ",\n";
  s += "\"observables\": {\n";
  s += "\"names\": " + json(doc.observables.names).dump() + ",\n";
  s += "\"times\": " + json(doc.observables.times).dump() + ",\n";
  s += "\"values\": [";
  for (std::size_t i = 0; i < doc.observables.values.size(); ++i) {
    s += i ? ",\n" : "\n";
    s += json(doc.observables.values[i]).dump();
  }
  s += doc.observables.values.empty() ? "]\n},\n" : "\n]\n},\n";
  s += "\"windows\": [";
  for (std::size_t k = 0; k < doc.windows.size(); ++k) {
    s += k ? ",\n" : "\n";
    s += window_to_json(doc.windows[k]).dump();
  }
  s += doc.windows.empty() ? "]\n}\n" : "\n]\n}\n";
  return s;
}

ExportDocument parse_export(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ExportFormatError(std::string("malformed export: ") + e.what());
  }

  ExportDocument doc;
  try {
    require(j.value("format", "") == "din-export", "not a DIN export document");
    require(j.at("format_version").get<int>() == 1, "unsupported export format version");

    const json& m = j.at("meta");
    doc.meta.model = m.at("model").get<std::string>();
    for (const auto& r : m.at("rules")) doc.meta.rules.push_back({r.at("id").get<RuleIndex>(), r.at("name").get<std::string>()});
    doc.meta.tau = m.at("tau").get<double>();
    doc.meta.t_end = m.at("t_end").get<double>();
    try {
      doc.meta.kind = parse_din_kind(m.at("din").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ExportFormatError(e.what());
    }
    doc.meta.seed = m.at("seed").get<std::uint64_t>();
    doc.meta.version = m.at("version").get<std::string>();
    doc.meta.status = m.at("status").get<std::string>();
    parse_status(doc.meta.status);
    doc.meta.events = m.at("events").get<std::uint64_t>();
    doc.meta.null_events = m.at("null_events").get<std::uint64_t>();

    const auto n = static_cast<RuleIndex>(doc.meta.rules.size());
    for (RuleIndex r = 0; r < n; ++r) require(doc.meta.rules[r].id == r, "rule ids must be dense and ordered");

    const json& o = j.at("observables");
    doc.observables.names = o.at("names").get<std::vector<std::string>>();
    doc.observables.times = o.at("times").get<std::vector<double>>();
    doc.observables.values = o.at("values").get<std::vector<std::vector<double>>>();
    require(doc.observables.times.size() == doc.observables.values.size(), "observable times and rows differ in length");
    for (const auto& row : doc.observables.values) {
      require(row.size() == doc.observables.names.size(), "observable row width does not match names");
    }

    for (const auto& w : j.at("windows")) {
      DinWindow win;
      win.kind = doc.meta.kind;
      win.t_start = w.at("t_start").get<double>();
      win.t_end = w.at("t_end").get<double>();
      win.partial = w.at("partial").get<bool>();
      const json& nodes = w.at("nodes");
      require(nodes.size() == doc.meta.rules.size(), "window node count does not match rule table");
      for (RuleIndex r = 0; r < n; ++r) {
        require(nodes[r].at("rule").get<RuleIndex>() == r, "window nodes must list rules in id order");
        win.hits.push_back(nodes[r].at("hits").get<std::uint64_t>());
      }
      for (const auto& l : w.at("links")) {
        InfluenceLink link{l.at("src").get<RuleIndex>(), l.at("dst").get<RuleIndex>(), l.at("value").get<double>()};
        require(link.source >= 0 && link.source < n && link.target >= 0 && link.target < n,
                "link references an unknown rule");
        require(link.value != 0.0 && std::isfinite(link.value), "link values must be finite and nonzero");
        win.links.push_back(link);
      }
      doc.windows.push_back(std::move(win));
    }
    require(m.at("window_count").get<std::size_t>() == doc.windows.size(), "window count mismatch");
  } catch (const json::exception& e) {
    throw ExportFormatError(std::string("invalid export: ") + e.what());
  }
  return doc;
}

void write_export(const std::filesystem::path& path, const ExportDocument& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << dump_export(doc);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

ExportDocument read_export(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_export(buf.str());
}

}  // namespace din
