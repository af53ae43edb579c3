#include "din/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "din/analysis.hpp"
#include "din/export.hpp"
#include "din/parser.hpp"
#include "din/service.hpp"
#include "din/simulator.hpp"

namespace din {

using json = nlohmann::ordered_json;

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// A ParseError tagged with the file it came from.
class ModelFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Model load_model(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return parse_model(text);
  } catch (const ParseError& e) {
    throw ModelFileError(path.string() + ":" + e.what());
  }
}

struct CheckArgs {
  std::string model;
};

struct SimulateArgs {
  std::string model;
  double t_end = 0.0;
  double tau = 0.0;
  std::string din = "activity";
  std::uint64_t seed = 0;
  std::optional<double> obs_sample;
  std::optional<std::string> trace;
  std::optional<std::uint64_t> max_events;
  std::string out;
};

struct ClusterArgs {
  std::string file;
  double threshold = 0.0;
  std::string mode = "step";
  std::optional<std::size_t> at;
  std::vector<RuleIndex> pinned;
  bool json = false;
};

struct ServeArgs {
  std::string file;
  std::optional<int> port;
  std::string host = "127.0.0.1";
  std::optional<std::string> ui;
};

int do_check(const CheckArgs& args, std::ostream& out) {
  const Model model = load_model(args.model);
  out << "model " << std::filesystem::path(args.model).stem().string() << "\n";
  out << "signatures " << model.signatures.size() << "\n";
  for (const auto& sig : model.signatures) {
    out << "  " << sig.name << "(";
    for (std::size_t i = 0; i < sig.sites.size(); ++i) {
      if (i) out << ", ";
      out << sig.sites[i].name;
      if (!sig.sites[i].states.empty()) {
        out << "{";
        for (std::size_t k = 0; k < sig.sites[i].states.size(); ++k) out << (k ? " " : "") << sig.sites[i].states[k];
        out << "}";
      }
    }
    out << ")\n";
  }
  out << "rules " << model.rules.size() << "\n";
  for (RuleIndex r = 0; r < model.rule_count(); ++r) {
    const Rule& rule = model.rules[r];
    out << "  " << r << " '" << rule.name << "' " << format_pattern(model, rule.lhs) << " -> "
        << format_pattern(model, rule.rhs) << " @ " << rule.rate;
    if (rule.symmetry != 1) out << "  (symmetry " << rule.symmetry << ")";
    out << "\n";
  }
  std::uint64_t agents = 0;
  for (const auto& entry : model.init) agents += entry.count * entry.pattern.live_agent_count();
  out << "init " << model.init.size() << " entries, " << agents << " agents\n";
  out << "observables " << model.observables.size() << "\n";
  for (const auto& o : model.observables) out << "  '" << o.name << "'\n";
  return kExitOk;
}

int do_simulate(const SimulateArgs& args, std::ostream& err) {
  const Model model = load_model(args.model);
  SimConfig config;
  config.t_end = args.t_end;
  config.tau = args.tau;
  try {
    config.din_kind = parse_din_kind(args.din);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  config.seed = args.seed;
  config.obs_sample = args.obs_sample;
  config.max_events = args.max_events;
  if (args.trace) config.trace_path = *args.trace;
  validate(config);

  const SimResult result = run(model, config);
  write_export(args.out, make_export(model, std::filesystem::path(args.model).stem().string(), config, result));
  if (result.stats.status != RunStatus::Completed) {
    err << "note: run stopped early (" << to_string(result.stats.status) << ") at t = " << result.stats.final_time
        << "\n";
  }
  return kExitOk;
}

void print_clustering(const Clustering& c, const DinWindow& w, std::ostream& out) {
  out << "window " << c.window << " [" << w.t_start << ", " << w.t_end << "]" << (w.partial ? " partial" : "") << ":";
  if (c.clusters.empty()) out << " no clusters";
  for (const auto& members : c.clusters) {
    out << " {";
    for (std::size_t i = 0; i < members.size(); ++i) out << (i ? " " : "") << members[i];
    out << "}";
  }
  std::vector<RuleIndex> loose;
  for (std::size_t r = 0; r < c.assignment.size(); ++r) {
    if (!c.assignment[r]) loose.push_back(static_cast<RuleIndex>(r));
  }
  if (!loose.empty()) {
    out << " unclustered:";
    for (RuleIndex r : loose) out << " " << r;
  }
  out << "\n";
}

int do_cluster(const ClusterArgs& args, std::ostream& out) {
  const ExportDocument doc = read_export(args.file);
  ClusterConfig config;
  config.threshold = args.threshold;
  try {
    parse_cluster_mode(args.mode, config);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(args.threshold >= 0.0)) throw ConfigError("threshold must be >= 0");
  for (RuleIndex r : args.pinned) {
    if (r < 0 || static_cast<std::size_t>(r) >= doc.meta.rules.size()) throw ConfigError("pinned rule out of range");
    config.pinned.insert(r);
  }
  if (args.at && *args.at >= doc.windows.size()) {
    throw ConfigError("window " + std::to_string(*args.at) + " out of range (" + std::to_string(doc.windows.size()) +
                      " windows)");
  }

  std::size_t first = 0, last = doc.windows.size();
  if (args.at) first = *args.at, last = *args.at + 1;
  json all = json::array();
  for (std::size_t k = first; k < last; ++k) {
    const Clustering c = cluster(doc.windows, k, config);
    if (!args.json) {
      print_clustering(c, doc.windows[k], out);
      continue;
    }
    json j;
    j["window"] = k;
    json assignment = json::array();
    for (const auto& a : c.assignment) assignment.push_back(a ? json(*a) : json(nullptr));
    j["assignment"] = std::move(assignment);
    j["clusters"] = c.clusters;
    all.push_back(std::move(j));
  }
  if (args.json) out << all.dump() << "\n";
  return kExitOk;
}

int do_serve(const ServeArgs& args, std::ostream& err) {
  ExportDocument doc = read_export(args.file);
  if (args.ui && !std::filesystem::is_directory(*args.ui)) {
    throw IoError("UI directory " + *args.ui + " does not exist");
  }
  std::optional<std::filesystem::path> ui;
  if (args.ui) ui = *args.ui;
  Service service(std::move(doc), ui);
  const int port = service.bind(args.host, args.port.value_or(default_port()));
  if (port < 0) throw IoError("cannot bind " + args.host + ":" + std::to_string(args.port.value_or(default_port())));
  err << "serving " << args.file << " on http://" << args.host << ":" << port << "/\n";
  err.flush();
  if (!service.listen()) throw IoError("server stopped unexpectedly");
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rule-based model simulator and dynamic influence network toolkit", "din"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "Parse and validate a model, print a summary");
  check_cmd->add_option("MODEL", check.model, "Model file")->required();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a model and write an export document");
  sim_cmd->add_option("MODEL", sim.model, "Model file")->required();
  sim_cmd->add_option("--t-end", sim.t_end, "Simulated time horizon")->required();
  sim_cmd->add_option("--tau", sim.tau, "Influence window length")->required();
  sim_cmd->add_option("--din", sim.din, "Exported network: activity or probability")
      ->check(CLI::IsMember({"activity", "probability"}));
  sim_cmd->add_option("--seed", sim.seed, "Random seed");
  sim_cmd->add_option("--obs-sample", sim.obs_sample, "Observable sampling period (default: tau)");
  sim_cmd->add_option("--trace", sim.trace, "Write the event trace to this file");
  sim_cmd->add_option("--max-events", sim.max_events, "Stop after this many clock ticks");
  sim_cmd->add_option("--out", sim.out, "Export document to write")->required();

  ClusterArgs cl;
  auto* cluster_cmd = app.add_subcommand("cluster", "Cluster rules of an exported run");
  cluster_cmd->add_option("FILE", cl.file, "Export document")->required();
  cluster_cmd->add_option("--threshold", cl.threshold, "Minimum |influence| joining two rules")->required();
  cluster_cmd->add_option("--mode", cl.mode, "step, window:N or global");
  cluster_cmd->add_option("--at", cl.at, "Only this window");
  cluster_cmd->add_option("--pin", cl.pinned, "Rules kept out of every cluster");
  cluster_cmd->add_flag("--json", cl.json, "Structured output");

  ServeArgs sv;
  auto* serve_cmd = app.add_subcommand("serve", "Serve an exported run over HTTP");
  serve_cmd->add_option("FILE", sv.file, "Export document")->required();
  serve_cmd->add_option("--port", sv.port, "Port (default: $DIN_PORT or 8080)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", sv.host, "Address to bind");
  serve_cmd->add_option("--ui", sv.ui, "Directory holding the UI bundle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*check_cmd) return do_check(check, out);
    if (*sim_cmd) return do_simulate(sim, err);
    if (*cluster_cmd) return do_cluster(cl, out);
    if (*serve_cmd) return do_serve(sv, err);
  } catch (const ModelFileError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ExportFormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitUsage;
}

}  // namespace din
