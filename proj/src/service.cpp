#include "din/service.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "din/analysis.hpp"
#include "httplib.h"

namespace din {

using json = nlohmann::ordered_json;

namespace {

std::string etag_of(std::string_view body) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : body) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "\"%016llx\"", static_cast<unsigned long long>(h));
  return buf;
}

ApiResponse reply(int status, const json& body) {
  ApiResponse r;
  r.status = status;
  r.body = body.dump();
  r.etag = etag_of(r.body);
  return r;
}

ApiResponse error(int status, const std::string& message) { return reply(status, json{{"error", message}}); }

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<double> parse_threshold(std::string_view s) {
  auto v = parse_number<double>(s);
  if (!v || !std::isfinite(*v) || *v < 0.0) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  while (!path.empty()) {
    if (path.front() == '/') {
      path.remove_prefix(1);
      continue;
    }
    const auto slash = path.find('/');
    parts.push_back(path.substr(0, slash));
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash);
  }
  return parts;
}

json optional_array(const std::vector<std::optional<double>>& values) {
  json a = json::array();
  for (const auto& v : values) a.push_back(v ? json(*v) : json(nullptr));
  return a;
}

}  // namespace

ApiHandler::ApiHandler(ExportDocument doc) : doc_(std::move(doc)) {}

ApiResponse ApiHandler::get(std::string_view path, const QueryParams& query) const {
  const auto parts = split_path(path);
  if (parts.size() < 2 || parts[0] != "api") return error(404, "no such endpoint");

  if (parts.size() == 2 && parts[1] == "meta") return reply(200, meta_to_json(doc_.meta, doc_.windows.size()));
  if (parts.size() == 2 && parts[1] == "observables") return reply(200, observables_to_json(doc_.observables));

  if (parts[1] == "window" && (parts.size() == 3 || (parts.size() == 4 && parts[3] == "clusters"))) {
    const auto k = parse_number<std::size_t>(parts[2]);
    if (!k || *k >= doc_.windows.size()) return error(404, "window index out of range");
    return parts.size() == 3 ? window(*k, query) : clusters(*k, query);
  }
  if (parts[1] == "rule" && parts.size() == 4 && parts[3] == "series") {
    const auto id = parse_number<RuleIndex>(parts[2]);
    if (!id || *id < 0 || static_cast<std::size_t>(*id) >= doc_.meta.rules.size()) {
      return error(404, "rule id out of range");
    }
    return series(*id);
  }
  return error(404, "no such endpoint");
}

ApiResponse ApiHandler::window(std::size_t k, const QueryParams& query) const {
  json body;
  if (auto it = query.find("visibility"); it != query.end()) {
    const auto v = parse_threshold(it->second);
    if (!v) return error(400, "visibility must be a nonnegative number");
    body = window_to_json(filter_links(doc_.windows[k], *v));
  } else {
    body = window_to_json(doc_.windows[k]);
  }
  return reply(200, body);
}

ApiResponse ApiHandler::clusters(std::size_t k, const QueryParams& query) const {
  ClusterConfig config;
  auto it = query.find("threshold");
  if (it == query.end()) return error(400, "threshold is required");
  const auto threshold = parse_threshold(it->second);
  if (!threshold) return error(400, "threshold must be a nonnegative number");
  config.threshold = *threshold;

  if (auto m = query.find("mode"); m != query.end()) {
    try {
      parse_cluster_mode(m->second, config);
    } catch (const std::invalid_argument& e) {
      return error(400, e.what());
    }
  }
  if (auto p = query.find("pinned"); p != query.end() && !p->second.empty()) {
    std::string_view rest = p->second;
    while (true) {
      const auto comma = rest.find(',');
      const auto id = parse_number<RuleIndex>(rest.substr(0, comma));
      if (!id || *id < 0 || static_cast<std::size_t>(*id) >= doc_.meta.rules.size()) {
        return error(400, "pinned must be a comma-separated list of rule ids");
      }
      config.pinned.insert(*id);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }

  const Clustering c = cluster(doc_.windows, k, config);
  json body;
  body["window"] = k;
  body["threshold"] = config.threshold;
  body["mode"] = format_cluster_mode(config);
  json assignment = json::array();
  for (const auto& a : c.assignment) assignment.push_back(a ? json(*a) : json(nullptr));
  body["assignment"] = std::move(assignment);
  json groups = json::array();
  for (const auto& members : c.clusters) groups.push_back(json{{"id", members.front()}, {"members", members}});
  body["clusters"] = std::move(groups);
  return reply(200, body);
}

ApiResponse ApiHandler::series(RuleIndex rule) const {
  const RuleSeries s = rule_series(doc_.windows, rule);
  json body;
  body["rule"] = rule;
  body["times"] = s.times;
  body["self"] = optional_array(s.self);
  json incoming = json::array();
  for (const auto& [src, values] : s.incoming) incoming.push_back(json{{"src", src}, {"values", optional_array(values)}});
  body["incoming"] = std::move(incoming);
  json outgoing = json::array();
  for (const auto& [dst, values] : s.outgoing) outgoing.push_back(json{{"dst", dst}, {"values", optional_array(values)}});
  body["outgoing"] = std::move(outgoing);
  return reply(200, body);
}

int default_port() {
  if (const char* env = std::getenv("DIN_PORT")) {
    if (auto p = parse_number<int>(env); p && *p > 0 && *p < 65536) return *p;
  }
  return 8080;
}

namespace {

constexpr std::string_view kPlaceholderPage =
    "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>DIN explorer</title></head>\n"
    "<body><h1>DIN explorer</h1>\n"
    "<p>No UI bundle is installed. Start the server with <code>--ui DIR</code> to host one.</p>\n"
    "<p>API: <a href=\"/api/meta\">/api/meta</a>, <a href=\"/api/observables\">/api/observables</a>, "
    "/api/window/{k}, /api/window/{k}/clusters, /api/rule/{id}/series</p>\n"
    "</body></html>\n";

}  // namespace

struct Service::Impl {
  ApiHandler api;
  httplib::Server server;

  explicit Impl(ExportDocument doc) : api(std::move(doc)) {}
};

Service::Service(ExportDocument doc, std::optional<std::filesystem::path> ui_dir)
    : impl_(std::make_unique<Impl>(std::move(doc))) {
  auto& server = impl_->server;
  const ApiHandler& api = impl_->api;

  server.Get(R"(/api/.*)", [&api](const httplib::Request& req, httplib::Response& res) {
    QueryParams query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);  // first value wins
    const ApiResponse r = api.get(req.path, query);
    res.set_header("ETag", r.etag);
    res.set_header("Cache-Control", "no-cache");
    if (req.get_header_value("If-None-Match") == r.etag) {
      res.status = 304;
      return;
    }
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  });

  if (ui_dir && server.set_mount_point("/", ui_dir->string())) return;
  server.Get("/", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(std::string(kPlaceholderPage), "text/html");
  });
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool Service::listen() { return impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace din
