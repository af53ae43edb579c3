#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "din/export.hpp"

namespace din {

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::string etag;  // strong validator of body
};

using QueryParams = std::map<std::string, std::string, std::less<>>;

/// Routes the read-only API over one document. Every response is a function
/// of (document, path, query) only.
class ApiHandler {
 public:
  explicit ApiHandler(ExportDocument doc);

  const ExportDocument& document() const { return doc_; }
  ApiResponse get(std::string_view path, const QueryParams& query = {}) const;

 private:
  ApiResponse window(std::size_t k, const QueryParams& query) const;
  ApiResponse clusters(std::size_t k, const QueryParams& query) const;
  ApiResponse series(RuleIndex rule) const;

  ExportDocument doc_;
};

/// Default port: $DIN_PORT when set and valid, else 8080.
int default_port();

/// HTTP front end: the API under /api and the UI bundle (or a placeholder
/// page) at /.
class Service {
 public:
  Service(ExportDocument doc, std::optional<std::filesystem::path> ui_dir = std::nullopt);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds; port 0 picks a free one. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called. Requires a successful bind().
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace din
