#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "din/influence.hpp"
#include "din/io_error.hpp"
#include "din/simulator.hpp"
#include "json.hpp"

namespace din {

inline constexpr std::string_view kToolVersion = "dinkit 0.1.0";

struct RuleInfo {
  RuleIndex id = 0;
  std::string name;

  friend bool operator==(const RuleInfo&, const RuleInfo&) = default;
};

struct ExportMeta {
  std::string model;
  std::vector<RuleInfo> rules;
  double tau = 0.0;
  double t_end = 0.0;
  DinKind kind = DinKind::Activity;
  std::uint64_t seed = 0;
  std::string version{kToolVersion};
  std::string status{"completed"};
  std::uint64_t events = 0;
  std::uint64_t null_events = 0;

  friend bool operator==(const ExportMeta&, const ExportMeta&) = default;
};

/// Self-contained result of one run: what the explorer and the CLI read.
struct ExportDocument {
  ExportMeta meta;
  ObservableSeries observables;
  std::vector<DinWindow> windows;

  friend bool operator==(const ExportDocument&, const ExportDocument&) = default;
};

class ExportFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExportDocument make_export(const Model& model, std::string model_name, const SimConfig& config,
                           const SimResult& result);

nlohmann::ordered_json meta_to_json(const ExportMeta& meta, std::size_t window_count);
nlohmann::ordered_json observables_to_json(const ObservableSeries& series);
nlohmann::ordered_json window_to_json(const DinWindow& window);
nlohmann::ordered_json to_json(const ExportDocument& doc);

/// Serialized document; numbers use the shortest decimal form that round-trips.
std::string dump_export(const ExportDocument& doc);

/// Parses and validates; throws ExportFormatError.
ExportDocument parse_export(std::string_view text);

void write_export(const std::filesystem::path& path, const ExportDocument& doc);
ExportDocument read_export(const std::filesystem::path& path);

}  // namespace din
