#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "din/export.hpp"
#include "din/parser.hpp"

using namespace din;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::filesystem::path kSource(DIN_SOURCE_DIR);

ExportDocument simulate(const char* model, double t_end, double tau, std::uint64_t seed, DinKind kind) {
  const Model m = parse_model(slurp(kSource / "models" / model));
  SimConfig c;
  c.t_end = t_end;
  c.tau = tau;
  c.seed = seed;
  c.din_kind = kind;
  return make_export(m, std::filesystem::path(model).stem().string(), c, run(m, c));
}

// Replaces the first occurrence of `from` in the golden text.
std::string tamper(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("round trip") {
  for (DinKind kind : {DinKind::Activity, DinKind::Probability}) {
    const ExportDocument doc = simulate("kai_reduced.ka", 40, 4, 3, kind);
    CHECK(doc.meta.kind == kind);
    CHECK(doc.meta.rules.size() == 16);
    CHECK(doc.meta.rules[11].name == "C.sync");
    const std::string text = dump_export(doc);
    const ExportDocument back = parse_export(text);
    CHECK(back == doc);
    CHECK(dump_export(back) == text);
  }
}

TEST_CASE("irrational values survive the round trip exactly") {
  ExportDocument doc = simulate("two_state.ka", 1, 1, 1, DinKind::Activity);
  doc.windows[0].links = {{0, 1, 1.0 / 3.0}, {1, 0, -2.0 / 7.0}, {1, 1, 1e-300}};
  CHECK(parse_export(dump_export(doc)) == doc);
}

TEST_CASE("one window per line") {
  const ExportDocument doc = simulate("dimer.ka", 5, 1, 2, DinKind::Activity);
  const std::string text = dump_export(doc);
  std::size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  // Header lines, one per observable row, one per window.
  CHECK(lines >= doc.windows.size() + doc.observables.times.size());
  CHECK(text.find("{\"t_start\":0.0,") != std::string::npos);
}

TEST_CASE("golden file matches byte for byte") {
  const std::string golden = slurp(kSource / "tests" / "golden" / "two_state_seed1.json");
  REQUIRE_FALSE(golden.empty());
  CHECK(dump_export(simulate("two_state.ka", 10, 0.5, 1, DinKind::Activity)) == golden);
}

TEST_CASE("validation") {
  const std::string golden = slurp(kSource / "tests" / "golden" / "two_state_seed1.json");
  const ExportDocument doc = parse_export(golden);
  CHECK(doc.meta.model == "two_state");
  CHECK(doc.windows.size() == 20);

  CHECK_THROWS_AS(parse_export(""), ExportFormatError);
  CHECK_THROWS_AS(parse_export("[1, 2]"), ExportFormatError);
  CHECK_THROWS_AS(parse_export("{\"format\": \"other\"}"), ExportFormatError);
  CHECK_THROWS_AS(parse_export(tamper(golden, "\"format_version\": 1", "\"format_version\": 2")), ExportFormatError);
  CHECK_THROWS_AS(parse_export(tamper(golden, "\"window_count\":20", "\"window_count\":19")), ExportFormatError);
  CHECK_THROWS_AS(parse_export(tamper(golden, "{\"id\":1,", "{\"id\":5,")), ExportFormatError);
  CHECK_THROWS_AS(parse_export(tamper(golden, "\"din\":\"activity\"", "\"din\":\"both\"")), ExportFormatError);
  CHECK_THROWS_AS(parse_export(tamper(golden, "\"status\":\"completed\"", "\"status\":\"odd\"")), ExportFormatError);
  CHECK_THROWS_AS(parse_export(tamper(golden, "[123.0,877.0]", "[123.0]")), ExportFormatError);
  CHECK_THROWS_AS(parse_export(tamper(golden, "{\"rule\":1,", "{\"rule\":0,")), ExportFormatError);
  CHECK_THROWS_AS(parse_export(tamper(golden, "\"src\":0,", "\"src\":7,")), ExportFormatError);
  CHECK_THROWS_AS(parse_export(tamper(golden, "\"value\":-0.0010672734077124483", "\"value\":0.0")), ExportFormatError);
  CHECK_THROWS_AS(parse_export(tamper(golden, "\"value\":-0.0010672734077124483", "\"value\":\"x\"")), ExportFormatError);
  CHECK_THROWS_AS(parse_export(golden.substr(0, golden.size() / 2)), ExportFormatError);
}

TEST_CASE("file io") {
  const auto dir = std::filesystem::temp_directory_path() / "din_test_export";
  std::filesystem::create_directories(dir);
  const ExportDocument doc = simulate("two_state.ka", 2, 1, 4, DinKind::Probability);
  write_export(dir / "a.json", doc);
  CHECK(read_export(dir / "a.json") == doc);
  CHECK(slurp(dir / "a.json") == dump_export(doc));
  CHECK_THROWS_AS(read_export(dir / "missing.json"), IoError);
  CHECK_THROWS_AS(write_export(dir / "no" / "such" / "dir" / "a.json", doc), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("run status is recorded") {
  const Model m = parse_model("%agent: A()\n'decay' A() -> . @ 1.0\n%init: 3 A()\n");
  SimConfig c;
  c.t_end = 100;
  c.tau = 10;
  const ExportDocument doc = make_export(m, "decay", c, run(m, c));
  CHECK(doc.meta.status == "deadlock");
  CHECK(doc.meta.events == 3);
  CHECK(parse_export(dump_export(doc)) == doc);
}
