#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "din/cli.hpp"
#include "din/export.hpp"

using namespace din;
namespace fs = std::filesystem;

namespace {

const fs::path kSource(DIN_SOURCE_DIR);

struct Outcome {
  int code;
  std::string out, err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "din");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string model(const char* name) { return (kSource / "models" / name).string(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / "din_test_cli";
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const char* name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("check prints a summary") {
  const Outcome r = cli({"check", model("two_state.ka")});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("rules 2") != std::string::npos);
  CHECK(r.out.find("'phos'") != std::string::npos);
  CHECK(r.out.find("A(x{u p})") != std::string::npos);
  CHECK(r.err.empty());

  const Outcome kai = cli({"check", model("kai_reduced.ka")});
  CHECK(kai.code == kExitOk);
  CHECK(kai.out.find("rules 16") != std::string::npos);
}

TEST_CASE("model errors exit with 2 and a position") {
  TempDir dir;
  std::ofstream(dir / "bad.ka") << "%agent: A(x{u p})\n'r' A(x{q}) -> A(x{p}) @ 1\n";
  const Outcome r = cli({"check", dir / "bad.ka"});
  CHECK(r.code == kExitInvalid);
  CHECK(r.err.find("bad.ka:2:") != std::string::npos);
  CHECK(r.err.find("unknown-state") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"simulate", model("two_state.ka"), "--tau", "1", "--out", "x.json"}).code == kExitUsage);
  CHECK(cli({"cluster", "x.json"}).code == kExitUsage);
  CHECK(cli({"serve", "x.json", "--port", "70000"}).code == kExitUsage);
  CHECK(cli({"simulate", model("two_state.ka"), "--t-end", "abc", "--tau", "1", "--out", "x"}).code == kExitUsage);
  CHECK(cli({"--version"}).code == kExitOk);
}

TEST_CASE("io errors exit with 3") {
  TempDir dir;
  CHECK(cli({"check", dir / "missing.ka"}).code == kExitIo);
  CHECK(cli({"cluster", dir / "missing.json", "--threshold", "0"}).code == kExitIo);
  CHECK(cli({"simulate", model("two_state.ka"), "--t-end", "1", "--tau", "1", "--out", dir / "no/such/o.json"}).code ==
        kExitIo);
  CHECK(cli({"serve", dir / "missing.json"}).code == kExitIo);
}

TEST_CASE("invalid configurations exit with 2") {
  TempDir dir;
  const std::string out = dir / "o.json";
  CHECK(cli({"simulate", model("two_state.ka"), "--t-end", "1", "--tau", "2", "--out", out}).code == kExitInvalid);
  CHECK(cli({"simulate", model("two_state.ka"), "--t-end", "1", "--tau", "0", "--out", out}).code == kExitInvalid);
  // The network kind is checked while parsing the command line.
  CHECK(cli({"simulate", model("two_state.ka"), "--t-end", "1", "--tau", "1", "--din", "both", "--out", out}).code ==
        kExitUsage);
  CHECK_FALSE(fs::exists(out));

  REQUIRE(cli({"simulate", model("two_state.ka"), "--t-end", "2", "--tau", "1", "--out", out}).code == kExitOk);
  CHECK(cli({"cluster", out, "--threshold", "-1"}).code == kExitInvalid);
  CHECK(cli({"cluster", out, "--threshold", "0", "--mode", "window:x"}).code == kExitInvalid);
  CHECK(cli({"cluster", out, "--threshold", "0", "--at", "2"}).code == kExitInvalid);
  CHECK(cli({"cluster", out, "--threshold", "0", "--pin", "5"}).code == kExitInvalid);

  std::ofstream(dir / "junk.json") << "{\"format\": \"din-export\"}";
  CHECK(cli({"cluster", dir / "junk.json", "--threshold", "0"}).code == kExitInvalid);
  CHECK(cli({"serve", dir / "junk.json"}).code == kExitInvalid);
}

TEST_CASE("simulate is reproducible") {
  TempDir dir;
  const std::vector<std::string> base{"simulate", model("kai_reduced.ka"), "--t-end", "20", "--tau", "2", "--seed", "5"};
  auto with = [&](std::vector<std::string> extra) {
    auto a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  };
  REQUIRE(cli(with({"--out", dir / "a.json"})).code == kExitOk);
  REQUIRE(cli(with({"--out", dir / "b.json"})).code == kExitOk);
  REQUIRE(cli(with({"--out", dir / "c.json", "--din", "probability", "--trace", dir / "t.jsonl"})).code == kExitOk);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  CHECK(slurp(dir / "a.json") != slurp(dir / "c.json"));
  CHECK(read_export(dir / "c.json").meta.kind == DinKind::Probability);
  CHECK(fs::file_size(dir / "t.jsonl") > 0);
}

TEST_CASE("simulate matches the golden document") {
  TempDir dir;
  REQUIRE(cli({"simulate", model("two_state.ka"), "--t-end", "10", "--tau", "0.5", "--seed", "1", "--out",
               dir / "g.json"})
              .code == kExitOk);
  CHECK(slurp(dir / "g.json") == slurp(kSource / "tests" / "golden" / "two_state_seed1.json"));
}

TEST_CASE("early stop is reported") {
  TempDir dir;
  const Outcome r = cli({"simulate", model("two_state.ka"), "--t-end", "100", "--tau", "1", "--max-events", "50",
                         "--out", dir / "o.json"});
  CHECK(r.code == kExitOk);
  CHECK(r.err.find("max-events") != std::string::npos);
  CHECK(read_export(dir / "o.json").meta.status == "max-events");
}

TEST_CASE("cluster output") {
  const std::string golden = (kSource / "tests" / "golden" / "two_state_seed1.json").string();
  const Outcome all = cli({"cluster", golden, "--threshold", "1e9", "--at", "0"});
  CHECK(all.code == kExitOk);
  CHECK(all.out == "window 0 [0, 0.5]: no clusters unclustered: 0 1\n");

  const Outcome joined = cli({"cluster", golden, "--threshold", "0", "--at", "0"});
  CHECK(joined.out == "window 0 [0, 0.5]: {0 1}\n");

  const Outcome every = cli({"cluster", golden, "--threshold", "0", "--mode", "global"});
  std::size_t lines = 0;
  for (char ch : every.out) lines += ch == '\n';
  CHECK(lines == 20);

  const Outcome pinned = cli({"cluster", golden, "--threshold", "0", "--at", "3", "--pin", "0", "--json"});
  CHECK(pinned.code == kExitOk);
  // Rule 1 still influences itself.
  CHECK(pinned.out == "[{\"window\":3,\"assignment\":[null,1],\"clusters\":[[1]]}]\n");
  const Outcome both = cli({"cluster", golden, "--threshold", "0", "--at", "3", "--pin", "0", "--pin", "1", "--json"});
  CHECK(both.out == "[{\"window\":3,\"assignment\":[null,null],\"clusters\":[]}]\n");
}

TEST_CASE("the installed binary reports exit codes") {
  TempDir dir;
  const std::string bin = DIN_BINARY;
  auto status = [&](const std::string& args) {
    const int s = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  CHECK(status("check " + model("dimer.ka")) == 0);
  CHECK(status("") == 1);
  CHECK(status("check " + dir / "missing.ka") == 3);
  std::ofstream(dir / "bad.ka") << "%agent: A()\n%agent: A()\n";
  CHECK(status("check " + dir / "bad.ka") == 2);
  CHECK(status("simulate " + model("decay.ka") + " --t-end 2 --tau 1 --out " + dir / "d.json") == 0);
  CHECK(status("cluster " + (dir / "d.json") + " --threshold 1e9 --at 0") == 0);
}
