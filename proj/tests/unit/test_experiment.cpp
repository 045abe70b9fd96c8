#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "dft/errors.hpp"
#include "dft/experiment.hpp"

using namespace dft;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

const char* kSmallPlancherel = R"(
[run]
suite = plancherel
samples = 6
refinement = false

[grid]
L = 20
N = 256

[potential]
families = zero
)";

std::filesystem::path scratch_dir(const std::string& name) {
  const auto d = std::filesystem::temp_directory_path() / ("dft_unit_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse(kSmallPlancherel);
  CHECK(c.suite == "plancherel");
  CHECK(c.N == 256);
  CHECK(c.samples == 6);
  CHECK_FALSE(c.refinement);
  REQUIRE(c.families.size() == 1);
  CHECK_NOTHROW(validate_config(c));

  const ExperimentConfig s = parse("[probe]\npairs = 6:6, 4:inf\nexponents = 4, 4, 2\n");
  REQUIRE(s.pairs.size() == 2);
  CHECK(s.pairs[1].second == kInf);
  CHECK(s.exponents == std::vector<double>{4.0, 4.0, 2.0});

  CHECK_THROWS_AS(parse("[grid]\nwidth = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[grid]\nN = many\n"), ConfigError);
  CHECK_THROWS_AS(parse("[grid\nN = 3\n"), ConfigError);
}

TEST_CASE("config validation") {
  ExperimentConfig c = parse("[run]\nsuite = cm-probe\n[probe]\nexponents = 4, 4, 4\n");
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = parse("[run]\nsuite = strichartz\n[probe]\npairs = 2:2\n");
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = parse("[run]\nsuite = plancherel\n[grid]\nN = 1000\n");
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = parse("[run]\nsuite = nothing\n");
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = parse("[run]\nsuite = cm-probe\n[probe]\nexponents = 4, 4, 4\n");
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
}

TEST_CASE("free Plancherel suite passes and serializes deterministically") {
  ExperimentConfig c = parse(kSmallPlancherel);
  const RunReport a = run_experiment(c);
  CHECK(a.all_pass());
  c.jobs = 4;
  const RunReport b = run_experiment(c);
  CHECK(report_json(a) == report_json(a));
  CHECK(report_json(a) == report_json(b));
  CHECK(count_lines(records_csv(a)) == a.records.size() + 1);

  const auto dir = scratch_dir("report");
  emit_report(a, dir.string());
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "records.csv"));
  CHECK(std::filesystem::exists(dir / "timing.txt"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("failed gating records fail the report") {
  RunReport r;
  r.records.push_back({"a", 1.0, 2.0, "<", true, "oracle", true});
  r.records.push_back({"b", 3.0, 2.0, "<", false, "oracle", false});
  CHECK(r.all_pass());
  r.records.push_back({"c", 3.0, 2.0, "<", false, "oracle", true});
  CHECK_FALSE(r.all_pass());
  r.records.push_back({"d", std::nan(""), 2.0, "<", false, "oracle", true});
  CHECK(report_json(r).find("\"nan\"") != std::string::npos);
}

#ifdef DFT_TOOL_PATH
namespace {

int tool(const std::string& args) {
  const std::string cmd = std::string(DFT_TOOL_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("command line exit codes") {
  const auto dir = scratch_dir("cli");
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const std::string good = write("good.ini", kSmallPlancherel);
  const std::string hoelder = write("bad.ini", "[run]\nsuite = cm-probe\n[probe]\nexponents = 4, 4, 4\n");
  const std::string decay = write("decay.ini", "[run]\nsuite = symbol-decay\n[probe]\nsymbols = cm-ratio\n");
  CHECK(tool("verify plancherel --config " + good + " --out " + (dir / "out").string()) == 0);
  CHECK(std::filesystem::exists(dir / "out" / "report.json"));
  CHECK(tool("verify cm-probe --config " + hoelder) == 2);
  CHECK(tool("verify symbol-decay --config " + decay) == 1);
  CHECK(tool("verify plancherel --config " + (dir / "missing.ini").string()) == 2);
  std::filesystem::remove_all(dir);
}
#endif
