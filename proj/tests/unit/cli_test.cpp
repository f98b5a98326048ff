#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

CommandResult run_cli(const std::string& args) {
  const char* bin = std::getenv("LQM_CLI_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "LQM_CLI_BIN must point at the lqm binary");
  const std::string command = std::string(bin) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CommandResult result;
  std::array<char, 512> buffer{};
  while (fgets(buffer.data(), buffer.size(), pipe)) result.output += buffer.data();
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string temp_dir() {
  const auto dir = fs::temp_directory_path() / "lqm_cli_test";
  fs::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("scaffold, validate, run, compare round trip") {
  const std::string dir = temp_dir();
  const std::string scenario = dir + "/single.json";

  auto scaffold = run_cli("scaffold single-link " + scenario);
  CHECK(scaffold.exit_code == 0);

  auto validate = run_cli("validate " + scenario);
  CHECK(validate.exit_code == 0);
  CHECK(validate.output.find("0 violations") != std::string::npos);

  auto run = run_cli("run --scenario " + scenario + " --out " + dir + "/run");
  CHECK(run.exit_code == 0);
  CHECK(fs::exists(dir + "/run/trace.csv"));
  CHECK(fs::exists(dir + "/run/report.json"));

  auto compare = run_cli("compare " + dir + "/run/trace.csv " + dir + "/run/trace.csv");
  CHECK(compare.exit_code == 0);
  CHECK(compare.output.find("mean") != std::string::npos);
  CHECK(compare.output.find("0.000000") != std::string::npos);

  auto plots = run_cli("plot " + dir + "/run/trace.csv --out " + dir + "/plots");
  CHECK(plots.exit_code == 0);
  CHECK(fs::exists(dir + "/plots/link_1.svg"));

  fs::remove_all(dir);
}

TEST_CASE("builtin scenarios run straight from their names") {
  const std::string dir = temp_dir();
  auto run = run_cli("run --builtin single-link --horizon 20 --out " + dir + "/builtin");
  CHECK(run.exit_code == 0);
  CHECK(fs::exists(dir + "/builtin/trace.csv"));
  fs::remove_all(dir);
}

TEST_CASE("determinism check runs both execution modes") {
  const std::string dir = temp_dir();
  auto run = run_cli("run --builtin single-link --horizon 20 --check-determinism --out " + dir +
                     "/det");
  CHECK(run.exit_code == 0);
  fs::remove_all(dir);
}

TEST_CASE("broken scenarios fail validation with exit 1") {
  const std::string dir = temp_dir();
  const std::string path = dir + "/broken.json";
  {
    FILE* f = fopen(path.c_str(), "w");
    REQUIRE(f);
    fputs("{\"schema\": 1, \"dt\": -1, \"horizon\": 5, \"links\": [], \"nodes\": [], "
          "\"demand\": []}",
          f);
    fclose(f);
  }
  auto run = run_cli("run --scenario " + path + " --out " + dir + "/out");
  CHECK(run.exit_code == 1);
  fs::remove_all(dir);
}

TEST_CASE("reserved and unknown inputs are rejected") {
  auto seedless = run_cli("--seedless run --builtin single-link");
  CHECK(seedless.exit_code == 1);
  CHECK(seedless.output.find("seedless") != std::string::npos);

  auto unknown = run_cli("scaffold not-a-template /dev/null");
  CHECK(unknown.exit_code == 1);
  CHECK(unknown.output.find("unknown scenario template") != std::string::npos);
}
