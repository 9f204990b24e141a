#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

TEST_SUITE_BEGIN("cli");

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(SPACEOPT_CLI_PATH) + " " + args +
                          " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    result.out.append(buf.data(), n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string fixture(const std::string& name) {
  return std::string(SPACEOPT_DATA_DIR "/fixtures/") + name;
}

std::string data_file(const std::string& name) {
  return std::string(SPACEOPT_DATA_DIR "/") + name;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> cells_of(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("score is deterministic and well formed") {
  const std::string args = "score --space " + fixture("branin_space.json") +
                           " --data " + fixture("branin_seed15.csv") +
                           " --budget 5 --seed 7 --nx 40 --ny 50";
  const RunResult a = run_cli(args);
  REQUIRE(a.exit_code == 0);
  const RunResult b = run_cli(args);
  CHECK(a.out == b.out);

  const auto lines = lines_of(a.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0].rfind("space_id,budget,variant,value", 0) == 0);
  CHECK(lines[2] == "# seed=7 tool=spaceopt 0.1.0");
  const auto cells = cells_of(lines[1]);
  REQUIRE(cells.size() == 9);
  CHECK(cells[0] == "branin_space");
  CHECK(cells[1] == "5");
  CHECK(cells[2] == "mean-bEI");
  CHECK(std::stod(cells[3]) >= 0.0);
}

TEST_CASE("thread count does not change score bytes") {
  const std::string base = "score --space " + fixture("branin_space.json") +
                           " --data " + fixture("branin_seed15.csv") +
                           " --budget 7 --seed 3 --nx 64 --ny 32";
  const RunResult one = run_cli(base + " --threads 1");
  const RunResult four = run_cli(base + " --threads 4");
  REQUIRE(one.exit_code == 0);
  CHECK(one.out == four.out);
}

TEST_CASE("data csv missing a column exits 2 and names it") {
  const auto bad = std::filesystem::temp_directory_path() / "cli_missing_col.csv";
  {
    std::ofstream out(bad);
    out << "x1,objective\n1.0,2.0\n";
  }
  const std::string cmd = std::string(SPACEOPT_CLI_PATH) + " score --space " +
                          fixture("branin_space.json") + " --data " +
                          bad.string() + " --budget 1 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 1024> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  CHECK(WEXITSTATUS(status) == 2);
  CHECK(out.find("'x2'") != std::string::npos);
}

TEST_CASE("PI variants stay inside the unit interval") {
  const RunResult r = run_cli("score --space " + fixture("branin_space.json") +
                              " --data " + fixture("branin_seed15.csv") +
                              " --budget 5 --variant mean-bPI --nx 40 --ny 50");
  REQUIRE(r.exit_code == 0);
  const auto cells = cells_of(lines_of(r.out)[1]);
  const double value = std::stod(cells[3]);
  CHECK(value >= 0.0);
  CHECK(value <= 1.0);
  CHECK(cells[2] == "mean-bPI");
}

TEST_CASE("rank emits one row per space and budget with stable ties") {
  const RunResult single =
      run_cli("rank --spaces " + fixture("branin_space.json") + " --data " +
              fixture("branin_seed15.csv") + " --budgets 5 --nx 20 --ny 20");
  REQUIRE(single.exit_code == 0);
  CHECK(lines_of(single.out).size() == 3);  // header + row + manifest

  // The same file twice: distinct sub-seeds, but ordering must follow values
  // with ids as tiebreak, and both rows must appear at each budget.
  const RunResult dup = run_cli(
      "rank --spaces " + fixture("branin_space.json") + " " +
      fixture("branin_space.json") + " --data " + fixture("branin_seed15.csv") +
      " --budgets 2,4 --nx 20 --ny 20");
  REQUIRE(dup.exit_code == 0);
  const auto lines = lines_of(dup.out);
  REQUIRE(lines.size() == 6);  // header + 4 rows + manifest
  for (std::size_t i = 1; i + 1 < lines.size(); i += 2) {
    const double first = std::stod(cells_of(lines[i])[3]);
    const double second = std::stod(cells_of(lines[i + 1])[3]);
    CHECK(first >= second);
  }
}

TEST_CASE("rank on the branin fixture puts S2 last at every budget") {
  const RunResult r = run_cli(
      "rank --spaces " + fixture("branin_space.json") + " " +
      fixture("branin_s1.json") + " " + fixture("branin_s2.json") + " --data " +
      fixture("branin_seed15.csv") + " --budgets 1,25,100 --nx 150 --ny 150");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 11);  // header + 9 rows + manifest
  for (std::size_t i = 3; i < 10; i += 3) {
    CHECK(cells_of(lines[i])[0] == "branin_s2");  // rank 3 row of each budget
  }
}

TEST_CASE("prune degenerate configuration returns the base space") {
  const RunResult r =
      run_cli("prune --objective branin --b1 5 --b2 1 --rates 1.0 --per-rate 1"
              " --nx 20 --ny 20 --seed 5");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["chosen_rate"] == 1.0);
  CHECK(j["chosen_space"]["dims"][0]["min"] == -5.0);
  CHECK(j["chosen_space"]["dims"][0]["max"] == 10.0);
  CHECK(j["manifest"]["seed"] == 5);
}

TEST_CASE("prune with b1 below 2 exits 2") {
  const RunResult r =
      run_cli("prune --objective branin --b1 1 --b2 5 --rates 0.5 --per-rate 2");
  CHECK(r.exit_code == 2);
}

TEST_CASE("tune-or-fix covers the dropout shape and validates pins") {
  const RunResult r = run_cli(
      "tune-or-fix --space " + data_file("wide7_base.json") + " --data " +
      fixture("wide7_tuning35.csv") + " --dim r --fix 0 --fix 0.5"
      " --budgets 5,20 --nx 24 --ny 24");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["results"].size() == 2);
  for (const auto& entry : j["results"]) {
    REQUIRE(entry["scored"].size() == 3);
    CHECK(entry["scored"][0]["label"] == "tuned");
    CHECK(entry["scored"][1]["label"] == "r=0");
    CHECK(entry["scored"][2]["label"] == "r=0.5");
  }

  const RunResult bad = run_cli(
      "tune-or-fix --space " + data_file("wide7_base.json") + " --data " +
      fixture("wide7_tuning35.csv") + " --dim r --fix 2.5 --budgets 5");
  CHECK(bad.exit_code == 2);

  const RunResult none = run_cli(
      "tune-or-fix --space " + data_file("wide7_base.json") + " --data " +
      fixture("wide7_tuning35.csv") + " --dim r --budgets 5 --nx 8 --ny 8");
  REQUIRE(none.exit_code == 0);
  CHECK(nlohmann::json::parse(none.out)["results"][0]["recommendation"] ==
        "tuned");
}

TEST_CASE("unknown experiments exit 2 and list the registry") {
  const std::string cmd = std::string(SPACEOPT_CLI_PATH) +
                          " reproduce --experiment nope --out /tmp/nope 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 1024> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  CHECK(WEXITSTATUS(status) == 2);
  CHECK(out.find("hartmann-pruning") != std::string::npos);
}

TEST_CASE("bad flags exit 2, not a CLI11 code") {
  CHECK(run_cli("score --space missing.json").exit_code == 2);   // missing flags
  CHECK(run_cli("definitely-not-a-command").exit_code == 2);
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_SUITE_END();
