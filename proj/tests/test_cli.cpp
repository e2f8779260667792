#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <brue/json_io.hpp>

// end-to-end tests against the installed binary (path injected by the build)
#ifndef BRUE_CLI_PATH
#error "BRUE_CLI_PATH must point at the CLI binary"
#endif

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(BRUE_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// one scratch directory with the bundled networks, shared by every test
const std::string& data_dir() {
  static const std::string dir = [] {
    const auto base = std::filesystem::temp_directory_path() / "brue_cli_test";
    std::filesystem::remove_all(base);
    const RunResult r = run("make " + base.string());
    REQUIRE(r.code == 0);
    return base.string();
  }();
  return dir;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::string fmt12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

TEST_CASE("make writes parseable bundled networks") {
  const std::string dir = data_dir();
  for (const char* name : {"wheatstone.json", "tworoad.json", "chain.json"})
    CHECK_NOTHROW(brue::load_network(dir + "/" + name));
  for (const char* name : {"n1.json", "n2.json"})
    CHECK_NOTHROW(brue::load_stochastic_network(dir + "/" + name));
}

TEST_CASE("ue command reports the wheatstone equilibrium") {
  const RunResult csv = run("ue " + data_dir() + "/wheatstone.json");
  REQUIRE(csv.code == 0);
  const auto rows = parse_csv(csv.out);
  REQUIRE(rows.size() >= 4);
  CHECK(rows[0] == std::vector<std::string>{"quantity", "value"});
  bool saw_psi0 = false;
  for (const auto& r : rows)
    if (r.size() == 2 && r[0] == "psi0") {
      saw_psi0 = true;
      CHECK(std::stod(r[1]) == Catch::Approx(1.0).margin(1e-6));
    }
  CHECK(saw_psi0);

  const RunResult js = run("ue " + data_dir() + "/wheatstone.json --format json");
  REQUIRE(js.code == 0);
  const brue::json j = brue::json::parse(js.out);
  CHECK(j.at("psi0").get<double>() == Catch::Approx(1.0).margin(1e-6));
  CHECK(j.at("relative_gap").get<double>() <= 1e-9);
  CHECK(j.at("edges").size() == 5);
}

TEST_CASE("ue command handles the two-road file") {
  const RunResult js = run("ue " + data_dir() + "/tworoad.json --format json");
  REQUIRE(js.code == 0);
  CHECK(brue::json::parse(js.out).at("psi0").get<double>() == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("malformed or missing input exits with the input code") {
  const std::string bad = data_dir() + "/garbage.json";
  std::ofstream(bad) << "{ not json";
  CHECK(run("ue " + bad).code == 2);
  CHECK(run("ue " + data_dir() + "/does_not_exist.json").code == 2);
  CHECK(run("worst " + data_dir() + "/wheatstone.json").code == 2);  // no --eps
  CHECK(run("reproduce not_a_target").code == 2);
  CHECK(run("signal " + data_dir() + "/wheatstone.json --eps 0.1").code == 2);
  CHECK(run("ue " + data_dir() + "/n1.json").code == 2);
}

TEST_CASE("worst command matches the pinned wheatstone values") {
  const RunResult zero = run("worst " + data_dir() + "/wheatstone.json --eps 0 --format json");
  REQUIRE(zero.code == 0);
  CHECK(brue::json::parse(zero.out).at("psi_eps").get<double>() ==
        Catch::Approx(1.0).margin(1e-6));

  const RunResult half = run("worst " + data_dir() + "/wheatstone.json --eps 0.5 --format json");
  REQUIRE(half.code == 0);
  const brue::json j = brue::json::parse(half.out);
  CHECK(j.at("psi_eps").get<double>() == Catch::Approx(2.0).margin(1e-6));
  CHECK(j.at("certified").get<bool>());
}

TEST_CASE("worst sweep emits a nondecreasing csv curve that round-trips") {
  const std::string cmd = "worst " + data_dir() + "/tworoad.json --eps-grid 0:2:0.25";
  const RunResult r = run(cmd);
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 10);  // header + 9 grid points
  CHECK(rows[0] == std::vector<std::string>{"eps", "psi_eps"});
  double prev = -1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 2);
    const double psi = std::stod(rows[i][1]);
    CHECK(psi >= prev - 1e-12);
    prev = psi;
    // 12-significant-digit output reprints to the same bytes
    CHECK(fmt12(std::stod(rows[i][0])) == rows[i][0]);
    CHECK(fmt12(psi) == rows[i][1]);
  }
  CHECK(std::stod(rows[1][1]) == Catch::Approx(1.0));
  CHECK(std::stod(rows.back()[1]) == Catch::Approx(2.0));

  CHECK(run(cmd).out == r.out);  // byte-identical rerun
}

TEST_CASE("signal command reproduces the design regimes") {
  const RunResult none = run("signal " + data_dir() + "/n1.json --eps 0.02 --format json");
  REQUIRE(none.code == 0);
  const brue::json jn = brue::json::parse(none.out);
  CHECK(jn.at("no_revelation").get<bool>());
  REQUIRE(jn.at("posteriors").size() == 1);
  CHECK(jn.at("posteriors")[0][1].get<double>() == Catch::Approx(0.5).margin(1e-9));

  const RunResult full = run("signal " + data_dir() + "/n1.json --eps 0.095 --format json");
  REQUIRE(full.code == 0);
  const brue::json jf = brue::json::parse(full.out);
  CHECK(jf.at("full_revelation").get<bool>());
  REQUIRE(jf.at("posteriors").size() == 2);
  // full revelation: the conditional matrix is the identity kernel
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t w = 0; w < 2; ++w)
      CHECK(jf.at("conditional")[m][w].get<double>() ==
            Catch::Approx(jf.at("posteriors")[m][w].get<double>() > 0.5 ? 1.0 : 0.0)
                .margin(1e-9));

  const RunResult n2 = run("signal " + data_dir() + "/n2.json --eps 1.0 --format json");
  REQUIRE(n2.code == 0);
  const brue::json j2 = brue::json::parse(n2.out);
  CHECK(j2.at("full_revelation").get<bool>());
  CHECK(j2.at("expected_cost").get<double>() == Catch::Approx(1.25).margin(2e-3));
}

TEST_CASE("prior override reweights the designed scheme") {
  const RunResult r =
      run("signal " + data_dir() + "/n2.json --eps 1.0 --prior 0.25 --format json");
  REQUIRE(r.code == 0);
  const brue::json j = brue::json::parse(r.out);
  CHECK(j.at("prior")[1].get<double>() == Catch::Approx(0.25));
  CHECK(run("signal " + data_dir() + "/n2.json --eps 1.0 --prior 0.2,0.3").code == 2);
}

TEST_CASE("signal csv sweeps the belief space with its envelope") {
  const std::string cmd =
      "signal " + data_dir() + "/n2.json --eps 1.0 --grid-size 41";
  const RunResult r = run(cmd);
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 42);
  CHECK(rows[0] == std::vector<std::string>{"mu", "psi_eps_mu", "envelope"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 3);
    const double value = std::stod(rows[i][1]);
    const double env = std::stod(rows[i][2]);
    CHECK(env <= value + 1e-9);
    CHECK(fmt12(std::stod(rows[i][0])) == rows[i][0]);
  }
  // endpoints touch: revealing a degenerate belief costs exactly its value
  CHECK(std::stod(rows[1][1]) == Catch::Approx(std::stod(rows[1][2])));
  CHECK(std::stod(rows.back()[1]) == Catch::Approx(std::stod(rows.back()[2])));

  CHECK(run(cmd).out == r.out);
}

TEST_CASE("reproduce targets pass and report rows") {
  for (const char* target : {"wheatstone", "chain"}) {
    const RunResult r = run(std::string("reproduce ") + target);
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0] ==
          std::vector<std::string>{"group", "check", "observed", "expected", "tol", "status"});
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].back() == "PASS");
  }
  const RunResult json_run = run("reproduce wheatstone --format json");
  REQUIRE(json_run.code == 0);
  for (const auto& row : brue::json::parse(json_run.out))
    CHECK(row.at("status").get<std::string>() == "PASS");
}

TEST_CASE("output flag writes the same bytes to a file") {
  const std::string path = data_dir() + "/ue_out.csv";
  const RunResult direct = run("ue " + data_dir() + "/wheatstone.json");
  const RunResult filed = run("ue " + data_dir() + "/wheatstone.json --output " + path);
  REQUIRE(filed.code == 0);
  CHECK(filed.out.empty());
  std::ifstream in(path);
  std::stringstream content;
  content << in.rdbuf();
  CHECK(content.str() == direct.out);
}
